#include "dcroute/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dcroute {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else if constexpr (std::is_floating_point_v<T>) {
      out += fmt(items[i]);
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

BoundaryStats DcRouteRunner::boundary() {
  BoundaryStats stats;
  stats.pulled = s_.pull_back();
  stats.pushed = s_.push_forward();
  stats.push_passes = s_.last_push_passes();
  return stats;
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& tag, const Topology& topo,
                                          const BaselineOptions& options) {
  if (tag == "dcroute") return std::make_unique<DcRouteRunner>(topo);
  return std::make_unique<LpBaselineScheduler>(topo, BaselineKind::parse(tag), options);
}

std::string SimMetrics::volume_signature() const {
  return "requests=" + std::to_string(requests) + " admitted=" + std::to_string(admitted) +
         " offered=" + fmt(offered_volume) + " rejected=" + fmt(rejected_volume) +
         " delivered=" + fmt(delivered_volume) + " pulled=" + fmt(pulled_total) +
         " pushed=" + fmt(pushed_total) + " slots=" + std::to_string(slots) +
         " violations=" + std::to_string(violations);
}

SimMetrics run_simulation(Scheduler& scheduler, std::span<const TraceEntry> trace,
                          const SimOptions& options) {
  std::vector<Request> requests = to_requests(trace);
  SimMetrics m;
  m.requests = requests.size();
  std::vector<double> decision(requests.size(), 0.0);
  double admitted_time = 0.0;
  double admitted_volume = 0.0;
  const Slot start = scheduler.now();
  if (options.schedule_out) write_schedule_header(*options.schedule_out);

  auto abort = [&](const std::string& what) -> SimulationAborted {
    return SimulationAborted(what, scheduler.now(), scheduler.dump());
  };

  std::size_t next = 0;
  while (next < requests.size() || scheduler.active_count() > 0) {
    const Slot t = scheduler.now();
    for (; next < requests.size() && requests[next].arrival <= t; ++next) {
      Request& r = requests[next];
      if (r.arrival < t) {
        throw std::invalid_argument("trace not sorted by arrival or starts before the scheduler");
      }
      m.offered_volume += r.volume;
      const auto t0 = Clock::now();
      const bool ok = scheduler.admit(r);
      decision[next] = seconds_since(t0);
      if (ok) {
        ++m.admitted;
        admitted_time += decision[next];
        admitted_volume += r.volume;
      } else {
        m.rejected_volume += r.volume;
      }
    }
    const auto t0 = Clock::now();
    const BoundaryStats b = scheduler.boundary();
    m.time_boundary += seconds_since(t0);
    m.pulled_total += b.pulled;
    m.pulled_max = std::max(m.pulled_max, b.pulled);
    m.pushed_total += b.pushed;
    m.pushed_max = std::max(m.pushed_max, b.pushed);
    m.push_passes_max = std::max(m.push_passes_max, b.push_passes);
    try {
      if (options.check_invariants) scheduler.check_invariants();
      const SlotSchedule schedule = scheduler.walk();
      for (const ScheduleRow& row : schedule.rows) m.delivered_volume += row.rate;
      if (options.schedule_out) write_schedule(*options.schedule_out, schedule);
    } catch (const InvariantViolation& e) {
      throw abort(e.what());
    }
  }
  m.slots = scheduler.now() - start;
  if (std::abs(m.delivered_volume - admitted_volume) > 1e-6 * std::max(1.0, admitted_volume)) {
    throw abort("delivered " + fmt(m.delivered_volume) + " of " + fmt(admitted_volume) + " admitted");
  }

  double decisions = 0.0;
  for (double d : decision) decisions += d;
  m.time_total = decisions + m.time_boundary;
  if (m.requests > 0) {
    m.time_mean = m.time_total / static_cast<double>(m.requests);
    std::vector<double> sorted = decision;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size())));
    m.time_p99 = sorted[std::max<std::size_t>(rank, 1) - 1];
  }
  if (m.admitted > 0) m.time_admitted_mean = admitted_time / static_cast<double>(m.admitted);
  if (m.offered_volume > 0.0) m.rejected_fraction = m.rejected_volume / m.offered_volume;
  m.pivots = scheduler.solver_pivots();
  return m;
}

std::vector<TraceEntry> subdivide_slots(std::span<const TraceEntry> trace, int f) {
  if (f < 1) throw std::invalid_argument("subdivision factor must be at least 1");
  std::vector<TraceEntry> out(trace.begin(), trace.end());
  for (TraceEntry& e : out) {
    e.arrival *= f;
    e.dl *= f;
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (topologies.empty()) throw std::invalid_argument(name + ": no topology");
  if (lambdas.empty()) throw std::invalid_argument(name + ": no lambda");
  if (schedulers.empty()) throw std::invalid_argument(name + ": no scheduler");
  if (subdivisions.empty()) throw std::invalid_argument(name + ": no subdivision factor");
  if (seeds.empty()) throw std::invalid_argument(name + ": no seed");
  for (int f : subdivisions) {
    if (f < 1) throw std::invalid_argument(name + ": subdivision factor must be at least 1");
  }
  for (const std::string& s : schedulers) {
    if (s != "dcroute") BaselineKind::parse(s);
  }
  for (double l : lambdas) {
    WorkloadConfig w = workload;
    w.lambda = l;
    w.validate();
  }
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["topology"] = join(topologies);
  kv["topology_seed"] = std::to_string(topology_seed);
  kv["lambda"] = join(lambdas);
  kv["horizon"] = std::to_string(workload.horizon);
  kv["mean_length"] = fmt(workload.mean_length);
  kv["vol_fraction"] = fmt(workload.vol_fraction);
  kv["schedulers"] = join(schedulers);
  kv["subdivision"] = join(subdivisions);
  kv["seeds"] = join(seeds);
  kv["objective"] = to_string(baseline.objective);
  kv["fill_next_slot"] = baseline.fill_next_slot ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

std::vector<ExperimentConfig> parse_experiments(std::istream& in) {
  std::vector<std::pair<std::string, int>> defaults;  // "key=value" lines, line number
  std::vector<std::pair<std::string, std::vector<std::tuple<std::string, std::string, int>>>> sections;
  std::vector<std::tuple<std::string, std::string, int>> base;
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ParseError("malformed section header", lineno);
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    auto entry = std::make_tuple(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
    if (sections.empty()) {
      base.push_back(entry);
    } else {
      sections.back().second.push_back(entry);
    }
  }
  if (sections.empty()) sections.push_back({"default", {}});

  std::vector<ExperimentConfig> out;
  for (const auto& [name, entries] : sections) {
    ExperimentConfig cfg;
    cfg.name = name;
    auto apply = [&](const std::string& key, const std::string& value, int line) {
      try {
        if (key == "topology") {
          cfg.topologies = split(value, ',');
        } else if (key == "topology_seed") {
          cfg.topology_seed = std::stoull(value);
        } else if (key == "lambda") {
          cfg.lambdas.clear();
          for (const std::string& v : split(value, ',')) cfg.lambdas.push_back(std::stod(v));
        } else if (key == "horizon") {
          cfg.workload.horizon = std::stoll(value);
        } else if (key == "mean_length") {
          cfg.workload.mean_length = std::stod(value);
        } else if (key == "vol_fraction") {
          cfg.workload.vol_fraction = std::stod(value);
        } else if (key == "schedulers") {
          cfg.schedulers = split(value, ',');
        } else if (key == "subdivision") {
          cfg.subdivisions.clear();
          for (const std::string& v : split(value, ',')) cfg.subdivisions.push_back(std::stoi(v));
        } else if (key == "seeds") {
          cfg.seeds.clear();
          for (const std::string& v : split(value, ',')) cfg.seeds.push_back(std::stoull(v));
        } else if (key == "output") {
          cfg.output_dir = value;
        } else if (key == "objective") {
          cfg.baseline.objective = parse_objective(value);
        } else if (key == "fill_next_slot" || key == "check") {
          if (value != "true" && value != "false") throw std::invalid_argument("expected true or false");
          (key == "check" ? cfg.check_invariants : cfg.baseline.fill_next_slot) = value == "true";
        } else {
          throw ParseError("unknown key '" + key + "'", line);
        }
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception& e) {
        throw ParseError("bad value for '" + key + "': " + e.what(), line);
      }
    };
    for (const auto& [k, v, line] : base) apply(k, v, line);
    for (const auto& [k, v, line] : entries) apply(k, v, line);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), 0);
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

Topology build_topology(const std::string& source, std::uint64_t seed) {
  if (source == "gscale") return gscale_topology();
  if (source.rfind("synthetic:", 0) == 0) return generate_synthetic(std::stoi(source.substr(10)), seed);
  return load_topology(source);
}

std::string version_string() {
#ifdef DCROUTE_VERSION
  return DCROUTE_VERSION;
#else
  return "unknown";
#endif
}

namespace {

constexpr const char* kRecordHeader =
    "config_hash,trace_hash,seed,scheduler,topology,lambda,subdivision,requests,admitted,"
    "offered_volume,rejected_volume,rejected_fraction,delivered_volume,time_total,time_mean,"
    "time_p99,time_admitted_mean,time_boundary,pulled_total,pulled_max,pushed_total,pushed_max,"
    "push_passes_max,violations,pivots,slots,version";

}  // namespace

void write_records_header(std::ostream& out) { out << kRecordHeader << '\n'; }

void write_record(std::ostream& out, const RunRecord& r) {
  const SimMetrics& m = r.metrics;
  out << hex(r.config_hash) << ',' << hex(r.trace_hash) << ',' << r.seed << ',' << r.scheduler << ','
      << r.topology << ',' << fmt(r.lambda) << ',' << r.subdivision << ',' << m.requests << ','
      << m.admitted << ',' << fmt(m.offered_volume) << ',' << fmt(m.rejected_volume) << ','
      << fmt(m.rejected_fraction) << ',' << fmt(m.delivered_volume) << ',' << fmt(m.time_total) << ','
      << fmt(m.time_mean) << ',' << fmt(m.time_p99) << ',' << fmt(m.time_admitted_mean) << ','
      << fmt(m.time_boundary) << ',' << fmt(m.pulled_total) << ',' << fmt(m.pulled_max) << ','
      << fmt(m.pushed_total) << ',' << fmt(m.pushed_max) << ',' << m.push_passes_max << ','
      << m.violations << ',' << m.pivots << ',' << m.slots << ',' << r.version << '\n';
}

std::vector<RunRecord> read_records(std::istream& in) {
  std::vector<RunRecord> out;
  int lineno = 0;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kRecordHeader) throw ParseError("unexpected record header", lineno);
      header = true;
      continue;
    }
    const std::vector<std::string> c = split(line, ',');
    if (c.size() != 27) throw ParseError("expected 27 fields", lineno);
    RunRecord r;
    SimMetrics& m = r.metrics;
    try {
      r.config_hash = parse_hex(c[0]);
      r.trace_hash = parse_hex(c[1]);
      r.seed = std::stoull(c[2]);
      r.scheduler = c[3];
      r.topology = c[4];
      r.lambda = std::stod(c[5]);
      r.subdivision = std::stoi(c[6]);
      m.requests = std::stoull(c[7]);
      m.admitted = std::stoull(c[8]);
      m.offered_volume = std::stod(c[9]);
      m.rejected_volume = std::stod(c[10]);
      m.rejected_fraction = std::stod(c[11]);
      m.delivered_volume = std::stod(c[12]);
      m.time_total = std::stod(c[13]);
      m.time_mean = std::stod(c[14]);
      m.time_p99 = std::stod(c[15]);
      m.time_admitted_mean = std::stod(c[16]);
      m.time_boundary = std::stod(c[17]);
      m.pulled_total = std::stod(c[18]);
      m.pulled_max = std::stod(c[19]);
      m.pushed_total = std::stod(c[20]);
      m.pushed_max = std::stod(c[21]);
      m.push_passes_max = std::stoi(c[22]);
      m.violations = std::stoull(c[23]);
      m.pivots = std::stoll(c[24]);
      m.slots = std::stoll(c[25]);
      r.version = c[26];
    } catch (const std::exception&) {
      throw ParseError("malformed field", lineno);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ComparisonRow> compare_runs(std::span<const RunRecord> records) {
  using Cell = std::tuple<std::string, double, int>;
  std::map<std::tuple<std::string, double, int, std::uint64_t>, std::uint64_t> traces;
  for (const RunRecord& r : records) {
    auto key = std::make_tuple(r.topology, r.lambda, r.subdivision, r.seed);
    auto [it, fresh] = traces.emplace(key, r.trace_hash);
    if (!fresh && it->second != r.trace_hash) {
      throw std::invalid_argument("records of " + r.topology + " lambda " + fmt(r.lambda) + " seed " +
                                  std::to_string(r.seed) + " ran different traces");
    }
  }
  std::map<std::pair<Cell, std::string>, ComparisonRow> rows;
  for (const RunRecord& r : records) {
    ComparisonRow& row = rows[{Cell{r.topology, r.lambda, r.subdivision}, r.scheduler}];
    row.topology = r.topology;
    row.lambda = r.lambda;
    row.subdivision = r.subdivision;
    row.scheduler = r.scheduler;
    ++row.seeds;
    row.rejected_fraction += r.metrics.rejected_fraction;
    row.time_mean += r.metrics.time_mean;
    if (r.metrics.requests > 0) {
      row.pivots_per_request += static_cast<double>(r.metrics.pivots) / static_cast<double>(r.metrics.requests);
    }
  }
  std::vector<ComparisonRow> out;
  for (auto& [key, row] : rows) {
    const double n = static_cast<double>(row.seeds);
    row.rejected_fraction /= n;
    row.time_mean /= n;
    row.pivots_per_request /= n;
  }
  for (auto& [key, row] : rows) {
    auto base = rows.find({key.first, "dcroute"});
    if (base != rows.end() && base->second.time_mean > 0.0) row.time_ratio = row.time_mean / base->second.time_mean;
    out.push_back(row);
  }
  return out;
}

void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "topology,lambda,subdivision,scheduler,seeds,rejected_fraction,time_mean,time_ratio,"
         "pivots_per_request\n";
  for (const ComparisonRow& r : rows) {
    out << r.topology << ',' << fmt(r.lambda) << ',' << r.subdivision << ',' << r.scheduler << ','
        << r.seeds << ',' << fmt(r.rejected_fraction) << ',' << fmt(r.time_mean) << ','
        << fmt(r.time_ratio) << ',' << fmt(r.pivots_per_request) << '\n';
  }
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  std::vector<RunRecord> out;
  for (const std::string& source : cfg.topologies) {
    const Topology base = build_topology(source, cfg.topology_seed);
    for (double lambda : cfg.lambdas) {
      for (int f : cfg.subdivisions) {
        const Topology topo = f == 1 ? base : base.scaled(1.0 / f);
        for (std::uint64_t seed : cfg.seeds) {
          WorkloadConfig w = cfg.workload;
          w.lambda = lambda;
          w.seed = seed;
          const std::vector<TraceEntry> trace = subdivide_slots(generate_trace(w, base), f);
          const std::uint64_t th = trace_hash(trace);
          for (const std::string& tag : cfg.schedulers) {
            std::unique_ptr<Scheduler> s = make_scheduler(tag, topo, cfg.baseline);
            SimOptions opt;
            opt.check_invariants = cfg.check_invariants;
            RunRecord r;
            r.config_hash = cfg.hash();
            r.trace_hash = th;
            r.seed = seed;
            r.scheduler = s->tag();
            r.topology = source;
            r.lambda = lambda;
            r.subdivision = f;
            r.metrics = run_simulation(*s, trace, opt);
            r.version = version_string();
            if (log) {
              *log << cfg.name << ' ' << source << " lambda=" << lambda << " f=" << f << " seed=" << seed
                   << ' ' << r.scheduler << " rejected=" << r.metrics.rejected_fraction
                   << " time/request=" << r.metrics.time_mean << "s\n";
            }
            out.push_back(std::move(r));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace dcroute
