#include "dcroute/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace dcroute {

namespace {

constexpr const char* kHeader = "arrival,src,dst,vol,dl";

enum Stream : std::uint64_t { kArrivals = 1, kEndpoints = 2, kLengths = 3, kVolumes = 4 };

std::mt19937_64 stream(std::uint64_t seed, Stream which) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(which)};
  return std::mt19937_64(seq);
}

std::string format_volume(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

std::string format_row(const TraceEntry& e) {
  return std::to_string(e.arrival) + "," + std::to_string(e.src) + "," + std::to_string(e.dst) + "," +
         format_volume(e.vol) + "," + std::to_string(e.dl);
}

}  // namespace

void WorkloadConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(mean_length >= 1.0) || !std::isfinite(mean_length)) {
    throw std::invalid_argument("mean_length must be at least 1");
  }
  if (!(vol_fraction > 0.0 && vol_fraction <= 1.0)) {
    throw std::invalid_argument("vol_fraction must be in (0, 1]");
  }
}

std::vector<TraceEntry> generate_trace(const WorkloadConfig& cfg, const Topology& topo,
                                       TraceStats* stats) {
  cfg.validate();
  if (topo.node_count() < 2 || topo.edge_count() == 0) {
    throw std::invalid_argument("generate_trace: topology needs two nodes and an edge");
  }
  double capacity = topo.edge(0).capacity;
  for (const Edge& e : topo.edges()) capacity = std::min(capacity, e.capacity);

  std::mt19937_64 arrivals = stream(cfg.seed, kArrivals);
  std::mt19937_64 endpoints = stream(cfg.seed, kEndpoints);
  std::mt19937_64 lengths = stream(cfg.seed, kLengths);
  std::mt19937_64 volumes = stream(cfg.seed, kVolumes);
  std::poisson_distribution<int> count(cfg.lambda);
  std::uniform_int_distribution<NodeId> pick_src(0, topo.node_count() - 1);
  std::uniform_int_distribution<NodeId> pick_dst(0, topo.node_count() - 2);
  std::exponential_distribution<double> length(1.0 / cfg.mean_length);
  std::exponential_distribution<double> unit(1.0);

  TraceStats local;
  std::vector<TraceEntry> trace;
  for (Slot t = 0; t < cfg.horizon; ++t) {
    const int n = count(arrivals);
    for (int i = 0; i < n; ++i) {
      TraceEntry e;
      e.arrival = t;
      e.src = pick_src(endpoints);
      e.dst = pick_dst(endpoints);
      if (e.dst >= e.src) ++e.dst;
      const Slot len = std::max<Slot>(1, static_cast<Slot>(std::ceil(length(lengths))));
      e.dl = t + len;
      const double most = capacity * static_cast<double>(len);
      double v = unit(volumes) * cfg.vol_fraction * most;
      if (v > most) {
        v = most;
        ++local.clamped;
      }
      e.vol = std::max(1e-9, std::strtod(format_volume(v).c_str(), nullptr));
      trace.push_back(e);
    }
  }
  local.requests = trace.size();
  if (stats) *stats = local;
  return trace;
}

void save_trace(std::ostream& out, std::span<const TraceEntry> trace, const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  }
  out << kHeader << '\n';
  for (const TraceEntry& e : trace) out << format_row(e) << '\n';
}

void save_trace(const std::filesystem::path& path, std::span<const TraceEntry> trace,
                const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_trace(out, trace, comment);
}

std::vector<TraceEntry> load_trace(std::istream& in) {
  std::vector<TraceEntry> trace;
  bool header = false;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      if (line != kHeader) throw ParseError(std::string("expected header '") + kHeader + "'", lineno);
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) throw ParseError("expected 5 fields", lineno);
    TraceEntry e;
    try {
      std::size_t used = 0;
      auto integer = [&](const std::string& s) {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      e.arrival = integer(cells[0]);
      e.src = static_cast<NodeId>(integer(cells[1]));
      e.dst = static_cast<NodeId>(integer(cells[2]));
      e.vol = std::stod(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument(cells[3]);
      e.dl = integer(cells[4]);
    } catch (const std::exception&) {
      throw ParseError("malformed number", lineno);
    }
    if (e.src < 0 || e.dst < 0) throw ParseError("negative node id", lineno);
    if (e.src == e.dst) throw ParseError("source equals destination", lineno);
    if (!(e.vol > 0.0) || !std::isfinite(e.vol)) throw ParseError("volume must be positive", lineno);
    if (e.dl <= e.arrival) throw ParseError("deadline must follow arrival", lineno);
    if (!trace.empty() && e.arrival < trace.back().arrival) {
      throw ParseError("rows must be sorted by arrival", lineno);
    }
    trace.push_back(e);
  }
  if (!header) throw ParseError("missing header", 0);
  return trace;
}

std::vector<TraceEntry> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return load_trace(in);
}

std::uint64_t trace_hash(std::span<const TraceEntry> trace) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  feed(std::string(kHeader) + "\n");
  for (const TraceEntry& e : trace) feed(format_row(e) + "\n");
  return h;
}

std::vector<Request> to_requests(std::span<const TraceEntry> trace) {
  std::vector<Request> out;
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    Request r;
    r.id = static_cast<RequestId>(i);
    r.src = trace[i].src;
    r.dst = trace[i].dst;
    r.volume = trace[i].vol;
    r.deadline = trace[i].dl;
    r.arrival = trace[i].arrival;
    r.residual = r.volume;
    out.push_back(r);
  }
  return out;
}

}  // namespace dcroute
