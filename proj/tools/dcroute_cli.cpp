#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dcroute/harness.hpp"

namespace fs = std::filesystem;
using namespace dcroute;

namespace {

void write_atomically(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_records_header(out);
  for (const RunRecord& r : records) write_record(out, r);
  return out.str();
}

void print_metrics(const RunRecord& r) {
  const SimMetrics& m = r.metrics;
  std::cout << r.scheduler << ": requests " << m.requests << ", admitted " << m.admitted
            << ", rejected fraction " << m.rejected_fraction << ", time/request " << m.time_mean
            << " s (p99 decision " << m.time_p99 << " s), pivots " << m.pivots << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-guaranteed inter-datacenter transfer scheduling"};
  app.require_subcommand(1);

  // gen-topology
  auto* gen_topo = app.add_subcommand("gen-topology", "Write a topology file");
  std::string topo_kind = "gscale";
  int topo_nodes = 12;
  std::uint64_t topo_seed = 1;
  std::string topo_out;
  gen_topo->add_option("--kind", topo_kind, "gscale or synthetic")->check(CLI::IsMember({"gscale", "synthetic"}));
  gen_topo->add_option("--nodes", topo_nodes, "Node count for synthetic");
  gen_topo->add_option("--seed", topo_seed, "Seed for synthetic");
  gen_topo->add_option("-o,--out", topo_out, "Output file (stdout when omitted)");

  // gen-trace
  auto* gen_trace = app.add_subcommand("gen-trace", "Generate a request trace");
  std::string topology = "gscale";
  WorkloadConfig workload;
  std::string trace_out;
  for (auto* sub : {gen_trace}) {
    sub->add_option("--topology", topology, "gscale, synthetic:N or a topology file");
    sub->add_option("--topology-seed", topo_seed, "Seed for synthetic topologies");
    sub->add_option("--lambda", workload.lambda, "Mean arrivals per slot");
    sub->add_option("--horizon", workload.horizon, "Slots with arrivals");
    sub->add_option("--mean-length", workload.mean_length, "Mean request length in slots");
    sub->add_option("--vol-fraction", workload.vol_fraction, "Mean volume over C x length");
    sub->add_option("--seed", workload.seed, "Random seed");
  }
  gen_trace->add_option("-o,--out", trace_out, "Output file (stdout when omitted)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run schedulers on one trace");
  std::string trace_in;
  std::vector<std::string> schedulers{"dcroute"};
  int subdivision = 1;
  bool fast = false;
  std::string objective = "minimax";
  bool no_fill = false;
  std::string schedule_out;
  std::string metrics_out;
  std::string dump_out = "violation_dump.txt";
  simulate->add_option("--topology", topology, "gscale, synthetic:N or a topology file");
  simulate->add_option("--topology-seed", topo_seed, "Seed for synthetic topologies");
  simulate->add_option("--trace", trace_in, "Trace CSV (generated from the workload options when omitted)");
  simulate->add_option("--lambda", workload.lambda, "Mean arrivals per slot");
  simulate->add_option("--horizon", workload.horizon, "Slots with arrivals");
  simulate->add_option("--mean-length", workload.mean_length, "Mean request length in slots");
  simulate->add_option("--vol-fraction", workload.vol_fraction, "Mean volume over C x length");
  simulate->add_option("--seed", workload.seed, "Random seed");
  simulate->add_option("-s,--scheduler", schedulers, "dcroute, global-lp, ksp-lp:K, pip-pmc, pip-spmc");
  simulate->add_option("--subdivision", subdivision, "Split every slot into f slots")->check(CLI::Range(1, 1000));
  simulate->add_flag("--fast", fast, "Skip per-boundary invariant sweeps");
  simulate->add_option("--objective", objective, "LP objective: minimax or feasibility");
  simulate->add_flag("--no-fill", no_fill, "LP baselines: skip the next-slot fill pass");
  simulate->add_option("--schedule-out", schedule_out, "Per-slot schedule CSV (single scheduler)");
  simulate->add_option("--metrics-out", metrics_out, "Run records CSV");
  simulate->add_option("--dump-out", dump_out, "Where to write the grid dump on a violation");

  // compare
  auto* compare = app.add_subcommand("compare", "Normalize run records to DCRoute");
  std::vector<std::string> record_files;
  std::string compare_out;
  compare->add_option("records", record_files, "Run record CSV files")->required();
  compare->add_option("-o,--out", compare_out, "Output file (stdout when omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run every experiment of a config file");
  std::string config_file;
  std::string sweep_out;
  bool sweep_fast = false;
  sweep->add_option("-c,--config", config_file, "Experiment config file")->required();
  sweep->add_option("-o,--out", sweep_out, "Override the output directory");
  sweep->add_flag("--fast", sweep_fast, "Skip per-boundary invariant sweeps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_topo) {
      const Topology topo = topo_kind == "gscale" ? gscale_topology() : generate_synthetic(topo_nodes, topo_seed);
      std::ostringstream text;
      write_topology(text, topo,
                     topo_kind == "gscale" ? "GScale-like WAN"
                                           : "synthetic n=" + std::to_string(topo_nodes) +
                                                 " seed=" + std::to_string(topo_seed));
      if (topo_out.empty()) {
        std::cout << text.str();
      } else {
        write_atomically(topo_out, text.str());
      }
      return 0;
    }
    if (*gen_trace) {
      const Topology topo = build_topology(topology, topo_seed);
      TraceStats stats;
      const auto trace = generate_trace(workload, topo, &stats);
      std::ostringstream text;
      save_trace(text, trace,
                 "lambda=" + std::to_string(workload.lambda) + " horizon=" + std::to_string(workload.horizon) +
                     " seed=" + std::to_string(workload.seed) + " clamped=" + std::to_string(stats.clamped));
      if (trace_out.empty()) {
        std::cout << text.str();
      } else {
        write_atomically(trace_out, text.str());
      }
      std::cerr << stats.requests << " requests, " << stats.clamped << " volumes clamped\n";
      return 0;
    }
    if (*simulate) {
      const Topology base = build_topology(topology, topo_seed);
      const Topology topo = subdivision == 1 ? base : base.scaled(1.0 / subdivision);
      std::vector<TraceEntry> trace = trace_in.empty() ? generate_trace(workload, base) : load_trace(trace_in);
      for (const TraceEntry& e : trace) {
        if (e.src >= base.node_count() || e.dst >= base.node_count()) {
          throw std::invalid_argument("trace names a node outside the topology");
        }
      }
      trace = subdivide_slots(trace, subdivision);
      BaselineOptions options;
      options.objective = parse_objective(objective);
      options.fill_next_slot = !no_fill;
      std::vector<RunRecord> records;
      for (const std::string& tag : schedulers) {
        std::unique_ptr<Scheduler> s = make_scheduler(tag, topo, options);
        SimOptions sim;
        sim.check_invariants = !fast;
        std::ofstream schedule;
        if (!schedule_out.empty()) {
          schedule.open(schedulers.size() > 1 ? schedule_out + "." + tag : schedule_out);
          sim.schedule_out = &schedule;
        }
        RunRecord r;
        r.trace_hash = trace_hash(trace);
        r.seed = workload.seed;
        r.scheduler = s->tag();
        r.topology = topology;
        r.lambda = workload.lambda;
        r.subdivision = subdivision;
        r.version = version_string();
        try {
          r.metrics = run_simulation(*s, trace, sim);
        } catch (const SimulationAborted& e) {
          write_atomically(dump_out, e.dump());
          std::cerr << "invariant violation (" << tag << "): " << e.what() << "\ngrid dump written to "
                    << dump_out << "\n";
          return 2;
        }
        print_metrics(r);
        records.push_back(std::move(r));
      }
      if (!metrics_out.empty()) write_atomically(metrics_out, records_csv(records));
      return 0;
    }
    if (*compare) {
      std::vector<RunRecord> records;
      for (const std::string& f : record_files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot read " + f);
        for (RunRecord& r : read_records(in)) records.push_back(std::move(r));
      }
      std::ostringstream text;
      write_comparison(text, compare_runs(records));
      if (compare_out.empty()) {
        std::cout << text.str();
      } else {
        write_atomically(compare_out, text.str());
      }
      return 0;
    }
    if (*sweep) {
      std::ifstream in(config_file);
      if (!in) throw std::runtime_error("cannot read " + config_file);
      for (ExperimentConfig cfg : parse_experiments(in)) {
        if (!sweep_out.empty()) cfg.output_dir = sweep_out;
        if (sweep_fast) cfg.check_invariants = false;
        const fs::path dir = fs::path(cfg.output_dir) / cfg.name;
        std::vector<RunRecord> records;
        try {
          records = run_experiment(cfg, &std::cerr);
        } catch (const SimulationAborted& e) {
          write_atomically(dir / "violation_dump.txt", e.dump());
          std::cerr << "invariant violation: " << e.what() << "\n";
          return 2;
        }
        write_atomically(dir / "runs.csv", records_csv(records));
        std::ostringstream table;
        write_comparison(table, compare_runs(records));
        write_atomically(dir / "comparison.csv", table.str());
        std::cerr << "wrote " << (dir / "comparison.csv").string() << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
