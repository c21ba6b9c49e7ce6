#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dcroute/baselines.hpp"
#include "dcroute/dcroute.hpp"
#include "dcroute/scheduler.hpp"
#include "dcroute/workload.hpp"

namespace dcroute {

// DCRoute behind the common scheduler interface: boundary() runs
// pull_back then push_forward.
class DcRouteRunner : public Scheduler {
 public:
  explicit DcRouteRunner(const Topology& topo, Slot start = 0) : s_(topo, start) {}
  DcRouteRunner(Topology&&, Slot = 0) = delete;

  std::string tag() const override { return "dcroute"; }
  Slot now() const override { return s_.now(); }
  Slot end() const override { return s_.end(); }
  std::size_t active_count() const override { return s_.active().size(); }
  bool admit(Request& request) override { return s_.allocate(request); }
  BoundaryStats boundary() override;
  SlotSchedule walk() override { return s_.walk(); }
  void check_invariants() const override { s_.check_invariants(true); }
  std::string dump() const override { return s_.grid().dump(); }

  const DcRouteScheduler& scheduler() const { return s_; }

 private:
  DcRouteScheduler s_;
};

// "dcroute" or a baseline tag (see BaselineKind::parse).
std::unique_ptr<Scheduler> make_scheduler(const std::string& tag, const Topology& topo,
                                          const BaselineOptions& options = {});
std::unique_ptr<Scheduler> make_scheduler(const std::string&, Topology&&, const BaselineOptions& = {}) = delete;

struct SimMetrics {
  std::size_t requests = 0;
  std::size_t admitted = 0;
  double offered_volume = 0.0;
  double rejected_volume = 0.0;
  double rejected_fraction = 0.0;
  double delivered_volume = 0.0;
  // Seconds. total = admission decisions + boundary work; mean = total
  // per request. p99 and admitted_mean cover admission decisions only.
  double time_total = 0.0;
  double time_mean = 0.0;
  double time_p99 = 0.0;
  double time_admitted_mean = 0.0;
  double time_boundary = 0.0;
  // Volume moved at slot boundaries.
  double pulled_total = 0.0;
  double pulled_max = 0.0;
  double pushed_total = 0.0;
  double pushed_max = 0.0;
  int push_passes_max = 0;
  std::size_t violations = 0;
  std::int64_t pivots = 0;
  Slot slots = 0;

  // Volume fields as a fixed-format string (timings excluded).
  std::string volume_signature() const;
};

struct SimOptions {
  bool check_invariants = true;
  // Optional per-slot schedule CSV.
  std::ostream* schedule_out = nullptr;
};

// Raised when a run breaks an invariant; carries the grid dump.
class SimulationAborted : public InvariantViolation {
 public:
  SimulationAborted(const std::string& what, Slot slot, std::string dump)
      : InvariantViolation("slot " + std::to_string(slot) + ": " + what),
        slot_(slot),
        dump_(std::move(dump)) {}
  Slot slot() const { return slot_; }
  const std::string& dump() const { return dump_; }

 private:
  Slot slot_;
  std::string dump_;
};

// Drives the scheduler slot by slot: admissions for arrivals in slot t (each
// timed), the boundary pass, then walk() to finalize t+1. After the last
// arrival the clock runs on until every admitted request finished. Throws
// SimulationAborted on an invariant violation.
SimMetrics run_simulation(Scheduler& scheduler, std::span<const TraceEntry> trace,
                          const SimOptions& options = {});

// Slot indices times f; pair with Topology::scaled(1.0 / f) so every
// request can still move the same volume by its deadline.
std::vector<TraceEntry> subdivide_slots(std::span<const TraceEntry> trace, int f);

struct ExperimentConfig {
  std::string name = "default";
  // "gscale", "synthetic:N" or a topology file path.
  std::vector<std::string> topologies{"gscale"};
  std::uint64_t topology_seed = 1;
  std::vector<double> lambdas{6.0};
  WorkloadConfig workload;  // lambda and seed are overridden per cell
  std::vector<std::string> schedulers{"dcroute"};
  std::vector<int> subdivisions{1};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string output_dir = "results";
  BaselineOptions baseline;
  bool check_invariants = true;

  // Throws std::invalid_argument.
  void validate() const;
  // Sorted "key = value" lines of every field; the hash input.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Line-oriented "key = value" file with [section] headers. Keys before the
// first section are defaults for every section; each section is one
// experiment. Keys: topology, topology_seed, lambda, horizon, mean_length,
// vol_fraction, schedulers, subdivision, seeds, output, objective,
// fill_next_slot, check. List values are comma separated. Throws
// ParseError.
std::vector<ExperimentConfig> parse_experiments(std::istream& in);

Topology build_topology(const std::string& source, std::uint64_t seed);

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t trace_hash = 0;
  std::uint64_t seed = 0;
  std::string scheduler;
  std::string topology;
  double lambda = 0.0;
  int subdivision = 1;
  SimMetrics metrics;
  std::string version;
};

std::string version_string();

void write_records_header(std::ostream& out);
void write_record(std::ostream& out, const RunRecord& record);
// Throws ParseError.
std::vector<RunRecord> read_records(std::istream& in);

struct ComparisonRow {
  std::string topology;
  double lambda = 0.0;
  int subdivision = 1;
  std::string scheduler;
  std::size_t seeds = 0;
  double rejected_fraction = 0.0;  // mean over seeds
  double time_mean = 0.0;          // seconds per request, mean over seeds
  double time_ratio = 0.0;         // time_mean / dcroute's, 0 without a dcroute run
  double pivots_per_request = 0.0;
};

// Averages seeds per (topology, lambda, subdivision, scheduler) and
// normalizes time to DCRoute in the same cell. Every scheduler of one
// (topology, lambda, subdivision, seed) must have run the same trace;
// throws std::invalid_argument otherwise.
std::vector<ComparisonRow> compare_runs(std::span<const RunRecord> records);
void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows);

// Runs every cell of the experiment (topology x lambda x subdivision x seed
// x scheduler). Progress goes to `log` when given.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace dcroute
