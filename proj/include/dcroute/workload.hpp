#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dcroute/common.hpp"
#include "dcroute/request.hpp"
#include "dcroute/topology.hpp"

namespace dcroute {

struct TraceEntry {
  Slot arrival = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double vol = 0.0;
  Slot dl = 0;

  bool operator==(const TraceEntry&) const = default;
};

struct WorkloadConfig {
  double lambda = 6.0;          // mean arrivals per slot
  Slot horizon = 500;           // arrivals in slots 0..horizon-1
  double mean_length = 10.0;    // mean request length in slots
  double vol_fraction = 0.125;  // mean volume over the most one path can carry
  std::uint64_t seed = 1;

  // Throws std::invalid_argument.
  void validate() const;
};

struct TraceStats {
  std::size_t requests = 0;
  std::size_t clamped = 0;  // volumes cut down to C x L
};

// Per slot a Poisson(lambda) number of requests with uniform distinct
// endpoints, length L = max(1, ceil(Exp(mean_length))), dl = arrival + L and
// volume Exp(vol_fraction * C * L) clamped to C * L, where C is the
// smallest edge capacity. Volumes are rounded to 9 decimals so a saved
// trace reloads bit-identically. Arrivals, endpoints, lengths and volumes
// draw from separate streams of `seed`.
std::vector<TraceEntry> generate_trace(const WorkloadConfig& cfg, const Topology& topo,
                                       TraceStats* stats = nullptr);

// CSV with header "arrival,src,dst,vol,dl"; '#' lines are comments.
void save_trace(std::ostream& out, std::span<const TraceEntry> trace, const std::string& comment = {});
void save_trace(const std::filesystem::path& path, std::span<const TraceEntry> trace,
                const std::string& comment = {});
// Throws ParseError with the offending line.
std::vector<TraceEntry> load_trace(std::istream& in);
std::vector<TraceEntry> load_trace(const std::filesystem::path& path);

// FNV-1a over the CSV serialization.
std::uint64_t trace_hash(std::span<const TraceEntry> trace);

// Requests with ids 0..n-1 in trace order.
std::vector<Request> to_requests(std::span<const TraceEntry> trace);

}  // namespace dcroute
