#pragma once

#include <cstdint>
#include <string>

#include "dcroute/request.hpp"

namespace dcroute {

// Work done at one slot boundary before the next slot is finalized.
struct BoundaryStats {
  double pulled = 0.0;
  double pushed = 0.0;
  int push_passes = 0;
};

// Common driver interface for DCRoute and the LP baselines. The harness
// calls, per slot: admit() for each arrival, boundary(), then walk().
class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual std::string tag() const = 0;
  virtual Slot now() const = 0;
  virtual Slot end() const = 0;
  virtual std::size_t active_count() const = 0;

  // Admission decision for a request arriving in slot now(). Updates the
  // request's state; a rejection leaves the schedule untouched.
  virtual bool admit(Request& request) = 0;
  virtual BoundaryStats boundary() = 0;
  // Finalizes slot now()+1 and advances the clock. Throws
  // InvariantViolation when an admitted request misses its deadline.
  virtual SlotSchedule walk() = 0;

  // Full invariant sweep, valid right after boundary(). Throws
  // InvariantViolation.
  virtual void check_invariants() const = 0;
  // Grid dump for post-mortems.
  virtual std::string dump() const = 0;
  // Simplex pivots spent so far (0 for schedulers without an LP).
  virtual std::int64_t solver_pivots() const { return 0; }
};

}  // namespace dcroute
