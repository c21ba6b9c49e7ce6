#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcroute/common.hpp"

namespace dcroute {

struct Share {
  FlowId flow;
  double volume;
};

// Volume each flow sends in one finalized slot.
struct Shipment {
  Slot slot = 0;
  std::vector<Share> flows;  // ascending flow id
};

// The active window (t_now, t_end] of per-channel, per-slot allocations.
//
// For every channel the grid keeps the per-slot load, the flows sharing that
// load, and the prefix sums S(t, c) = sum of loads over t_now+1..t. Slots are
// addressed by absolute slot number. Storage is contiguous per channel with a
// moving head, so advancing the clock costs O(channels) amortized.
//
// Invariants (checked by check_invariants):
//   load(c,t) == sum of shares on (c,t)             within kEps
//   S(t,c) - S(t-1,c) == load(c,t), S(t_now,c) == 0 within kEps
//   0 <= load(c,t) <= capacity(c) + kEps
class AllocationGrid {
 public:
  AllocationGrid() = default;
  explicit AllocationGrid(std::vector<double> channel_capacity, Slot now = 0);

  Slot now() const { return now_; }
  Slot end() const { return end_; }
  int channel_count() const { return static_cast<int>(capacity_.size()); }
  double capacity(ChannelId c) const { return capacity_[idx(c)]; }
  bool in_window(Slot t) const { return t > now_ && t <= end_; }
  Slot window_size() const { return end_ - now_; }
  // Slack allowed above capacity by add/move checks and check_invariants
  // (default kEps). Solver-produced schedules use a looser value.
  void set_capacity_tolerance(double tol) { tolerance_ = tol; }
  double capacity_tolerance() const { return tolerance_; }

  // S(t, c). Defined for t >= t_now; slots past t_end repeat S(t_end, c).
  double prefix(ChannelId c, Slot t) const;
  double load(ChannelId c, Slot t) const;
  // capacity - load, clamped at zero. Slots past t_end are empty.
  double free(ChannelId c, Slot t) const;
  // Loads of slots t_now+1..t_end.
  std::span<const double> loads(ChannelId c) const;
  std::span<const Share> shares(ChannelId c, Slot t) const;
  double share(ChannelId c, Slot t, FlowId flow) const;

  // min over the path of free(c, t).
  double path_free(std::span<const ChannelId> path, Slot t) const;
  // path_free for every slot t_now+1..t_end; out[i] belongs to t_now+1+i.
  void path_free_profile(std::span<const ChannelId> path, std::vector<double>& out) const;

  // t_end = max(t_end, deadline); appended slots are empty and carry the
  // previous prefix sum forward.
  void extend_window(Slot deadline);
  // Drops trailing slots after new_end. They must hold no load.
  void shrink_window(Slot new_end);

  // Adds v of `flow` at (c, t). Throws std::logic_error on a capacity
  // violation or a slot outside the window.
  void add_share(ChannelId c, Slot t, FlowId flow, double v);
  // add_share on every channel of the path, all-or-nothing.
  void add_path_share(std::span<const ChannelId> path, Slot t, FlowId flow, double v);
  // Moves v of `flow` from slot `from` to slot `to` on every channel of the
  // path. Preconditions are checked on all channels before any mutation;
  // violations throw std::logic_error and leave the grid unchanged. A
  // leftover below kEps at `from` moves along instead of staying as dust.
  // Returns the volume actually moved.
  double move_share(std::span<const ChannelId> path, Slot from, Slot to, FlowId flow, double v);
  // Removes every share of `flow` along the path in the window.
  void remove_flow(std::span<const ChannelId> path, FlowId flow);

  // Finalizes slot t_now+1: returns its per-flow volumes, drops it from the
  // window, rebases the prefix sums and advances t_now. Keeps
  // t_end >= t_now + 1.
  Shipment advance();

  // Throws InvariantViolation with a description of the first broken
  // invariant.
  void check_invariants() const;

  // "channel slot flow volume" lines, sorted by (channel, slot, flow),
  // volumes with 9 decimals.
  std::string dump() const;

 private:
  struct Channel {
    std::vector<double> load;
    std::vector<double> prefix;  // raw; S(t) = prefix[p] - base
    std::vector<std::vector<Share>> shares;
    double base = 0.0;
  };

  static std::size_t idx(ChannelId c) { return static_cast<std::size_t>(c); }
  std::size_t pos(Slot t) const { return head_ + static_cast<std::size_t>(t - now_ - 1); }
  void require_window(Slot t, const char* what) const;
  void require_channel(ChannelId c) const;
  void shift_prefix(Channel& ch, Slot first, Slot last, double delta);
  void credit(Channel& ch, Slot t, FlowId flow, double v);
  void debit(Channel& ch, Slot t, FlowId flow, double v);
  void compact();

  std::vector<double> capacity_;
  std::vector<Channel> channels_;
  Slot now_ = 0;
  Slot end_ = 1;
  std::size_t head_ = 0;
  double tolerance_ = kEps;
};

}  // namespace dcroute
