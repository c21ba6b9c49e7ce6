#include "dcroute/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

#include "dcroute/kernels.hpp"

namespace dcroute {

namespace {

std::string describe(ChannelId c, Slot t) {
  return "channel " + std::to_string(c) + " slot " + std::to_string(t);
}

}  // namespace

AllocationGrid::AllocationGrid(std::vector<double> channel_capacity, Slot now)
    : capacity_(std::move(channel_capacity)), now_(now), end_(now + 1) {
  for (double cap : capacity_) {
    if (!(cap > 0.0)) throw std::invalid_argument("channel capacity must be positive");
  }
  channels_.resize(capacity_.size());
  for (Channel& ch : channels_) {
    ch.load.assign(1, 0.0);
    ch.prefix.assign(1, 0.0);
    ch.shares.resize(1);
  }
}

void AllocationGrid::require_window(Slot t, const char* what) const {
  if (!in_window(t)) {
    throw std::logic_error(std::string(what) + ": slot " + std::to_string(t) +
                           " outside window (" + std::to_string(now_) + ", " +
                           std::to_string(end_) + "]");
  }
}

void AllocationGrid::require_channel(ChannelId c) const {
  if (c < 0 || c >= channel_count()) {
    throw std::logic_error("channel " + std::to_string(c) + " out of range");
  }
}

double AllocationGrid::prefix(ChannelId c, Slot t) const {
  if (t <= now_) return 0.0;
  const Channel& ch = channels_[idx(c)];
  return ch.prefix[pos(std::min(t, end_))] - ch.base;
}

double AllocationGrid::load(ChannelId c, Slot t) const {
  if (!in_window(t)) return 0.0;
  return channels_[idx(c)].load[pos(t)];
}

double AllocationGrid::free(ChannelId c, Slot t) const {
  return std::max(0.0, capacity_[idx(c)] - load(c, t));
}

std::span<const double> AllocationGrid::loads(ChannelId c) const {
  const Channel& ch = channels_[idx(c)];
  return std::span<const double>(ch.load).subspan(head_);
}

std::span<const Share> AllocationGrid::shares(ChannelId c, Slot t) const {
  if (!in_window(t)) return {};
  return channels_[idx(c)].shares[pos(t)];
}

double AllocationGrid::share(ChannelId c, Slot t, FlowId flow) const {
  for (const Share& s : shares(c, t)) {
    if (s.flow == flow) return s.volume;
  }
  return 0.0;
}

double AllocationGrid::path_free(std::span<const ChannelId> path, Slot t) const {
  double best = std::numeric_limits<double>::infinity();
  for (ChannelId c : path) best = std::min(best, free(c, t));
  return best;
}

void AllocationGrid::path_free_profile(std::span<const ChannelId> path,
                                       std::vector<double>& out) const {
  out.assign(static_cast<std::size_t>(window_size()), std::numeric_limits<double>::infinity());
  for (ChannelId c : path) kernels::min_residual(out, loads(c), capacity_[idx(c)]);
  for (double& v : out) v = std::max(0.0, v);
}

void AllocationGrid::extend_window(Slot deadline) {
  if (deadline <= end_) return;
  const auto extra = static_cast<std::size_t>(deadline - end_);
  for (Channel& ch : channels_) {
    const double last = ch.prefix.back();
    ch.load.resize(ch.load.size() + extra, 0.0);
    ch.prefix.resize(ch.prefix.size() + extra, last);
    ch.shares.resize(ch.shares.size() + extra);
  }
  end_ = deadline;
}

void AllocationGrid::shrink_window(Slot new_end) {
  new_end = std::max(new_end, now_ + 1);
  if (new_end >= end_) return;
  for (Slot t = new_end + 1; t <= end_; ++t) {
    for (ChannelId c = 0; c < channel_count(); ++c) {
      if (!shares(c, t).empty()) {
        throw std::logic_error("shrink_window: " + describe(c, t) + " still holds shares");
      }
    }
  }
  const auto drop = static_cast<std::size_t>(end_ - new_end);
  for (Channel& ch : channels_) {
    ch.load.resize(ch.load.size() - drop);
    ch.prefix.resize(ch.prefix.size() - drop);
    ch.shares.resize(ch.shares.size() - drop);
  }
  end_ = new_end;
}

void AllocationGrid::shift_prefix(Channel& ch, Slot first, Slot last, double delta) {
  if (first > last) return;
  const std::size_t a = pos(first);
  const std::size_t b = pos(last);
  kernels::add_constant(std::span<double>(ch.prefix).subspan(a, b - a + 1), delta);
}

void AllocationGrid::credit(Channel& ch, Slot t, FlowId flow, double v) {
  const std::size_t p = pos(t);
  ch.load[p] += v;
  auto& list = ch.shares[p];
  auto it = std::lower_bound(list.begin(), list.end(), flow,
                             [](const Share& s, FlowId f) { return s.flow < f; });
  if (it != list.end() && it->flow == flow) {
    it->volume += v;
  } else {
    list.insert(it, Share{flow, v});
  }
}

void AllocationGrid::debit(Channel& ch, Slot t, FlowId flow, double v) {
  const std::size_t p = pos(t);
  auto& list = ch.shares[p];
  auto it = std::lower_bound(list.begin(), list.end(), flow,
                             [](const Share& s, FlowId f) { return s.flow < f; });
  it->volume -= v;
  // Callers take the whole share when the leftover would be below kEps, so
  // an entry either empties exactly or keeps more than kEps.
  if (it->volume <= 0.0) list.erase(it);
  ch.load[p] -= v;
  if (list.empty()) ch.load[p] = 0.0;
}

void AllocationGrid::add_share(ChannelId c, Slot t, FlowId flow, double v) {
  require_channel(c);
  require_window(t, "add_share");
  if (!(v > 0.0)) throw std::logic_error("add_share: volume must be positive");
  Channel& ch = channels_[idx(c)];
  if (ch.load[pos(t)] + v > capacity_[idx(c)] + tolerance_) {
    throw std::logic_error("add_share: capacity violation on " + describe(c, t));
  }
  credit(ch, t, flow, v);
  shift_prefix(ch, t, end_, v);
}

void AllocationGrid::add_path_share(std::span<const ChannelId> path, Slot t, FlowId flow,
                                    double v) {
  require_window(t, "add_path_share");
  if (!(v > 0.0)) throw std::logic_error("add_path_share: volume must be positive");
  for (ChannelId c : path) {
    require_channel(c);
    if (load(c, t) + v > capacity_[idx(c)] + tolerance_) {
      throw std::logic_error("add_path_share: capacity violation on " + describe(c, t));
    }
  }
  for (ChannelId c : path) {
    Channel& ch = channels_[idx(c)];
    credit(ch, t, flow, v);
    shift_prefix(ch, t, end_, v);
  }
}

double AllocationGrid::move_share(std::span<const ChannelId> path, Slot from, Slot to,
                                  FlowId flow, double v) {
  require_window(from, "move_share");
  require_window(to, "move_share");
  if (from == to || path.empty()) return 0.0;
  if (!(v > 0.0)) throw std::logic_error("move_share: volume must be positive");
  double available = std::numeric_limits<double>::infinity();
  for (ChannelId c : path) {
    require_channel(c);
    const double have = share(c, from, flow);
    if (have + kEps < v) {
      throw std::logic_error("move_share: flow " + std::to_string(flow) + " holds only " +
                             std::to_string(have) + " on " + describe(c, from));
    }
    if (load(c, to) + v > capacity_[idx(c)] + tolerance_) {
      throw std::logic_error("move_share: capacity violation on " + describe(c, to));
    }
    available = std::min(available, have);
  }
  // Shares of one flow are identical along its path; sweep up sub-kEps dust.
  double moved = std::min(v, available);
  if (available - moved <= kEps) moved = available;

  for (ChannelId c : path) {
    Channel& ch = channels_[idx(c)];
    const double have = share(c, from, flow);
    const double take = std::abs(have - moved) <= kEps ? have : moved;
    debit(ch, from, flow, take);
    credit(ch, to, flow, take);
    if (to < from) {
      shift_prefix(ch, to, from - 1, take);
    } else {
      shift_prefix(ch, from, to - 1, -take);
    }
  }
  return moved;
}

void AllocationGrid::remove_flow(std::span<const ChannelId> path, FlowId flow) {
  for (ChannelId c : path) {
    require_channel(c);
    Channel& ch = channels_[idx(c)];
    for (Slot t = now_ + 1; t <= end_; ++t) {
      const double have = share(c, t, flow);
      if (have > 0.0) {
        debit(ch, t, flow, have);
        shift_prefix(ch, t, end_, -have);
      }
    }
  }
}

Shipment AllocationGrid::advance() {
  Shipment out;
  out.slot = now_ + 1;
  const std::size_t p = head_;
  for (Channel& ch : channels_) {
    for (const Share& s : ch.shares[p]) {
      auto it = std::lower_bound(out.flows.begin(), out.flows.end(), s.flow,
                                 [](const Share& a, FlowId f) { return a.flow < f; });
      if (it == out.flows.end() || it->flow != s.flow) out.flows.insert(it, s);
    }
    // S(t_now+1) becomes the new zero point: every remaining prefix sum
    // drops by the departed load.
    ch.base = ch.prefix[p];
    ch.shares[p].clear();
    ch.shares[p].shrink_to_fit();
  }
  ++head_;
  ++now_;
  if (end_ < now_ + 1) extend_window(now_ + 1);
  if (head_ >= 64 && head_ * 2 >= channels_.front().load.size()) compact();
  return out;
}

void AllocationGrid::compact() {
  const auto drop = static_cast<std::ptrdiff_t>(head_);
  for (Channel& ch : channels_) {
    ch.load.erase(ch.load.begin(), ch.load.begin() + drop);
    ch.prefix.erase(ch.prefix.begin(), ch.prefix.begin() + drop);
    ch.shares.erase(ch.shares.begin(), ch.shares.begin() + drop);
    kernels::add_constant(ch.prefix, -ch.base);
    ch.base = 0.0;
  }
  head_ = 0;
}

void AllocationGrid::check_invariants() const {
  for (ChannelId c = 0; c < channel_count(); ++c) {
    const Channel& ch = channels_[idx(c)];
    const std::span<const double> load_span = loads(c);
    const std::span<const double> prefix_span = std::span<const double>(ch.prefix).subspan(head_);
    const double mismatch = kernels::max_prefix_mismatch(prefix_span, load_span, ch.base);
    if (mismatch > kEps) {
      throw InvariantViolation("prefix sums disagree with loads on channel " + std::to_string(c) +
                               " by " + std::to_string(mismatch));
    }
    const double over = kernels::max_overload(load_span, capacity_[idx(c)]);
    if (over > tolerance_) {
      throw InvariantViolation("capacity exceeded on channel " + std::to_string(c) + " by " +
                               std::to_string(over));
    }
    for (Slot t = now_ + 1; t <= end_; ++t) {
      double sum = 0.0;
      for (const Share& s : shares(c, t)) {
        if (!(s.volume > 0.0)) {
          throw InvariantViolation("non-positive share on " + describe(c, t));
        }
        sum += s.volume;
      }
      const double l = load(c, t);
      if (l < -kEps || std::abs(sum - l) > kEps) {
        throw InvariantViolation("shares do not add up to load on " + describe(c, t));
      }
    }
  }
}

std::string AllocationGrid::dump() const {
  std::vector<std::tuple<ChannelId, Slot, FlowId, double>> rows;
  for (ChannelId c = 0; c < channel_count(); ++c) {
    for (Slot t = now_ + 1; t <= end_; ++t) {
      for (const Share& s : shares(c, t)) rows.emplace_back(c, t, s.flow, s.volume);
    }
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  char buf[128];
  for (const auto& [c, t, f, v] : rows) {
    std::snprintf(buf, sizeof buf, "%d %lld %lld %.9f\n", c, static_cast<long long>(t),
                  static_cast<long long>(f), v);
    out += buf;
  }
  return out;
}

}  // namespace dcroute
