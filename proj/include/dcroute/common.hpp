#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcroute {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;
// Directed capacity channel: edge e carries channel 2e (low id -> high id)
// and 2e+1 (high id -> low id).
using ChannelId = std::int32_t;
using Slot = std::int64_t;
using RequestId = std::int64_t;
// Owner of a share in the allocation grid. DCRoute uses the request id;
// multipath baselines allocate one flow id per (request, path).
using FlowId = std::int64_t;

// Absolute tolerance for every capacity and consistency check.
inline constexpr double kEps = 1e-9;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised when a guarantee the scheduler promises (deadline, capacity,
// ALAP fixpoint) is observed broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dcroute
