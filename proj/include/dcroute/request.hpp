#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dcroute/common.hpp"
#include "dcroute/paths.hpp"

namespace dcroute {

enum class RequestState { kPending, kAdmitted, kRejected, kCompleted };

std::string to_string(RequestState state);

struct Request {
  RequestId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double volume = 0.0;
  Slot deadline = 0;
  Slot arrival = 0;
  RequestState state = RequestState::kPending;
  double residual = 0.0;
  Path path;  // set on admission by single-path schedulers
};

struct ScheduleRow {
  RequestId request;
  double rate;  // capacity units in this slot
  std::vector<NodeId> path;
};

// What the network sends during one finalized slot.
struct SlotSchedule {
  Slot slot = 0;
  std::vector<ScheduleRow> rows;
};

// CSV rows "slot,request_id,rate,path" with 9-decimal rates and
// hyphen-joined node ids. The header is written by write_schedule_header.
void write_schedule_header(std::ostream& out);
void write_schedule(std::ostream& out, const SlotSchedule& schedule);

}  // namespace dcroute
