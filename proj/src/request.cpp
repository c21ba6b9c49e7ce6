#include "dcroute/request.hpp"

#include <cstdio>
#include <ostream>

namespace dcroute {

std::string to_string(RequestState state) {
  switch (state) {
    case RequestState::kPending: return "pending";
    case RequestState::kAdmitted: return "admitted";
    case RequestState::kRejected: return "rejected";
    case RequestState::kCompleted: return "completed";
  }
  return "unknown";
}

void write_schedule_header(std::ostream& out) { out << "slot,request_id,rate,path\n"; }

void write_schedule(std::ostream& out, const SlotSchedule& schedule) {
  char rate[64];
  for (const ScheduleRow& row : schedule.rows) {
    std::snprintf(rate, sizeof rate, "%.9f", row.rate);
    out << schedule.slot << ',' << row.request << ',' << rate << ',';
    for (std::size_t i = 0; i < row.path.size(); ++i) {
      if (i) out << '-';
      out << row.path[i];
    }
    out << '\n';
  }
}

}  // namespace dcroute
