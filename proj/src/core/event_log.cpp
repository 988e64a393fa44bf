#include "ulsim/core/event_log.hpp"

#include <cmath>
#include <cstdio>

namespace ulsim {

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) {
    return std::isnan(v) ? std::string{} : (v > 0 ? "inf" : "-inf");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  // Avoid "-0.000" so logs compare byte-identical regardless of sign of zero.
  std::string s(buf);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

void EventLog::record(SimTime at, std::string entity, std::string event, std::optional<std::uint16_t> rnti,
                      std::optional<double> value_db, std::string extra) {
  events_.push_back(Event{at.ms(), std::move(entity), std::move(event), rnti, value_db, std::move(extra)});
}

std::vector<Event> EventLog::filter(std::string_view entity, std::string_view event) const {
  std::vector<Event> out;
  for (const auto& e : events_) {
    if ((entity.empty() || e.entity == entity) && (event.empty() || e.event == event)) {
      out.push_back(e);
    }
  }
  return out;
}

void EventLog::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  for (const auto& e : events_) {
    out << e.time_ms << ',' << e.entity << ',' << e.event << ',';
    if (e.rnti) {
      out << *e.rnti;
    }
    out << ',';
    if (e.value_db) {
      out << format_fixed(*e.value_db);
    }
    out << ',' << e.extra << '\n';
  }
}

}  // namespace ulsim
