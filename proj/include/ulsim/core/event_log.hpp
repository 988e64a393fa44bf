#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ulsim/core/sim_time.hpp"

namespace ulsim {

struct Event {
  std::int64_t time_ms = 0;
  std::string entity;
  std::string event;
  std::optional<std::uint16_t> rnti;
  std::optional<double> value_db;
  std::string extra;
};

/// Append-only per-run log; serialised as the event CSV.
class EventLog {
 public:
  static constexpr std::string_view kCsvHeader = "time_ms,entity,event,rnti,value_db,extra";

  void record(SimTime at, std::string entity, std::string event, std::optional<std::uint16_t> rnti = {},
              std::optional<double> value_db = {}, std::string extra = {});

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  std::vector<Event> filter(std::string_view entity, std::string_view event) const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<Event> events_;
};

/// Fixed three-decimal rendering used by every CSV writer; NaN prints empty.
std::string format_fixed(double v, int decimals = 3);

}  // namespace ulsim
