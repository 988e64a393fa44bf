#pragma once

#include <optional>
#include <string>

#include "ulsim/channel/channel_model.hpp"
#include "ulsim/channel/transmission.hpp"

namespace ulsim::channel {

/// Amplify-and-forward repeater: anything its service-side antenna hears
/// above sensitivity is re-emitted from the donor (external) antenna at a
/// fixed output power, in the same subframe.
struct RepeaterModel {
  std::string id = "repeater";
  Position internal_antenna;
  Position external_antenna;
  double sensitivity_dbm = -90.0;
  double output_power_dbm = 10.0;

  void validate() const;
};

std::optional<Transmission> repeater_relay(const RepeaterModel& rep, const Transmission& inbound,
                                           const ChannelModel& model, Rng* rng = nullptr);

}  // namespace ulsim::channel
