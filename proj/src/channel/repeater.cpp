#include "ulsim/channel/repeater.hpp"

#include "ulsim/core/errors.hpp"

namespace ulsim::channel {

void RepeaterModel::validate() const {
  if (!is_finite(internal_antenna) || !is_finite(external_antenna)) {
    throw ConfigError("repeater positions must be finite");
  }
}

std::optional<Transmission> repeater_relay(const RepeaterModel& rep, const Transmission& inbound,
                                           const ChannelModel& model, Rng* rng) {
  if (inbound.is_relay()) {
    return std::nullopt;
  }
  const Reception in = received_power(inbound, rep.internal_antenna, 0.0, model, rng);
  if (in.power_dbm < rep.sensitivity_dbm) {
    return std::nullopt;
  }
  Transmission out = inbound;
  out.relayed_from = inbound.source_id;
  out.source_id = rep.id;
  out.source_position = rep.external_antenna;
  out.tx_power_dbm = rep.output_power_dbm;
  return out;
}

}  // namespace ulsim::channel
