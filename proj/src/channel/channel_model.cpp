#include "ulsim/channel/channel_model.hpp"

#include <cmath>
#include <string>

#include "ulsim/core/errors.hpp"

namespace ulsim::channel {

const char* to_string(Bearer b) {
  switch (b) {
    case Bearer::Srb: return "SRB";
    case Bearer::Drb1: return "DRB1";
    case Bearer::Drb2: return "DRB2";
  }
  return "?";
}

bool channel_matches_link(PhyChannel ch, Link link) {
  return (ch == PhyChannel::Pdcch) == (link == Link::Downlink);
}

void ChannelModel::validate() const {
  if (!(exponent_n > 0.0)) {
    throw ConfigError("path loss exponent must be > 0");
  }
  if (!(d0_m > 0.0)) {
    throw ConfigError("reference distance d0 must be > 0");
  }
  if (!(shadowing_sigma_db >= 0.0)) {
    throw ConfigError("shadowing sigma must be >= 0");
  }
  if (!std::isfinite(pl0_db) || !std::isfinite(noise_floor_dbm) || !std::isfinite(capture_margin_db)) {
    throw ConfigError("channel parameters must be finite");
  }
}

double path_loss_db(const ChannelModel& model, double distance_m) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw GeometryError("path loss needs a positive distance, got " + std::to_string(distance_m));
  }
  return model.pl0_db + 10.0 * model.exponent_n * std::log10(distance_m / model.d0_m);
}

Reception received_power(const Transmission& tx, const Position& rx_position, double rx_gain_db,
                         const ChannelModel& model, Rng* rng) {
  const double d = distance(tx.source_position, rx_position);
  if (d <= 0.0) {
    throw GeometryError("transmitter and receiver are coincident");
  }
  double p = tx.tx_power_dbm - path_loss_db(model, d) + rx_gain_db;
  if (rng != nullptr) {
    p += rng->normal(0.0, model.shadowing_sigma_db);
  }
  return Reception{p, p >= model.noise_floor_dbm};
}

CaptureWinner resolve_capture(double legit_rx_dbm, double injected_rx_dbm, double margin_db) {
  return injected_rx_dbm >= legit_rx_dbm + margin_db ? CaptureWinner::Injected : CaptureWinner::Legitimate;
}

const Transmission& resolve_capture(const Transmission& legit, const Transmission* injected,
                                    const Position& rx_position, const ChannelModel& model, Rng* rng) {
  if (injected == nullptr) {
    return legit;
  }
  const double l = received_power(legit, rx_position, 0.0, model, rng).power_dbm;
  const double i = received_power(*injected, rx_position, 0.0, model, rng).power_dbm;
  return resolve_capture(l, i, model.capture_margin_db) == CaptureWinner::Injected ? *injected : legit;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace ulsim::channel
