#pragma once

#include <optional>

#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/core/rng.hpp"

namespace ulsim::channel {

/// Log-distance path loss with log-normal shadowing.
///
/// Defaults are the least-squares fit to the measured (distance, RSRP)
/// pairs with a 15 dBm reference-signal power, so PL(d) = 15 - RSRP(d).
struct ChannelModel {
  double pl0_db = 51.7596;
  double d0_m = 1.0;
  double exponent_n = 2.5314;
  double shadowing_sigma_db = 2.0;
  double noise_floor_dbm = -100.0;
  /// Minimum advantage for an injected signal to capture the receiver.
  double capture_margin_db = 3.0;

  void validate() const;
};

double path_loss_db(const ChannelModel& model, double distance_m);

struct Reception {
  double power_dbm = 0.0;
  /// False when the signal sits below the noise floor (shadow area).
  bool detectable = true;
};

/// tx - PL(d) + rx_gain + N(0, sigma). Pass no rng for the noiseless mean.
Reception received_power(const Transmission& tx, const Position& rx_position, double rx_gain_db,
                         const ChannelModel& model, Rng* rng = nullptr);

enum class CaptureWinner { Legitimate, Injected };

/// Injected wins iff it arrives at least `margin_db` stronger; ties go to the legitimate signal.
CaptureWinner resolve_capture(double legit_rx_dbm, double injected_rx_dbm, double margin_db);

/// Capture between two co-channel transmissions at `rx_position`.
const Transmission& resolve_capture(const Transmission& legit, const Transmission* injected,
                                    const Position& rx_position, const ChannelModel& model, Rng* rng = nullptr);

/// Converts between dBm and mW.
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

}  // namespace ulsim::channel
