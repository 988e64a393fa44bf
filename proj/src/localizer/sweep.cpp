#include "ulsim/localizer/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulsim/channel/channel_model.hpp"
#include "ulsim/core/errors.hpp"

namespace ulsim::loc {

void SweepConfig::validate() const {
  if (!(step_deg > 0.0) || !(span_deg > 0.0) || span_deg > 360.0) {
    throw ConfigError("sweep step must be > 0 and span in (0, 360]");
  }
  if (samples_per_angle < 1) {
    throw ConfigError("samples_per_angle must be >= 1");
  }
  if (max_duration_ms < 1) {
    throw ConfigError("sweep max_duration_ms must be >= 1");
  }
  if (noise_jitter_db < 0.0) {
    throw ConfigError("noise jitter must be >= 0");
  }
  antenna.validate();
}

bool SweepConfig::full_circle() const { return span_deg >= 360.0; }

std::vector<double> SweepConfig::angles() const {
  std::vector<double> out;
  const double stop = full_circle() ? span_deg - 1e-9 : span_deg + 1e-9;
  for (int i = 0; i * step_deg <= stop; ++i) {
    out.push_back(full_circle() ? wrap_360(start_deg + i * step_deg) : start_deg + i * step_deg);
  }
  return out;
}

bool SweepProfile::empty() const {
  for (int n : samples) {
    if (n > 0) {
      return false;
    }
  }
  return true;
}

double sample_power(const channel::AntennaPattern& antenna, const Position& sniffer, double pointing_deg,
                    std::span<const ArrivingSignal> signals, double noise_floor_dbm, double noise_jitter_db,
                    Rng* rng) {
  double noise = noise_floor_dbm;
  if (rng != nullptr) {
    noise += rng->normal(0.0, noise_jitter_db);
  }
  double mw = channel::dbm_to_mw(noise);
  for (const ArrivingSignal& s : signals) {
    const double gain = channel::antenna_gain(antenna, bearing_deg(sniffer, s.source) - pointing_deg);
    mw += channel::dbm_to_mw(s.power_dbm + gain);
  }
  return channel::mw_to_dbm(mw);
}

Sweeper::Sweeper(SweepConfig cfg, Position sniffer, double noise_floor_dbm)
    : cfg_(cfg), sniffer_(sniffer), noise_floor_dbm_(noise_floor_dbm) {
  cfg_.validate();
  angles_ = cfg_.angles();
  sum_dbm_.assign(angles_.size(), 0.0);
  count_.assign(angles_.size(), 0);
}

void Sweeper::start(SimTime now) {
  started_ = true;
  done_ = false;
  index_ = 0;
  start_ms_ = now.ms();
  std::fill(sum_dbm_.begin(), sum_dbm_.end(), 0.0);
  std::fill(count_.begin(), count_.end(), 0);
}

void Sweeper::add_sample(double dbm) {
  if (!active()) {
    return;
  }
  sum_dbm_[index_] += dbm;
  if (++count_[index_] >= cfg_.samples_per_angle) {
    if (++index_ >= angles_.size()) {
      done_ = true;
      index_ = angles_.size() - 1;
    }
  }
}

void Sweeper::tick(SimTime now) {
  if (active() && elapsed_ms(now) >= cfg_.max_duration_ms) {
    done_ = true;
  }
}

SweepProfile Sweeper::profile() const {
  SweepProfile p;
  p.sniffer = sniffer_;
  p.noise_floor_dbm = noise_floor_dbm_;
  p.circular = cfg_.full_circle();
  p.step_deg = cfg_.step_deg;
  p.angles_deg = angles_;
  p.samples = count_;
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double m = count_[i] > 0 ? sum_dbm_[i] / count_[i] : std::numeric_limits<double>::quiet_NaN();
    p.mean_dbm.push_back(m);
    p.snr_db.push_back(m - noise_floor_dbm_);
  }
  return p;
}

SweepProfile sweep_static(const SweepConfig& cfg, const Position& sniffer, std::span<const ArrivingSignal> signals,
                          double noise_floor_dbm, double shadowing_sigma_db, Rng* rng) {
  Sweeper sw(cfg, sniffer, noise_floor_dbm);
  sw.start(SimTime{});
  std::vector<ArrivingSignal> faded(signals.begin(), signals.end());
  while (sw.active()) {
    for (std::size_t i = 0; i < faded.size(); ++i) {
      faded[i].power_dbm = signals[i].power_dbm + (rng != nullptr ? rng->normal(0.0, shadowing_sigma_db) : 0.0);
    }
    sw.add_sample(sample_power(cfg.antenna, sniffer, sw.pointing_deg(), faded, noise_floor_dbm,
                               cfg.noise_jitter_db, rng));
  }
  return sw.profile();
}

}  // namespace ulsim::loc
