#include "ulsim/phy/scheduling_request.hpp"

#include <array>
#include <string>

#include "ulsim/core/errors.hpp"

namespace ulsim::phy {

namespace {

struct SrRow {
  int first_index;
  int last_index;
  int period_ms;
};

constexpr std::array<SrRow, 5> kSrTable{{
    {0, 4, 5},
    {5, 14, 10},
    {15, 34, 20},
    {35, 74, 40},
    {75, 154, 80},
}};

const SrRow& row_for_index(int index) {
  for (const auto& r : kSrTable) {
    if (index >= r.first_index && index <= r.last_index) {
      return r;
    }
  }
  throw ConfigError("sr-ConfigIndex out of range: " + std::to_string(index));
}

}  // namespace

SchedulingRequestConfig SchedulingRequestConfig::from_period_offset(std::uint16_t resource, int period_ms,
                                                                    int offset_ms) {
  for (const auto& r : kSrTable) {
    if (r.period_ms == period_ms) {
      if (offset_ms < 0 || offset_ms >= period_ms) {
        throw ConfigError("SR offset out of range");
      }
      SchedulingRequestConfig c{resource, static_cast<std::uint8_t>(r.first_index + offset_ms)};
      c.validate();
      return c;
    }
  }
  throw ConfigError("SR periodicity must be one of 5/10/20/40/80 ms");
}

int SchedulingRequestConfig::periodicity_ms() const { return row_for_index(sr_config_index).period_ms; }

int SchedulingRequestConfig::offset_ms() const {
  return sr_config_index - row_for_index(sr_config_index).first_index;
}

bool SchedulingRequestConfig::is_occasion(SimTime t) const {
  const int period = periodicity_ms();
  const auto phase = (t.ms() - offset_ms()) % period;
  return phase == 0;
}

void SchedulingRequestConfig::validate() const {
  if (pucch_resource_index > kMaxPucchResourceIndex) {
    throw ConfigError("PUCCH resource index out of range");
  }
  row_for_index(sr_config_index);
}

BitString encode_sr(const SchedulingRequest& sr) {
  try {
    sr.config.validate();
  } catch (const ConfigError& e) {
    throw EncodeError(e.what());
  }
  BitString bits;
  bits.append(sr.rnti, 16);
  bits.append(sr.config.pucch_resource_index, 11);
  bits.append(sr.config.sr_config_index, 8);
  bits.append(1, 1);
  return bits;
}

SchedulingRequest decode_sr(const BitString& bits) {
  if (bits.size() != static_cast<std::size_t>(kSrBits)) {
    throw DecodeError("SR must be 36 bits");
  }
  if (bits.read(35, 1) != 1) {
    throw DecodeError("SR presence bit not set");
  }
  SchedulingRequest sr;
  sr.rnti = static_cast<std::uint16_t>(bits.read(0, 16));
  sr.config.pucch_resource_index = static_cast<std::uint16_t>(bits.read(16, 11));
  sr.config.sr_config_index = static_cast<std::uint8_t>(bits.read(27, 8));
  try {
    sr.config.validate();
  } catch (const ConfigError& e) {
    throw DecodeError(e.what());
  }
  return sr;
}

}  // namespace ulsim::phy
