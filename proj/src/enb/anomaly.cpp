#include "ulsim/enb/anomaly.hpp"

#include <algorithm>
#include <vector>

namespace ulsim::enb {

namespace {

bool reports_zero(const phy::MacPdu& pdu) { return pdu.bsr.has_value() && pdu.bsr->buffer_size_bytes == 0; }

bool push_and_check(std::deque<std::int64_t>& q, std::int64_t t, const AnomalyThresholds& th) {
  q.push_back(t);
  while (!q.empty() && q.front() <= t - th.window_ms) {
    q.pop_front();
  }
  return static_cast<int>(q.size()) >= th.min_pdus;
}

}  // namespace

bool AnomalyMonitor::observe(const ReceivedPdu& rx) {
  Track& tr = tracks_[rx.pdu.rnti];
  const AnomalyFlags before = tr.flags;
  const bool after_zero = tr.last_zero;
  tr.last_zero = reports_zero(rx.pdu);
  if (tr.last_zero) {
    if (after_zero && push_and_check(tr.zero_bsr, rx.at.ms(), th_)) {
      tr.flags.zero_bsr_repeated_uplink = true;
    }
    if (rx.pdu.kind == phy::PayloadKind::Padding && push_and_check(tr.padding, rx.at.ms(), th_)) {
      tr.flags.padding_only = true;
    }
  }
  return !(tr.flags == before);
}

AnomalyFlags AnomalyMonitor::flags() const {
  AnomalyFlags f;
  for (const auto& [rnti, tr] : tracks_) {
    f.zero_bsr_repeated_uplink |= tr.flags.zero_bsr_repeated_uplink;
    f.padding_only |= tr.flags.padding_only;
  }
  return f;
}

AnomalyFlags AnomalyMonitor::flags_for(std::uint16_t rnti) const {
  auto it = tracks_.find(rnti);
  return it == tracks_.end() ? AnomalyFlags{} : it->second.flags;
}

AnomalyFlags detect_anomalies(std::span<const ReceivedPdu> pdus, const AnomalyThresholds& th) {
  std::vector<ReceivedPdu> sorted(pdus.begin(), pdus.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ReceivedPdu& a, const ReceivedPdu& b) { return a.at < b.at; });
  AnomalyMonitor mon(th);
  for (const ReceivedPdu& rx : sorted) {
    mon.observe(rx);
  }
  return mon.flags();
}

}  // namespace ulsim::enb
