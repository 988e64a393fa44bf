#include "ulsim/scenario/crowd.hpp"

#include <algorithm>
#include <map>

#include "ulsim/attacker/acquisition.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/enb/enb.hpp"

namespace ulsim::scenario {

namespace {

struct Delivery {
  std::int64_t at;
  std::uint64_t identity;
  channel::Bearer bearer;
};

void poisson_arrivals(std::vector<Delivery>& out, Rng& rng, double rate_per_s, std::int64_t duration_ms,
                      std::uint64_t identity, channel::Bearer bearer) {
  if (rate_per_s <= 0.0) {
    return;
  }
  double t = rng.exponential(rate_per_s / 1000.0);
  while (t < static_cast<double>(duration_ms)) {
    out.push_back({static_cast<std::int64_t>(t), identity, bearer});
    t += rng.exponential(rate_per_s / 1000.0);
  }
}

void pattern(std::vector<Delivery>& out, std::uint64_t identity, std::int64_t start, const std::vector<std::int64_t>& offsets,
             channel::Bearer bearer) {
  for (std::int64_t off : offsets) {
    out.push_back({start + off, identity, bearer});
  }
}

}  // namespace

bool CrowdTrial::identified() const {
  if (!victim_present) {
    return matches.empty();
  }
  return matches.size() == 1 && matches.front() == victim_rnti;
}

bool CrowdTrial::false_positive() const {
  return std::any_of(matches.begin(), matches.end(),
                     [&](std::uint16_t r) { return !victim_present || r != victim_rnti; });
}

CrowdTrial run_crowd_trial(const Scenario& s, std::uint64_t seed, int index, bool adversarial) {
  const CrowdSpec& c = s.crowd;
  const attack::SilentPattern& pat = s.attacker.config.pattern;
  const std::string label = std::string(adversarial ? "adv" : "trial") + std::to_string(index + 1);
  Rng rng = seeded_rng(seed, "crowd:" + label);

  CrowdTrial trial;
  trial.label = label;
  trial.adversarial = adversarial;
  trial.victim_present = !adversarial || index % 2 == 0;

  const std::int64_t span = (pat.burst_count + kMaxExtraBursts) * pat.gap_ms;
  const std::int64_t latest_start = std::max<std::int64_t>(1000, c.duration_ms - span - 2000);
  auto pick_start = [&] { return rng.uniform_int(1000, latest_start); };
  std::vector<std::int64_t> offsets;
  for (int i = 0; i < pat.burst_count; ++i) {
    offsets.push_back(i * pat.gap_ms);
  }

  std::vector<Delivery> plan;
  std::uint64_t identity = kCrowdFirstIdentity;
  for (int u = 0; u < c.users; ++u, ++identity) {
    poisson_arrivals(plan, rng, c.srb_drb1_per_s / 2.0, c.duration_ms, identity, channel::Bearer::Srb);
    poisson_arrivals(plan, rng, c.srb_drb1_per_s / 2.0, c.duration_ms, identity, channel::Bearer::Drb1);
    poisson_arrivals(plan, rng, c.drb2_per_s, c.duration_ms, identity, channel::Bearer::Drb2);
  }
  int users = c.users;

  const std::uint64_t victim = identity++;
  // The attacker sends at victim_start whether or not the victim is there.
  const std::int64_t victim_start = pick_start();
  if (trial.victim_present) {
    ++users;
    poisson_arrivals(plan, rng, c.drb2_per_s, c.duration_ms, victim, channel::Bearer::Drb2);
  }

  if (adversarial) {
    for (int i = 0; i < c.near_miss_users_per_kind; ++i) {
      // One burst short.
      std::vector<std::int64_t> shorter(offsets.begin(), offsets.end() - 1);
      pattern(plan, identity++, pick_start(), shorter, channel::Bearer::Srb);
      // One gap off by twice the tolerance.
      std::vector<std::int64_t> skewed = offsets;
      const std::size_t j = static_cast<std::size_t>(rng.uniform_int(1, pat.burst_count - 1));
      for (std::size_t k = j; k < skewed.size(); ++k) {
        skewed[k] += 2 * pat.tolerance_ms;
      }
      pattern(plan, identity++, pick_start(), skewed, channel::Bearer::Srb);
      // A middle burst missing, leaving one doubled gap.
      std::vector<std::int64_t> holed = offsets;
      holed.push_back(offsets.back() + pat.gap_ms);
      holed.erase(holed.begin() + static_cast<std::ptrdiff_t>(rng.uniform_int(1, pat.burst_count - 1)));
      pattern(plan, identity++, pick_start(), holed, channel::Bearer::Drb1);
      // The right timing, but on the wrong bearer.
      pattern(plan, identity++, pick_start(), offsets, channel::Bearer::Drb2);
      users += 4;
    }
  }
  trial.users = users;

  // An ambiguous match is retried with one more silent message.
  for (int extra = 0; extra <= kMaxExtraBursts; ++extra) {
    attack::SilentPattern sent = pat;
    sent.burst_count += extra;
    std::vector<Delivery> all = plan;
    std::int64_t victim_last_ms = -1;
    if (trial.victim_present) {
      for (int b = 0; b < sent.burst_count; ++b) {
        all.push_back({victim_start + b * pat.gap_ms, victim, channel::Bearer::Srb});
      }
      victim_last_ms = victim_start + (sent.burst_count - 1) * pat.gap_ms;
    }
    std::stable_sort(all.begin(), all.end(), [](const Delivery& a, const Delivery& b) { return a.at < b.at; });

    enb::Enb cell(s.enb.config);
    std::vector<attack::DownlinkObservation> obs;
    std::size_t i = 0;
    while (i < all.size()) {
      const SimTime t = SimTime::from_ms(all[i].at);
      cell.expire_idle(t);
      for (; i < all.size() && all[i].at == t.ms(); ++i) {
        cell.deliver_downlink(all[i].identity, all[i].bearer, t);
      }
      if (t.ms() == victim_last_ms) {
        trial.victim_rnti = cell.find_active_by_identity(victim)->rnti;
      }
      for (const channel::BearerEvent& e : cell.build_downlink(t).bearer_events) {
        obs.push_back({e.rnti, e.bearer, t});
      }
    }
    trial.silent_messages = sent.burst_count;
    attack::AcquisitionOptions opt;
    opt.first_burst = SimTime::from_ms(victim_start);
    trial.matches = attack::matching_rntis(sent, obs, opt);
    if (trial.matches.size() < 2) {
      break;
    }
  }
  return trial;
}

}  // namespace ulsim::scenario
