#include "ulsim/core/engine.hpp"

#include <algorithm>
#include <array>

#include "ulsim/core/errors.hpp"

namespace ulsim {

const char* to_string(Role r) {
  switch (r) {
    case Role::Enb: return "enb";
    case Role::Attacker: return "attacker";
    case Role::Ue: return "ue";
    case Role::Repeater: return "repeater";
    case Role::Sniffer: return "sniffer";
  }
  return "?";
}

namespace {

bool phase_runs(Phase phase, Role role) {
  switch (phase) {
    case Phase::EnbDownlink: return role == Role::Enb;
    case Phase::AttackerDownlink: return role == Role::Attacker;
    case Phase::Uplink: return role == Role::Ue || role == Role::Repeater;
    case Phase::AttackerUplink: return role == Role::Attacker;
    case Phase::Sniff: return role == Role::Sniffer;
  }
  return false;
}

}  // namespace

Engine::Engine(std::int64_t duration_ms) : duration_ms_(duration_ms) {
  if (duration_ms < 1) {
    throw ConfigError("duration_ms must be >= 1");
  }
}

void Engine::add(Entity& entity) {
  auto key = [](const Entity* e) { return std::make_pair(static_cast<int>(e->role()), e->id()); };
  for (const Entity* e : entities_) {
    if (key(e) == key(&entity)) {
      throw ConfigError("duplicate entity id: " + entity.id());
    }
  }
  auto pos = std::upper_bound(entities_.begin(), entities_.end(), &entity,
                              [&](const Entity* a, const Entity* b) { return key(a) < key(b); });
  entities_.insert(pos, &entity);
}

bool Engine::advance() {
  if (finished()) {
    return false;
  }
  static constexpr std::array kPhases{Phase::EnbDownlink, Phase::AttackerDownlink, Phase::Uplink,
                                      Phase::AttackerUplink, Phase::Sniff};
  for (Phase phase : kPhases) {
    for (Entity* e : entities_) {
      if (phase_runs(phase, e->role())) {
        e->on_phase(phase, now_);
      }
    }
  }
  now_ = now_.next();
  return true;
}

}  // namespace ulsim
