#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ulsim/core/sim_time.hpp"

namespace ulsim {

/// Roles in handler order; the registry sorts by role, then by id.
enum class Role { Enb = 0, Attacker = 1, Ue = 2, Repeater = 3, Sniffer = 4 };

/// Per-subframe phases, run in this order:
///   EnbDownlink -> AttackerDownlink -> Uplink (UEs, then repeaters) -> AttackerUplink -> Sniff
enum class Phase { EnbDownlink, AttackerDownlink, Uplink, AttackerUplink, Sniff };

const char* to_string(Role r);

class Entity {
 public:
  virtual ~Entity() = default;
  virtual Role role() const = 0;
  virtual const std::string& id() const = 0;
  virtual void on_phase(Phase phase, SimTime now) = 0;
};

/// Single-threaded subframe loop. Entities are not owned.
class Engine {
 public:
  explicit Engine(std::int64_t duration_ms);

  void add(Entity& entity);

  /// Runs one subframe at now(), then advances the clock. Returns false once
  /// the run has reached its duration (terminal state; nothing is executed).
  bool advance();

  SimTime now() const { return now_; }
  bool finished() const { return now_.ms() >= duration_ms_; }
  std::int64_t duration_ms() const { return duration_ms_; }

  /// Entities in handler order (role, then id).
  const std::vector<Entity*>& entities() const { return entities_; }

 private:
  std::int64_t duration_ms_;
  SimTime now_{};
  std::vector<Entity*> entities_;
};

}  // namespace ulsim
