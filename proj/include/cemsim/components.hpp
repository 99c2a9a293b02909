#pragma once

// Abstract component contracts. Every component advances its own copy of the
// shared clock by `step_ticks` per call; the simulator keeps them in lockstep.

#include <cstdint>
#include <string>
#include <vector>

#include "cemsim/clock.hpp"
#include "cemsim/context.hpp"
#include "cemsim/step_types.hpp"

namespace cemsim {

class SystemComponent {
 public:
  explicit SystemComponent(Clock clock) : clock_(clock) {}
  virtual ~SystemComponent() = default;

  SystemComponent(const SystemComponent&) = delete;
  SystemComponent& operator=(const SystemComponent&) = delete;

  /// Time at the start of the next step.
  Clock now() const noexcept { return clock_; }

  virtual std::string name() const = 0;

 protected:
  /// Moves the component clock forward and returns the post-step time.
  Clock advance_clock(std::int64_t step_ticks) {
    clock_ = clock_.advance(step_ticks);
    return clock_;
  }

 private:
  Clock clock_;
};

/// Independent DC source such as a PV array.
class PowerSource : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual PowerSourceStepResult step(std::int64_t step_ticks) = 0;
};

/// One-way AC grid connection: power can be drawn, never sold.
class Grid : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual GridStepResult step(std::int64_t step_ticks, const GridStepInput& input) = 0;
};

/// AC load at the inverter contact (230 V, 50 Hz).
class Load : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual LoadStepResult step(std::int64_t step_ticks) = 0;
};

/// DC battery driven by the inverter.
class Battery : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual BatteryStepResult step(std::int64_t step_ticks, const BatteryStepInput& input) = 0;
  /// Current state with zero deltas; seeds the inverter's first step.
  virtual BatteryStepResult observe() const = 0;
};

/// DC-AC converter arbitrating between PV, battery and grid.
class Inverter : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual InverterStepResult step(std::int64_t step_ticks, const InverterStepInput& input) = 0;
};

/// Source of context records known at the post-step time.
class Context : public SystemComponent {
 public:
  using SystemComponent::SystemComponent;
  virtual std::vector<ContextRecord> step(std::int64_t step_ticks) = 0;
};

}  // namespace cemsim
