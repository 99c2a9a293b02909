#pragma once

// Components backed by recorded time series. They return interpolated
// measurements at the post-step time and ignore every input except
// step_ticks.

#include <memory>

#include "cemsim/components.hpp"
#include "cemsim/replay/timeseries.hpp"

namespace cemsim::replay {

struct ReplayConfig {
  int subsystem_id = 1;  // 1 = workstation inverter, 2 = air-conditioner inverter
  std::shared_ptr<const TimeSeriesTable> table;
  std::int64_t boundary_tolerance_ns = 120 * Clock::kNanosPerSecond;
  // Replay battery only: converts SOC differences into energy deltas.
  double battery_capacity = 0.0;  // J
};

class ReplayPowerSource final : public PowerSource {
 public:
  ReplayPowerSource(Clock clock, ReplayConfig config);
  PowerSourceStepResult step(std::int64_t step_ticks) override;
  std::string name() const override { return "power_source(replay)"; }

 private:
  ReplayConfig config_;
};

class ReplayLoad final : public Load {
 public:
  ReplayLoad(Clock clock, ReplayConfig config);
  LoadStepResult step(std::int64_t step_ticks) override;
  std::string name() const override { return "load(replay)"; }

 private:
  ReplayConfig config_;
};

class ReplayGrid final : public Grid {
 public:
  ReplayGrid(Clock clock, ReplayConfig config);
  GridStepResult step(std::int64_t step_ticks, const GridStepInput& input) override;
  std::string name() const override { return "grid(replay)"; }

 private:
  ReplayConfig config_;
};

/// Reports recorded SOC and voltage; delta_energy is the SOC change times the
/// configured capacity.
class ReplayBattery final : public Battery {
 public:
  ReplayBattery(Clock clock, ReplayConfig config);
  BatteryStepResult step(std::int64_t step_ticks, const BatteryStepInput& input) override;
  BatteryStepResult observe() const override;
  std::string name() const override { return "battery(replay)"; }

 private:
  double soc_at(Clock t) const;
  ReplayConfig config_;
};

/// Re-issues the recorded grid draw and battery current as the next inputs.
class ReplayInverter final : public Inverter {
 public:
  ReplayInverter(Clock clock, ReplayConfig config);
  InverterStepResult step(std::int64_t step_ticks, const InverterStepInput& input) override;
  std::string name() const override { return "inverter(replay)"; }

 private:
  ReplayConfig config_;
};

}  // namespace cemsim::replay
