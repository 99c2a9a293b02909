#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cemsim/components.hpp"
#include "cemsim/numeric.hpp"

namespace cemsim::engine {

/// Cumulative energies since the start of the run, in Wh, plus grid cost.
struct Aggregates {
  double generated_wh = 0.0;   // PV power actually drawn
  double charged_wh = 0.0;     // energy absorbed by the battery
  double discharged_wh = 0.0;  // energy released by the battery
  double consumed_wh = 0.0;    // load demand
  double purchased_wh = 0.0;   // grid delivery
  double cost = 0.0;           // cost units, priced grids only

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

/// Per-step contributions to Aggregates, same units.
using EnergyDeltas = Aggregates;

/// Running maxima at each electrical contact.
struct Maxima {
  double pv_voltage = 0.0;             // V
  double pv_current = 0.0;             // A
  double battery_voltage = 0.0;        // V
  double battery_current = 0.0;        // A
  double grid_current = 0.0;           // A, apparent power over 230 V
  double load_current = 0.0;           // A, apparent power over 230 V
  double grid_requested_power = 0.0;   // W

  friend bool operator==(const Maxima&, const Maxima&) = default;
};

struct SimulatorStepOutput {
  std::size_t step_index = 0;
  Clock start;
  Clock end;
  std::int64_t step_ticks = 0;
  std::optional<std::vector<ContextRecord>> context;
  PowerSourceStepResult power_source;
  LoadStepResult load;
  InverterStepResult inverter;
  BatteryStepResult battery;
  GridStepResult grid;
  EnergyDeltas deltas;
  Aggregates aggregates;
  Maxima maxima;
};

/// Extra per-component arguments for one step.
struct StepArgs {
  std::optional<GridDirective> inverter;
};

/// Receives step outputs as they are produced.
class StepSink {
 public:
  virtual ~StepSink() = default;
  virtual void consume(const SimulatorStepOutput& output) = 0;
};

struct SimulatorComponents {
  std::unique_ptr<PowerSource> power_source;
  std::unique_ptr<Load> load;
  std::unique_ptr<Inverter> inverter;
  std::unique_ptr<Battery> battery;
  std::unique_ptr<Grid> grid;
  std::unique_ptr<Context> context;  // optional
};

/// Wires one instance of each component and advances them in lockstep.
///
/// Call order within a step: context, power source, load, inverter, battery,
/// grid. The inverter sees this step's PV and load results together with the
/// battery and grid results of the previous step; the battery and grid then
/// act on the inverter's requests.
class Simulator {
 public:
  /// Throws ConfigError when a mandatory component is missing or a component
  /// clock disagrees with `clock`.
  Simulator(Clock clock, SimulatorComponents components);

  /// Throws DomainError for step_ticks < 1 and SimulationError (naming the
  /// component and step index) when a component fails.
  SimulatorStepOutput step(std::int64_t step_ticks, const StepArgs& args = {});

  /// Steps until `total_ticks` have elapsed. A remainder shorter than
  /// `step_ticks` is emitted as a final partial step.
  std::vector<SimulatorStepOutput> run(std::int64_t total_ticks, std::int64_t step_ticks);
  void run(std::int64_t total_ticks, std::int64_t step_ticks, StepSink& sink);

  Clock now() const noexcept { return clock_; }
  std::size_t steps_taken() const noexcept { return step_index_; }
  Aggregates aggregates() const noexcept;
  const Maxima& maxima() const noexcept { return maxima_; }
  const BatteryStepResult& last_battery() const noexcept { return last_battery_; }
  const GridStepResult& last_grid() const noexcept { return last_grid_; }

  const SimulatorComponents& components() const noexcept { return components_; }

 private:
  struct Accumulators {
    CompensatedSum generated, charged, discharged, consumed, purchased, cost;
  };

  void update_maxima(const SimulatorStepOutput& out);

  Clock clock_;
  SimulatorComponents components_;
  BatteryStepResult last_battery_;
  GridStepResult last_grid_;
  Accumulators sums_;
  Maxima maxima_;
  std::size_t step_index_ = 0;
};

/// Number of steps `run` produces, including a final partial step.
std::size_t step_count(std::int64_t total_ticks, std::int64_t step_ticks);

}  // namespace cemsim::engine
