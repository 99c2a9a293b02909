#include "cemsim/engine/simulator.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <utility>

#include "cemsim/errors.hpp"

namespace cemsim::engine {

namespace {

// Runs one component call, re-throwing failures with component and step.
template <typename Fn>
auto guarded(const SystemComponent& component, std::size_t step_index, Fn&& fn) {
  try {
    return fn();
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(component.name(), step_index, e.what());
  }
}

class VectorSink final : public StepSink {
 public:
  explicit VectorSink(std::vector<SimulatorStepOutput>& out) : out_(out) {}
  void consume(const SimulatorStepOutput& output) override { out_.push_back(output); }

 private:
  std::vector<SimulatorStepOutput>& out_;
};

}  // namespace

std::size_t step_count(std::int64_t total_ticks, std::int64_t step_ticks) {
  if (step_ticks < 1) throw DomainError("run: step_ticks must be >= 1");
  if (total_ticks < 0) throw DomainError("run: total_ticks must be >= 0");
  return static_cast<std::size_t>(total_ticks / step_ticks + (total_ticks % step_ticks != 0));
}

Simulator::Simulator(Clock clock, SimulatorComponents components)
    : clock_(clock), components_(std::move(components)) {
  auto& c = components_;
  if (!c.power_source || !c.load || !c.inverter || !c.battery || !c.grid) {
    throw ConfigError("simulator: power source, load, inverter, battery and grid are required");
  }
  const SystemComponent* all[] = {c.power_source.get(), c.load.get(), c.inverter.get(),
                                  c.battery.get(), c.grid.get(), c.context.get()};
  for (const auto* comp : all) {
    if (comp != nullptr && comp->now() != clock_) {
      throw ConfigError("simulator: " + comp->name() + " clock does not match the simulator clock");
    }
  }
  last_battery_ = c.battery->observe();
}

Aggregates Simulator::aggregates() const noexcept {
  return {sums_.generated.value(), sums_.charged.value(),   sums_.discharged.value(),
          sums_.consumed.value(),  sums_.purchased.value(), sums_.cost.value()};
}

SimulatorStepOutput Simulator::step(std::int64_t step_ticks, const StepArgs& args) {
  if (step_ticks < 1) throw DomainError("simulator: step_ticks must be >= 1");
  auto& c = components_;
  const std::size_t k = step_index_;

  SimulatorStepOutput out;
  out.step_index = k;
  out.start = clock_;
  out.step_ticks = step_ticks;
  const Clock end = clock_.advance(step_ticks);
  const double dt = clock_.ticks_to_seconds(step_ticks);

  if (c.context) {
    out.context = guarded(*c.context, k, [&] { return c.context->step(step_ticks); });
  }
  out.power_source = guarded(*c.power_source, k, [&] { return c.power_source->step(step_ticks); });
  out.load = guarded(*c.load, k, [&] { return c.load->step(step_ticks); });

  InverterStepInput inv_in{out.power_source, last_battery_, last_grid_, out.load, args.inverter};
  out.inverter = guarded(*c.inverter, k, [&] { return c.inverter->step(step_ticks, inv_in); });
  out.battery =
      guarded(*c.battery, k, [&] { return c.battery->step(step_ticks, out.inverter.battery); });
  out.grid = guarded(*c.grid, k, [&] { return c.grid->step(step_ticks, out.inverter.grid); });

  // Per-step energies in Wh; physical math stays in J until here.
  auto& d = out.deltas;
  d.generated_wh = out.inverter.pv_power_drawn * dt / kJoulesPerWh;
  d.purchased_wh = out.grid.delivered_active_power * dt / kJoulesPerWh;
  d.consumed_wh = out.load.requested_active_power * dt / kJoulesPerWh;
  d.charged_wh = std::max(out.battery.delta_energy, 0.0) / kJoulesPerWh;
  d.discharged_wh = std::max(-out.battery.delta_energy, 0.0) / kJoulesPerWh;
  d.cost = out.grid.billing ? out.grid.billing->cost : 0.0;

  sums_.generated.add(d.generated_wh);
  sums_.purchased.add(d.purchased_wh);
  sums_.consumed.add(d.consumed_wh);
  sums_.charged.add(d.charged_wh);
  sums_.discharged.add(d.discharged_wh);
  sums_.cost.add(d.cost);
  out.aggregates = aggregates();

  update_maxima(out);
  out.maxima = maxima_;

  last_battery_ = out.battery;
  last_grid_ = out.grid;
  clock_ = end;
  out.end = end;
  ++step_index_;
  return out;
}

void Simulator::update_maxima(const SimulatorStepOutput& out) {
  auto up = [](double& slot, double v) { slot = std::max(slot, v); };
  up(maxima_.pv_voltage, out.power_source.voltage);
  up(maxima_.pv_current, out.power_source.current);
  up(maxima_.battery_voltage, out.battery.voltage);
  up(maxima_.battery_current, out.battery.current);
  up(maxima_.grid_current, out.grid.delivered_apparent_power / kGridVoltage);
  up(maxima_.load_current, out.load.requested_apparent_power / kGridVoltage);
  up(maxima_.grid_requested_power, out.inverter.grid.requested_active_power);
}

void Simulator::run(std::int64_t total_ticks, std::int64_t step_ticks, StepSink& sink) {
  const std::size_t n = step_count(total_ticks, step_ticks);
  const std::int64_t remainder = total_ticks % step_ticks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool last_partial = remainder != 0 && i + 1 == n;
    sink.consume(step(last_partial ? remainder : step_ticks));
  }
}

std::vector<SimulatorStepOutput> Simulator::run(std::int64_t total_ticks, std::int64_t step_ticks) {
  std::vector<SimulatorStepOutput> out;
  out.reserve(step_count(total_ticks, step_ticks));
  VectorSink sink(out);
  run(total_ticks, step_ticks, sink);
  return out;
}

}  // namespace cemsim::engine
