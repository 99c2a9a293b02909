#include "cemsim/app/emit.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "cemsim/numeric.hpp"
#include "cemsim/replay/ingest.hpp"

namespace cemsim::app {

namespace {

using replay::format_double;

double signed_battery_current(const BatteryStepResult& b) {
  return b.delta_energy < 0.0 ? -b.current : b.current;
}

}  // namespace

const std::vector<std::string>& step_csv_columns() {
  static const std::vector<std::string> kColumns = {
      "step",
      "start_ns",
      "end_ns",
      "context_records",
      "pv_power_w",
      "pv_voltage_v",
      "pv_current_a",
      "load_power_w",
      "load_apparent_power_va",
      "inverter_grid_request_w",
      "inverter_grid_request_va",
      "inverter_battery_mode",
      "inverter_battery_current_a",
      "inverter_pv_drawn_w",
      "battery_soc",
      "battery_voltage_v",
      "battery_current_a",
      "battery_delta_energy_j",
      "battery_delta_charge_c",
      "grid_power_w",
      "grid_apparent_power_va",
      "grid_cost",
      "grid_violation",
      "generated_wh",
      "charged_wh",
      "discharged_wh",
      "consumed_wh",
      "purchased_wh",
      "cost",
  };
  return kColumns;
}

StepCsvWriter::StepCsvWriter(std::ostream& out) : out_(out) {
  const auto& cols = step_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
  out_ << '\n';
}

void StepCsvWriter::consume(const engine::SimulatorStepOutput& s) {
  const auto& a = s.aggregates;
  const auto& billing = s.grid.billing;
  out_ << s.step_index << ',' << s.start.epoch_ns() << ',' << s.end.epoch_ns() << ','
       << (s.context ? s.context->size() : 0) << ',' << format_double(s.power_source.power) << ','
       << format_double(s.power_source.voltage) << ',' << format_double(s.power_source.current)
       << ',' << format_double(s.load.requested_active_power) << ','
       << format_double(s.load.requested_apparent_power) << ','
       << format_double(s.inverter.grid.requested_active_power) << ','
       << format_double(s.inverter.grid.requested_apparent_power) << ','
       << to_string(s.inverter.battery.mode) << ',' << format_double(s.inverter.battery.current)
       << ',' << format_double(s.inverter.pv_power_drawn) << ',' << format_double(s.battery.soc)
       << ',' << format_double(s.battery.voltage) << ',' << format_double(s.battery.current) << ','
       << format_double(s.battery.delta_energy) << ',' << format_double(s.battery.delta_charge)
       << ',' << format_double(s.grid.delivered_active_power) << ','
       << format_double(s.grid.delivered_apparent_power) << ','
       << (billing ? format_double(billing->cost) : "") << ','
       << (billing ? (billing->violation ? "1" : "0") : "") << ','
       << format_double(a.generated_wh) << ',' << format_double(a.charged_wh) << ','
       << format_double(a.discharged_wh) << ',' << format_double(a.consumed_wh) << ','
       << format_double(a.purchased_wh) << ',' << format_double(a.cost) << '\n';
}

ChannelRecorder::ChannelRecorder(int subsystem_id, Clock start,
                                 const BatteryStepResult& initial_battery)
    : subsystem_id_(subsystem_id) {
  put("battery_soc", start, initial_battery.soc);
  put("battery_voltage", start, initial_battery.voltage);
  put("battery_current", start, 0.0);
}

void ChannelRecorder::put(const char* channel, Clock t, double value) {
  table_.channel_for_append({subsystem_id_, channel}).append(t.epoch_ns(), value);
}

void ChannelRecorder::consume(const engine::SimulatorStepOutput& s) {
  const Clock t = s.end;
  const double dt = s.start.ticks_to_seconds(s.step_ticks);
  put("pv_power", t, s.power_source.power);
  put("pv_voltage", t, s.power_source.voltage);
  put("pv_current", t, s.power_source.current);
  put("load_power", t, s.load.requested_active_power);
  put("load_apparent_power", t, s.load.requested_apparent_power);
  put("load_voltage", t, kGridVoltage);
  put("load_current", t, s.load.requested_apparent_power / kGridVoltage);
  put("battery_soc", t, s.battery.soc);
  put("battery_voltage", t, s.battery.voltage);
  put("battery_current", t, signed_battery_current(s.battery));
  put("battery_power", t, s.battery.delta_energy / dt);
  put("grid_power", t, s.grid.delivered_active_power);
  put("grid_apparent_power", t, s.grid.delivered_apparent_power);
  put("grid_voltage", t, kGridVoltage);
  put("grid_current", t, s.grid.delivered_apparent_power / kGridVoltage);
}

nlohmann::json aggregates_json(const engine::Aggregates& a) {
  return {{"generated_wh", a.generated_wh}, {"charged_wh", a.charged_wh},
          {"discharged_wh", a.discharged_wh}, {"consumed_wh", a.consumed_wh},
          {"purchased_wh", a.purchased_wh}, {"cost", a.cost}};
}

nlohmann::json maxima_json(const engine::Maxima& m) {
  return {{"pv_voltage_v", m.pv_voltage},
          {"pv_current_a", m.pv_current},
          {"battery_voltage_v", m.battery_voltage},
          {"battery_current_a", m.battery_current},
          {"grid_current_a", m.grid_current},
          {"load_current_a", m.load_current},
          {"grid_requested_power_w", m.grid_requested_power}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace cemsim::app
