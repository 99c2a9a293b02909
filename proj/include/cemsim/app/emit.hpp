#pragma once

// Output artifacts of the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/engine/simulator.hpp"
#include "cemsim/replay/timeseries.hpp"

namespace cemsim::app {

inline constexpr int kSummarySchemaVersion = 1;

/// Header of steps.csv, one row per simulator step.
const std::vector<std::string>& step_csv_columns();

/// Writes steps.csv rows as steps arrive.
class StepCsvWriter final : public engine::StepSink {
 public:
  explicit StepCsvWriter(std::ostream& out);
  void consume(const engine::SimulatorStepOutput& step) override;

 private:
  std::ostream& out_;
};

/// Collects the recorded channels of a run in the replay ingestion layout:
/// samples at every post-step time plus the battery state at the start.
class ChannelRecorder final : public engine::StepSink {
 public:
  ChannelRecorder(int subsystem_id, Clock start, const BatteryStepResult& initial_battery);
  void consume(const engine::SimulatorStepOutput& step) override;
  const replay::TimeSeriesTable& table() const noexcept { return table_; }

 private:
  void put(const char* channel, Clock t, double value);
  int subsystem_id_;
  replay::TimeSeriesTable table_;
};

/// Forwards each step to several sinks in order.
class FanoutSink final : public engine::StepSink {
 public:
  explicit FanoutSink(std::vector<engine::StepSink*> sinks) : sinks_(std::move(sinks)) {}
  void consume(const engine::SimulatorStepOutput& step) override {
    for (auto* s : sinks_) s->consume(step);
  }

 private:
  std::vector<engine::StepSink*> sinks_;
};

nlohmann::json aggregates_json(const engine::Aggregates& a);
nlohmann::json maxima_json(const engine::Maxima& m);

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace cemsim::app
