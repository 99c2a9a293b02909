#pragma once

// Turns a Scenario into a runnable Simulator under one dispatch strategy.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cemsim/app/scenario.hpp"
#include "cemsim/control/charging.hpp"
#include "cemsim/engine/simulator.hpp"
#include "cemsim/forecast/evaluation.hpp"
#include "cemsim/forecast/providers.hpp"
#include "cemsim/replay/timeseries.hpp"

namespace cemsim::app {

enum class Strategy { Default, MpcPerfect, MpcContext, MpcNoContext };

std::string to_string(Strategy s);
/// "default", "mpc-perfect", "mpc-context", "mpc-nocontext". Throws ConfigError.
Strategy parse_strategy(std::string_view name);
/// Comma-separated; empty input yields all four in the order above.
std::vector<Strategy> parse_strategies(std::string_view list);
const std::vector<Strategy>& all_strategies();

/// Inputs derived once per scenario and shared read-only by every strategy.
struct ScenarioData {
  std::shared_ptr<const replay::TimeSeriesTable> table;  // null without replay inputs
  std::vector<models::JobEvent> jobs;
  std::vector<ContextRecord> records;  // every context record, canonical order
  models::SyntheticPvConfig pv;
  models::SyntheticLoadConfig load;
  models::PriceSchedule prices;
};

/// Generates jobs and reads input files. Throws ConfigError, ParseError or
/// ValidationError for bad inputs.
ScenarioData prepare_scenario(const Scenario& scenario);

/// The load and PV the simulated components will report at time t.
forecast::SeriesFunction load_function(const Scenario& scenario, const ScenarioData& data);
forecast::SeriesFunction pv_function(const Scenario& scenario, const ScenarioData& data);

std::shared_ptr<forecast::EffortEstimator> make_estimator(const Scenario& scenario);

/// Load samples every step over [from, to) with the scenario's context records.
forecast::EvaluationData evaluation_data(const Scenario& scenario, const ScenarioData& data,
                                         Clock from, Clock to);

/// Training window for forecast predictors: the synthetic history before the
/// run, or the run itself when there is no history (replay scenarios).
std::pair<Clock, Clock> training_window(const Scenario& scenario);

forecast::Predictor train_load_predictor(const Scenario& scenario, const ScenarioData& data,
                                         forecast::FeatureFamily family,
                                         forecast::EffortEstimator& estimator);

/// The whole run as one charging problem with exact load and PV: the
/// open-loop optimum a perfect-forecast MPC must reach. Requires the linear
/// battery and the PV-first inverter.
control::ChargingProblem open_loop_problem(const Scenario& scenario, const ScenarioData& data);

std::unique_ptr<engine::Simulator> build_simulator(const Scenario& scenario,
                                                   const ScenarioData& data, Strategy strategy);

}  // namespace cemsim::app
