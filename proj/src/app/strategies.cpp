#include "cemsim/app/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "cemsim/control/mpc.hpp"
#include "cemsim/errors.hpp"
#include "cemsim/forecast/remote.hpp"
#include "cemsim/models/battery_linear.hpp"
#include "cemsim/models/grid_priced.hpp"
#include "cemsim/models/inverter_pv_first.hpp"
#include "cemsim/replay/ingest.hpp"
#include "cemsim/replay/replay_models.hpp"

namespace cemsim::app {

namespace {

// Owns an estimator and memoizes it; effort lookups repeat for every window.
class OwningCachedEstimator final : public forecast::EffortEstimator {
 public:
  explicit OwningCachedEstimator(std::shared_ptr<forecast::EffortEstimator> inner)
      : inner_(std::move(inner)), cached_(*inner_) {}
  double estimate(std::string_view text) override { return cached_.estimate(text); }

 private:
  std::shared_ptr<forecast::EffortEstimator> inner_;
  forecast::CachingEffortEstimator cached_;
};

replay::ReplayConfig replay_config(const Scenario& sc, const ScenarioData& data) {
  replay::ReplayConfig rc;
  rc.subsystem_id = sc.replay.subsystem_id;
  rc.table = data.table;
  rc.boundary_tolerance_ns = sc.replay.boundary_tolerance_ns;
  rc.battery_capacity = sc.battery.capacity;
  return rc;
}

forecast::SeriesFunction channel_function(const Scenario& sc, const ScenarioData& data,
                                          const char* name) {
  const auto table = data.table;
  const replay::ChannelKey key{sc.replay.subsystem_id, name};
  (void)table->channel(key);  // fail early when missing
  const auto tol = sc.replay.boundary_tolerance_ns;
  return [table, key, tol](Clock t) { return std::max(0.0, replay::interpolate(table->channel(key), t, tol)); };
}

void require_controllable(const Scenario& sc, Strategy s) {
  if (sc.battery_model != "linear" || sc.inverter_model != "pv_first") {
    throw ConfigError("strategy " + to_string(s) +
                      " needs components.battery.model=linear and components.inverter.model=pv_first");
  }
}

models::InverterPVFirstConfig inverter_config(const Scenario& sc) {
  models::InverterPVFirstConfig ic = sc.inverter;
  if (sc.battery_model == "linear") {
    ic.storage = models::StorageLimits{sc.battery.capacity, sc.battery.eta_charge,
                                       sc.battery.eta_discharge};
  }
  return ic;
}

std::optional<double> planning_grid_limit(const Scenario& sc) {
  if (sc.control.max_grid_power) return sc.control.max_grid_power;
  return sc.grid_active_power_limit;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Default: return "default";
    case Strategy::MpcPerfect: return "mpc-perfect";
    case Strategy::MpcContext: return "mpc-context";
    case Strategy::MpcNoContext: return "mpc-nocontext";
  }
  return "unknown";
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> kAll = {Strategy::Default, Strategy::MpcPerfect,
                                             Strategy::MpcContext, Strategy::MpcNoContext};
  return kAll;
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected default, mpc-perfect, mpc-context or mpc-nocontext)");
}

std::vector<Strategy> parse_strategies(std::string_view list) {
  if (list.empty()) return all_strategies();
  std::vector<Strategy> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const Strategy s = parse_strategy(list.substr(pos, comma - pos));
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    pos = comma + 1;
  }
  return out;
}

ScenarioData prepare_scenario(const Scenario& sc) {
  ScenarioData data;
  if (sc.replay.timeseries) {
    replay::IngestOptions opts;
    opts.strict = sc.replay.strict;
    data.table = std::make_shared<const replay::TimeSeriesTable>(replay::ingest_timeseries(
        *sc.replay.timeseries, replay::format_for_path(*sc.replay.timeseries), opts));
  }
  data.jobs = models::scenario_jobs(sc.synthetic);
  data.pv = models::scenario_pv(sc.synthetic);
  data.load = models::scenario_load(sc.synthetic);
  data.load.jobs = data.jobs;
  data.prices = sc.prices();
  if (sc.context_model == "replay") {
    data.records = replay::ingest_context(*sc.replay.context);
  } else if (sc.context_model == "synthetic") {
    data.records = models::records_from_jobs(data.jobs);
  }
  normalize_context_order(data.records);
  return data;
}

forecast::SeriesFunction load_function(const Scenario& sc, const ScenarioData& data) {
  if (sc.load_model == "replay") return channel_function(sc, data, "load_power");
  const auto cfg = data.load;
  return [cfg](Clock t) { return models::synthetic_load_power(cfg, t); };
}

forecast::SeriesFunction pv_function(const Scenario& sc, const ScenarioData& data) {
  if (sc.power_source_model == "replay") return channel_function(sc, data, "pv_power");
  const auto cfg = data.pv;
  return [cfg](Clock t) { return models::synthetic_pv_power(cfg, t); };
}

std::shared_ptr<forecast::EffortEstimator> make_estimator(const Scenario& sc) {
  std::shared_ptr<forecast::EffortEstimator> inner;
  if (sc.forecast.estimator.type == "remote") {
    auto endpoint = forecast::RemoteEndpoint::parse(sc.forecast.estimator.url);
    endpoint.timeout_seconds = sc.forecast.estimator.timeout_seconds;
    inner = std::make_shared<forecast::RemoteEffortEstimator>(endpoint);
  } else {
    inner = std::make_shared<forecast::HeuristicEffortEstimator>();
  }
  return std::make_shared<OwningCachedEstimator>(std::move(inner));
}

forecast::EvaluationData evaluation_data(const Scenario& sc, const ScenarioData& data, Clock from,
                                         Clock to) {
  forecast::EvaluationData ev;
  ev.records = data.records;
  const auto load = load_function(sc, data);
  const std::int64_t step_ticks = sc.step_ticks();
  for (Clock t = from.advance(step_ticks); t <= to; t = t.advance(step_ticks)) {
    ev.times.push_back(t);
    ev.load.push_back(load(t));
  }
  return ev;
}

std::pair<Clock, Clock> training_window(const Scenario& sc) {
  const bool synthetic_load = sc.load_model == "synthetic";
  if (synthetic_load && sc.synthetic.start < sc.start) return {sc.synthetic.start, sc.start};
  return {sc.start, sc.end()};
}

forecast::Predictor train_load_predictor(const Scenario& sc, const ScenarioData& data,
                                         forecast::FeatureFamily family,
                                         forecast::EffortEstimator& estimator) {
  const auto [from, to] = training_window(sc);
  const auto ev = evaluation_data(sc, data, from, to);
  std::vector<forecast::FeatureVector> x;
  x.reserve(ev.times.size());
  for (const auto& t : ev.times) {
    x.push_back(forecast::build_features(context_query(ev.records, t), family, t, estimator));
  }
  return forecast::fit_least_squares(x, ev.load, sc.forecast.split.fit);
}

control::ChargingProblem open_loop_problem(const Scenario& sc, const ScenarioData& data) {
  require_controllable(sc, Strategy::MpcPerfect);
  const auto load = load_function(sc, data);
  const auto pv = pv_function(sc, data);
  const std::int64_t step_ticks = sc.step_ticks();
  const std::size_t n = engine::step_count(sc.total_ticks(), step_ticks);
  if (sc.total_ticks() % step_ticks != 0) {
    throw ConfigError("open-loop plan needs the duration to be a whole number of steps");
  }
  control::ChargingProblem p;
  p.step_seconds = sc.start.ticks_to_seconds(step_ticks);
  p.capacity = sc.battery.capacity;
  p.soc_min = sc.inverter.soc_min;
  p.soc_max = sc.inverter.soc_max;
  p.soc_initial = std::clamp(sc.battery.initial_soc, p.soc_min, p.soc_max);
  p.max_grid_power = planning_grid_limit(sc);
  Clock t = sc.start;
  for (std::size_t k = 0; k < n; ++k) {
    p.prices.push_back(data.prices.price_at(t));
    t = t.advance(step_ticks);
    p.load.push_back(load(t) + sc.inverter.self_power);
    p.pv.push_back(pv(t));
  }
  return p;
}

std::unique_ptr<engine::Simulator> build_simulator(const Scenario& sc, const ScenarioData& data,
                                                   Strategy strategy) {
  const Clock clock = sc.start;
  engine::SimulatorComponents c;

  if (sc.power_source_model == "replay") {
    c.power_source = std::make_unique<replay::ReplayPowerSource>(clock, replay_config(sc, data));
  } else {
    c.power_source = std::make_unique<models::SyntheticPowerSource>(clock, data.pv);
  }
  if (sc.load_model == "replay") {
    c.load = std::make_unique<replay::ReplayLoad>(clock, replay_config(sc, data));
  } else {
    c.load = std::make_unique<models::SyntheticLoad>(clock, data.load);
  }
  if (sc.battery_model == "replay") {
    c.battery = std::make_unique<replay::ReplayBattery>(clock, replay_config(sc, data));
  } else {
    c.battery = std::make_unique<models::BatteryLinear>(clock, sc.battery);
  }
  if (sc.grid_model == "replay") {
    c.grid = std::make_unique<replay::ReplayGrid>(clock, replay_config(sc, data));
  } else {
    models::GridPricedConfig gc;
    gc.active_power_limit = sc.grid_active_power_limit;
    gc.apparent_power_limit = sc.grid_apparent_power_limit;
    gc.prices = data.prices;
    c.grid = std::make_unique<models::GridPriced>(clock, gc);
  }
  if (sc.context_model != "none") {
    c.context = std::make_unique<models::ScriptedContext>(clock, data.records);
  }

  if (strategy == Strategy::Default) {
    if (sc.inverter_model == "replay") {
      c.inverter = std::make_unique<replay::ReplayInverter>(clock, replay_config(sc, data));
    } else {
      c.inverter = std::make_unique<models::InverterPVFirst>(clock, inverter_config(sc));
    }
  } else {
    require_controllable(sc, strategy);
    control::RecedingHorizonConfig rh;
    const double step_s = sc.start.ticks_to_seconds(sc.step_ticks());
    rh.horizon_steps =
        static_cast<std::size_t>(std::max(1.0, std::floor(sc.control.horizon_hours * 3600.0 / step_s + 1e-9)));
    rh.capacity = sc.battery.capacity;
    rh.soc_min = sc.inverter.soc_min;
    rh.soc_max = sc.inverter.soc_max;
    rh.max_grid_power = planning_grid_limit(sc);
    rh.run_end = sc.end();

    std::shared_ptr<control::ForecastProvider> provider;
    if (strategy == Strategy::MpcPerfect) {
      provider = std::make_shared<forecast::FunctionForecast>(load_function(sc, data),
                                                              pv_function(sc, data));
    } else {
      const auto family = strategy == Strategy::MpcContext ? forecast::FeatureFamily::Combined
                                                           : forecast::FeatureFamily::None;
      auto estimator = make_estimator(sc);
      auto predictor = train_load_predictor(sc, data, family, *estimator);
      provider = std::make_shared<forecast::PredictorForecast>(std::move(predictor), data.records,
                                                               pv_function(sc, data), estimator);
    }
    c.inverter = std::make_unique<control::MpcInverter>(clock, inverter_config(sc), rh, data.prices,
                                                        std::move(provider));
  }
  return std::make_unique<engine::Simulator>(clock, std::move(c));
}

}  // namespace cemsim::app
