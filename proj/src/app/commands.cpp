#include "cemsim/app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cemsim/app/emit.hpp"
#include "cemsim/control/charging.hpp"
#include "cemsim/errors.hpp"
#include "cemsim/forecast/evaluation.hpp"
#include "cemsim/forecast/remote.hpp"
#include "cemsim/replay/ingest.hpp"

namespace cemsim::app {

namespace {

using replay::format_double;

std::filesystem::path output_dir(const Scenario& sc, const CommandOptions& options) {
  if (options.out) return *options.out;
  if (sc.output_dir) return *sc.output_dir;
  return "out";
}

// Runs `body` and turns escaping exceptions into an exit code and a message.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

class CostSink final : public engine::StepSink {
 public:
  explicit CostSink(StrategyRun& run) : run_(run) {}
  void consume(const engine::SimulatorStepOutput& s) override {
    run_.step_start_ns.push_back(s.start.epoch_ns());
    run_.step_cost.push_back(s.deltas.cost);
    run_.cumulative_cost.push_back(s.aggregates.cost);
    run_.final_soc = s.battery.soc;
  }

 private:
  StrategyRun& run_;
};

std::string running_cost_csv(const Comparison& cmp) {
  std::ostringstream os;
  os << "step,start_ns";
  for (const auto& r : cmp.runs) os << ',' << to_string(r.strategy);
  os << '\n';
  if (cmp.runs.empty()) return os.str();
  const auto& first = cmp.runs.front();
  for (std::size_t k = 0; k < first.cumulative_cost.size(); ++k) {
    os << k << ',' << first.step_start_ns[k];
    for (const auto& r : cmp.runs) os << ',' << format_double(r.cumulative_cost[k]);
    os << '\n';
  }
  return os.str();
}

std::string savings_csv(const Scenario& sc, const Comparison& cmp) {
  std::ostringstream os;
  os << "day,date";
  for (int h = 0; h < 24; ++h) os << ",h" << (h < 10 ? "0" : "") << h;
  os << '\n';
  for (std::size_t d = 0; d < cmp.savings_by_hour.size(); ++d) {
    const Clock day(sc.start.epoch_ns() + static_cast<std::int64_t>(d) * kNanosPerDay);
    os << d << ',' << format_time(day).substr(0, 10);
    for (double v : cmp.savings_by_hour[d]) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

bool looks_like_context(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    return j.is_object() && j.contains("recorded_at_ns");
  }
  return false;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e)) {
    return kExitConfig;
  }
  return kExitRuntime;
}

const StrategyRun* Comparison::find(Strategy s) const {
  for (const auto& r : runs) {
    if (r.strategy == s) return &r;
  }
  return nullptr;
}

Scenario load_with_overrides(const std::filesystem::path& path, const CommandOptions& options) {
  Scenario sc = load_scenario(path);
  if (options.seed) apply_seed(sc, *options.seed);
  if (options.step_seconds) apply_step_seconds(sc, *options.step_seconds);
  return sc;
}

nlohmann::json run_to_directory(const Scenario& sc, const ScenarioData& data, Strategy strategy,
                                const std::filesystem::path& dir) {
  auto sim = build_simulator(sc, data, strategy);
  std::ostringstream steps;
  StepCsvWriter csv(steps);
  ChannelRecorder channels(sc.replay.subsystem_id, sc.start, sim->last_battery());
  FanoutSink fan({&csv, &channels});
  sim->run(sc.total_ticks(), sc.step_ticks(), fan);

  std::ostringstream channel_csv;
  replay::write_timeseries_csv(channel_csv, channels.table());

  std::vector<ContextRecord> known;
  for (const auto& r : data.records) {
    if (r.recorded_at <= sim->now()) known.push_back(r);
  }
  std::ostringstream context;
  replay::write_context_jsonl(context, known);

  nlohmann::json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["scenario"] = sc.name;
  summary["strategy"] = to_string(strategy);
  summary["seed"] = sc.seed;
  summary["start_ns"] = sc.start.epoch_ns();
  summary["end_ns"] = sim->now().epoch_ns();
  summary["step_seconds"] = sc.start.ticks_to_seconds(sc.step_ticks());
  summary["steps"] = sim->steps_taken();
  summary["aggregates"] = aggregates_json(sim->aggregates());
  summary["maxima"] = maxima_json(sim->maxima());
  summary["final_soc"] = sim->last_battery().soc;
  summary["cost"] = sim->aggregates().cost;

  write_file(dir / "steps.csv", steps.str());
  write_file(dir / "channels.csv", channel_csv.str());
  write_file(dir / "context.jsonl", context.str());
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

Comparison compare_strategies(const Scenario& sc, const ScenarioData& data,
                              const std::vector<Strategy>& strategies, int jobs) {
  Comparison cmp;
  cmp.runs.resize(strategies.size());
  engine::parallel_for_index(strategies.size(), jobs, [&](std::size_t i) {
    auto& run = cmp.runs[i];
    run.strategy = strategies[i];
    auto sim = build_simulator(sc, data, strategies[i]);
    CostSink sink(run);
    sim->run(sc.total_ticks(), sc.step_ticks(), sink);
    run.totals = sim->aggregates();
  });

  if (sc.battery_model == "linear" && sc.inverter_model == "pv_first" &&
      sc.total_ticks() % sc.step_ticks() == 0) {
    try {
      cmp.open_loop_cost = control::solve_charging(open_loop_problem(sc, data)).total_cost;
    } catch (const InfeasibleError& e) {
      spdlog::warn("compare: open-loop plan infeasible: {}", e.what());
    }
  }

  const StrategyRun* base = cmp.find(Strategy::Default);
  const StrategyRun* ctx = cmp.find(Strategy::MpcContext);
  if (base && ctx) {
    cmp.savings_by_hour.assign(static_cast<std::size_t>(sc.run_days()), {});
    std::vector<double> running(cmp.savings_by_hour.size(), 0.0);
    std::vector<int> filled(cmp.savings_by_hour.size(), -1);
    for (std::size_t k = 0; k < base->step_cost.size(); ++k) {
      const std::int64_t off = base->step_start_ns[k] - sc.start.epoch_ns();
      const auto d = static_cast<std::size_t>(off / kNanosPerDay);
      const int h = static_cast<int>(off % kNanosPerDay / kNanosPerHour);
      auto& row = cmp.savings_by_hour[d];
      for (int hh = filled[d] + 1; hh < h; ++hh) row[static_cast<std::size_t>(hh)] = running[d];
      running[d] += base->step_cost[k] - ctx->step_cost[k];
      row[static_cast<std::size_t>(h)] = running[d];
      filled[d] = h;
    }
    for (std::size_t d = 0; d < cmp.savings_by_hour.size(); ++d) {
      for (int hh = filled[d] + 1; hh < 24; ++hh) {
        cmp.savings_by_hour[d][static_cast<std::size_t>(hh)] = running[d];
      }
    }
  }
  return cmp;
}

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  if (options.scenarios.empty()) {
    err << "error: run needs --scenario\n";
    return kExitConfig;
  }
  const std::size_t n = options.scenarios.size();
  std::vector<int> codes(n, kExitOk);
  std::vector<std::string> messages(n);
  engine::parallel_for_index(n, options.jobs, [&](std::size_t i) {
    std::ostringstream local;
    codes[i] = guarded(local, [&] {
      const Scenario sc = load_with_overrides(options.scenarios[i], options);
      const ScenarioData data = prepare_scenario(sc);
      auto dir = output_dir(sc, options);
      if (n > 1) dir /= sc.name;
      const auto summary = run_to_directory(sc, data, Strategy::Default, dir);
      local << sc.name << ": " << summary["steps"].get<std::size_t>() << " steps, cost "
            << format_double(summary["cost"].get<double>()) << ", output " << dir.string() << '\n';
      return kExitOk;
    });
    messages[i] = local.str();
  });
  int code = kExitOk;
  for (std::size_t i = 0; i < n; ++i) {
    (codes[i] == kExitOk ? out : err) << messages[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.scenarios.size() != 1) throw ConfigError("compare needs exactly one --scenario");
    const Scenario sc = load_with_overrides(options.scenarios.front(), options);
    const auto strategies = parse_strategies(options.strategies);
    const ScenarioData data = prepare_scenario(sc);
    const Comparison cmp = compare_strategies(sc, data, strategies, options.jobs);
    const auto dir = output_dir(sc, options);

    nlohmann::json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["scenario"] = sc.name;
    summary["seed"] = sc.seed;
    summary["steps"] = cmp.runs.empty() ? 0 : cmp.runs.front().step_cost.size();
    summary["open_loop_optimum_cost"] =
        cmp.open_loop_cost ? nlohmann::json(*cmp.open_loop_cost) : nlohmann::json(nullptr);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : cmp.runs) {
      runs.push_back({{"strategy", to_string(r.strategy)},
                      {"aggregates", aggregates_json(r.totals)},
                      {"final_soc", r.final_soc}});
      out << to_string(r.strategy) << ": cost " << format_double(r.totals.cost) << '\n';
    }
    summary["strategies"] = runs;

    write_file(dir / "running_cost.csv", running_cost_csv(cmp));
    if (!cmp.savings_by_hour.empty()) write_file(dir / "savings_by_hour.csv", savings_csv(sc, cmp));
    if (cmp.open_loop_cost) {
      std::ostringstream plan;
      control::write_plan_csv(plan, control::solve_charging(open_loop_problem(sc, data)));
      write_file(dir / "open_loop_plan.csv", plan.str());
    }
    write_file(dir / "compare_summary.json", summary.dump(2) + "\n");
    return kExitOk;
  });
}

int cmd_forecast_eval(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.scenarios.size() != 1) {
      throw ConfigError("forecast-eval needs exactly one --scenario");
    }
    const Scenario sc = load_with_overrides(options.scenarios.front(), options);
    const auto families = options.families.empty()
                              ? sc.forecast.families
                              : forecast::parse_feature_families(options.families);
    const ScenarioData data = prepare_scenario(sc);
    const Clock from = std::min(sc.synthetic.start, sc.start);
    const auto ev = evaluation_data(sc, data, sc.load_model == "synthetic" ? from : sc.start, sc.end());
    auto estimator = make_estimator(sc);
    const auto results = forecast::evaluate_families(ev, sc.forecast.split, families, *estimator);

    std::ostringstream csv;
    forecast::write_evaluation_csv(csv, results);
    nlohmann::json predictors = nlohmann::json::array();
    for (const auto& r : results) {
      predictors.push_back(r.predictor.to_json());
      out << forecast::to_string(r.family) << ": mean test RMSE "
          << format_double(r.mean_test_rmse()) << " W\n";
    }
    const auto dir = output_dir(sc, options);
    write_file(dir / "forecast_eval.csv", csv.str());
    write_file(dir / "predictors.json", predictors.dump(2) + "\n");
    return kExitOk;
  });
}

int cmd_validate(const std::vector<std::filesystem::path>& files, bool strict, std::ostream& out,
                 std::ostream& err) {
  if (files.empty()) {
    err << "error: validate needs at least one file\n";
    return kExitConfig;
  }
  bool all_ok = true;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      out << "FAIL " << path.string() << "\n  cannot open file\n";
      all_ok = false;
      continue;
    }
    std::vector<replay::Diagnostic> errors;
    std::vector<replay::Diagnostic> warnings;
    std::string kind;
    if (replay::format_for_path(path) == replay::TimeSeriesFormat::JsonLines &&
        looks_like_context(path)) {
      kind = "context";
      auto result = replay::read_context(in);
      errors = std::move(result.errors);
    } else {
      kind = "timeseries";
      replay::IngestOptions opts;
      opts.strict = strict;
      auto result = replay::read_timeseries(in, replay::format_for_path(path), opts);
      errors = std::move(result.errors);
      warnings = std::move(result.warnings);
    }
    out << (errors.empty() ? "PASS " : "FAIL ") << path.string() << " (" << kind << ")\n";
    for (const auto& d : errors) out << "  " << d.message << '\n';
    for (const auto& d : warnings) out << "  warning: " << d.message << '\n';
    all_ok = all_ok && errors.empty();
  }
  return all_ok ? kExitOk : kExitConfig;
}

}  // namespace cemsim::app
