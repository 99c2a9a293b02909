// Serial reference vs OpenMP kernel on a batch of independent one-day runs.

#include <benchmark/benchmark.h>

#include <vector>

#include "cemsim/engine/batch.hpp"
#include "cemsim/models/battery_linear.hpp"
#include "cemsim/models/grid_priced.hpp"
#include "cemsim/models/inverter_pv_first.hpp"
#include "cemsim/models/synthetic.hpp"

namespace {

using namespace cemsim;

constexpr std::int64_t kDayTicks = 86400;
constexpr std::int64_t kStepTicks = 60;

std::vector<engine::BatchItem> make_batch(int count) {
  std::vector<engine::BatchItem> items;
  for (int i = 0; i < count; ++i) {
    engine::BatchItem item;
    item.total_ticks = kDayTicks;
    item.step_ticks = kStepTicks;
    item.make = [i] {
      const Clock clock(1'753'747'200LL * Clock::kNanosPerSecond);
      models::SyntheticScenarioConfig sc;
      sc.seed = static_cast<std::uint64_t>(i);
      sc.start = clock;
      sc.pv_noise_amplitude = 0.2;
      sc.load_noise_amplitude = 0.1;
      sc.generator = models::JobGeneratorConfig{};
      auto load = models::scenario_load(sc);
      load.jobs = models::scenario_jobs(sc);

      engine::SimulatorComponents c;
      c.power_source = std::make_unique<models::SyntheticPowerSource>(clock, models::scenario_pv(sc));
      c.load = std::make_unique<models::SyntheticLoad>(clock, load);
      c.battery = std::make_unique<models::BatteryLinear>(clock, models::BatteryLinearConfig{});
      c.inverter = std::make_unique<models::InverterPVFirst>(clock, models::InverterPVFirstConfig{});
      c.grid = std::make_unique<models::GridPriced>(
          clock, models::GridPricedConfig{std::nullopt, std::nullopt, models::scenario_prices(sc)});
      return std::make_unique<engine::Simulator>(clock, std::move(c));
    };
    items.push_back(std::move(item));
  }
  return items;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto items = make_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(engine::run_batch_serial(items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto items = make_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(engine::run_batch_parallel(items, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = engine::effective_jobs(0);
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
