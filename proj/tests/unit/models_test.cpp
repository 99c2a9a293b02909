#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cemsim/errors.hpp"
#include "cemsim/models/battery_linear.hpp"
#include "cemsim/models/grid_priced.hpp"
#include "cemsim/models/inverter_pv_first.hpp"
#include "cemsim/models/synthetic.hpp"
#include "oracles/battery_oracle.hpp"

using namespace cemsim;
using namespace cemsim::models;

namespace {

constexpr std::int64_t kSec = Clock::kNanosPerSecond;
const Clock kMidnight(1'753'660'800LL * kSec);  // 2025-07-28T00:00:00Z

BatteryLinearConfig small_battery(double initial_soc) {
  BatteryLinearConfig c;
  c.capacity = 3.6e6;
  c.nominal_voltage = 50.0;
  c.eta_charge = 0.9;
  c.eta_discharge = 0.9;
  c.initial_soc = initial_soc;
  return c;
}

InverterStepInput inverter_input(double pv, double load, double soc, double voltage = 50.0) {
  InverterStepInput in;
  in.power_source.power = pv;
  in.load.requested_active_power = load;
  in.load.requested_apparent_power = load;
  in.battery.soc = soc;
  in.battery.voltage = voltage;
  return in;
}

InverterPVFirstConfig soc_window(double lo, double hi) {
  InverterPVFirstConfig c;
  c.soc_min = lo;
  c.soc_max = hi;
  return c;
}

}  // namespace

TEST_CASE("linear battery examples") {
  SUBCASE("idle") {
    BatteryLinear b(Clock(0), small_battery(0.5));
    const auto r = b.step(120, {BatteryMode::Idle, 42.0});
    CHECK(r.soc == 0.5);
    CHECK(r.delta_energy == 0.0);
    CHECK(r.delta_charge == 0.0);
    CHECK(r.voltage == 50.0);
  }
  SUBCASE("charge from empty") {
    BatteryLinear b(Clock(0), small_battery(0.0));
    const auto r = b.step(3600, {BatteryMode::Charge, 10.0});
    CHECK(r.delta_energy == doctest::Approx(1.62e6).epsilon(1e-12));
    CHECK(r.soc == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(r.delta_charge == doctest::Approx(1.62e6 / 50.0).epsilon(1e-12));
  }
  SUBCASE("charge clamps at capacity") {
    BatteryLinear b(Clock(0), small_battery(0.9));
    const auto r = b.step(3600, {BatteryMode::Charge, 10.0});
    CHECK(r.soc == 1.0);
    CHECK(b.energy() == 3.6e6);
    CHECK(r.delta_energy == doctest::Approx(3.6e5).epsilon(1e-12));
  }
  SUBCASE("discharge from full") {
    BatteryLinear b(Clock(0), small_battery(1.0));
    const auto r = b.step(3600, {BatteryMode::Discharge, 10.0});
    CHECK(r.delta_energy == doctest::Approx(-2.0e6).epsilon(1e-12));
    CHECK(r.soc == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(r.delta_charge < 0.0);
  }
}

TEST_CASE("linear battery rejects bad configs") {
  auto c = small_battery(0.5);
  c.capacity = 0.0;
  CHECK_THROWS_AS(BatteryLinear(Clock(0), c), ConfigError);
  c = small_battery(1.5);
  CHECK_THROWS_AS(BatteryLinear(Clock(0), c), ConfigError);
  c = small_battery(0.5);
  c.eta_discharge = 0.0;
  CHECK_THROWS_AS(BatteryLinear(Clock(0), c), ConfigError);
}

TEST_CASE("linear battery matches the long double update on random steps") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto cfg = small_battery(0.5);
  cfg.eta_charge = 0.93;
  cfg.eta_discharge = 0.87;
  BatteryLinear b(Clock(0), cfg);
  for (int i = 0; i < 2000; ++i) {
    const auto mode = static_cast<BatteryMode>(rng() % 3);
    const double current = 40.0 * u(rng);
    const std::int64_t ticks = 1 + static_cast<std::int64_t>(rng() % 600);
    const double before = b.energy();
    const auto r = b.step(ticks, {mode, current});
    const long double raw = oracles::linear_battery_delta(
        mode, static_cast<long double>(ticks), 50.0L, current, 0.93L, 0.87L);
    const long double expected =
        std::clamp(static_cast<long double>(before) + raw, 0.0L, 3.6e6L) - before;
    CHECK(std::fabs(static_cast<double>(expected) - r.delta_energy) <=
          1e-12 * std::max(1.0, std::fabs(static_cast<double>(raw))) + 1e-9);
    CHECK(r.soc >= 0.0);
    CHECK(r.soc <= 1.0);
    if (mode == BatteryMode::Idle) CHECK(r.delta_energy == 0.0);
    if (r.delta_energy != 0.0) CHECK((r.delta_energy > 0) == (r.delta_charge > 0));
  }
}

TEST_CASE("lossless charge then discharge restores energy exactly") {
  auto cfg = small_battery(0.5);
  cfg.eta_charge = cfg.eta_discharge = 1.0;
  BatteryLinear b(Clock(0), cfg);
  const double e0 = b.energy();
  b.step(60, {BatteryMode::Charge, 7.25});
  b.step(60, {BatteryMode::Discharge, 7.25});
  CHECK(b.energy() == e0);
}

TEST_CASE("round-trip efficiency is eta squared") {
  auto cfg = small_battery(0.5);
  const double eta = 0.9;
  BatteryLinear b(Clock(0), cfg);
  const double source = 60.0 * 50.0 * 5.0;  // J drawn from the source side
  const auto in = b.step(60, {BatteryMode::Charge, 5.0});
  // Discharge exactly what was stored; the load receives stored * eta.
  const double current = in.delta_energy * eta / (60.0 * 50.0);
  const auto out = b.step(60, {BatteryMode::Discharge, current});
  const double at_load = -out.delta_energy * eta;
  CHECK(at_load / source == doctest::Approx(eta * eta).epsilon(1e-12));
}

TEST_CASE("pv-first inverter examples") {
  const auto cfg = soc_window(0.1, 0.9);
  SUBCASE("exact balance") {
    const auto r = inverter_pv_first_dispatch(cfg, 120, inverter_input(300, 300, 0.5));
    CHECK(r.grid.requested_active_power == 0.0);
    CHECK(r.battery.mode == BatteryMode::Idle);
    CHECK(r.pv_power_drawn == 300.0);
  }
  SUBCASE("surplus charges") {
    const auto r = inverter_pv_first_dispatch(cfg, 120, inverter_input(500, 300, 0.5));
    CHECK(r.battery.mode == BatteryMode::Charge);
    CHECK(r.battery.current * 50.0 == doctest::Approx(200.0));
    CHECK(r.grid.requested_active_power == 0.0);
    CHECK(r.pv_power_drawn == 500.0);
  }
  SUBCASE("empty battery falls through to the grid") {
    const auto r = inverter_pv_first_dispatch(cfg, 120, inverter_input(0, 400, 0.1));
    CHECK(r.grid.requested_active_power == 400.0);
    CHECK(r.battery.mode == BatteryMode::Idle);
  }
  SUBCASE("discharge through efficiency") {
    auto lossy = cfg;
    lossy.eta_batt_to_load = 0.9;
    const auto r = inverter_pv_first_dispatch(lossy, 120, inverter_input(0, 180, 0.5));
    CHECK(r.battery.mode == BatteryMode::Discharge);
    CHECK(r.battery.current * 50.0 == doctest::Approx(200.0));
    CHECK(r.grid.requested_active_power == doctest::Approx(0.0));
  }
  SUBCASE("grid to battery directive") {
    auto in = inverter_input(0, 0, 0.5);
    in.directive = GridDirective{300.0, 0.0};
    const auto r = inverter_pv_first_dispatch(cfg, 120, in);
    CHECK(r.grid.requested_active_power == 300.0);
    CHECK(r.battery.mode == BatteryMode::Charge);
    CHECK(r.battery.current * 50.0 == doctest::Approx(300.0));
  }
  SUBCASE("directive suppresses discharge") {
    auto in = inverter_input(0, 400, 0.5);
    in.directive = GridDirective{100.0, 0.0};
    const auto r = inverter_pv_first_dispatch(cfg, 120, in);
    CHECK(r.battery.mode == BatteryMode::Charge);
    CHECK(r.grid.requested_active_power == doctest::Approx(500.0));
  }
  SUBCASE("grid to load is served before the battery") {
    auto in = inverter_input(0, 400, 0.5);
    in.directive = GridDirective{0.0, 150.0};
    const auto r = inverter_pv_first_dispatch(cfg, 120, in);
    CHECK(r.battery.mode == BatteryMode::Discharge);
    CHECK(r.battery.current * 50.0 == doctest::Approx(250.0));
    CHECK(r.grid.requested_active_power == doctest::Approx(150.0));
  }
  SUBCASE("self power adds to demand") {
    auto sp = cfg;
    sp.self_power = 25.0;
    const auto r = inverter_pv_first_dispatch(sp, 120, inverter_input(0, 100, 0.1));
    CHECK(r.grid.requested_active_power == 125.0);
  }
  SUBCASE("charge cap") {
    auto capped = cfg;
    capped.max_charge_power = 50.0;
    const auto r = inverter_pv_first_dispatch(capped, 120, inverter_input(500, 300, 0.5));
    CHECK(r.battery.current * 50.0 == doctest::Approx(50.0));
    CHECK(r.pv_power_drawn == doctest::Approx(350.0));
  }
  SUBCASE("storage limits stop at soc_max") {
    auto lim = cfg;
    lim.storage = StorageLimits{3.6e6, 1.0, 1.0};
    // 0.01 of 3.6e6 J over 120 s is 300 W of room.
    const auto r = inverter_pv_first_dispatch(lim, 120, inverter_input(1000, 0, 0.89));
    CHECK(r.battery.current * 50.0 == doctest::Approx(300.0));
  }
}

TEST_CASE("pv-first inverter invariants on random states") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto cfg = soc_window(0.1, 0.9);
  for (int i = 0; i < 2000; ++i) {
    auto in = inverter_input(2000 * u(rng), 2000 * u(rng), u(rng));
    if (i % 3 == 0) in.directive = GridDirective{500 * u(rng), 500 * u(rng)};
    const auto r = inverter_pv_first_dispatch(cfg, 60, in);
    CHECK(r.pv_power_drawn <= in.power_source.power);
    const double battery_power = r.battery.current * in.battery.voltage;
    const double discharge = r.battery.mode == BatteryMode::Discharge ? battery_power : 0.0;
    const double served =
        std::min(r.pv_power_drawn, in.power_source.power) + r.grid.requested_active_power + discharge -
        (r.battery.mode == BatteryMode::Charge ? battery_power : 0.0);
    CHECK(in.load.requested_active_power <= served + 1e-6 * std::max(1.0, served));
    CHECK(r.grid.requested_apparent_power >= r.grid.requested_active_power);
    if (!in.directive && in.power_source.power >= in.load.requested_active_power) {
      CHECK(r.grid.requested_active_power == 0.0);
    }
  }
}

TEST_CASE("priced grid examples") {
  const auto prices = PriceSchedule::flat(Clock(0), 0.5);
  SUBCASE("one kilowatt for an hour") {
    const auto r = grid_priced_settle({std::nullopt, std::nullopt, prices}, 3600, Clock(0),
                                      {1000, 1000});
    CHECK(r.billing->cost == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(r.billing->violation);
  }
  SUBCASE("nothing drawn") {
    const auto r = grid_priced_settle({std::nullopt, std::nullopt, prices}, 3600, Clock(0), {0, 0});
    CHECK(r.billing->cost == 0.0);
    CHECK_FALSE(r.billing->violation);
  }
  SUBCASE("limit clamps and flags") {
    const auto r = grid_priced_settle({500.0, std::nullopt, prices}, 3600, Clock(0), {800, 800});
    CHECK(r.delivered_active_power == 500.0);
    CHECK(r.billing->violation);
    CHECK(r.billing->cost == doctest::Approx(0.25));
    CHECK(r.delivered_apparent_power >= r.delivered_active_power);
  }
  SUBCASE("price lookup before the schedule") {
    const auto late = PriceSchedule::flat(Clock(100 * kSec), 0.5);
    CHECK_THROWS_AS(grid_priced_settle({std::nullopt, std::nullopt, late}, 60, Clock(0), {1, 1}),
                    ConfigError);
  }
}

TEST_CASE("priced grid cost is linear in power and duration") {
  const auto prices = PriceSchedule::flat(Clock(0), 0.37);
  const GridPricedConfig cfg{std::nullopt, std::nullopt, prices};
  const double base = grid_priced_settle(cfg, 60, Clock(0), {250, 250}).billing->cost;
  CHECK(grid_priced_settle(cfg, 60, Clock(0), {1000, 1000}).billing->cost ==
        doctest::Approx(4 * base).epsilon(1e-14));
  CHECK(grid_priced_settle(cfg, 240, Clock(0), {250, 250}).billing->cost ==
        doctest::Approx(4 * base).epsilon(1e-14));
}

TEST_CASE("grid prices the step at its start") {
  const PriceSchedule prices({{Clock(0), 0.1}, {Clock(3600 * kSec), 0.4}});
  GridPriced g(Clock(0), {std::nullopt, std::nullopt, prices});
  CHECK(g.step(3600, {1000, 1000}).billing->cost == doctest::Approx(0.1));
  CHECK(g.step(3600, {1000, 1000}).billing->cost == doctest::Approx(0.4));
}

TEST_CASE("two-tier schedule") {
  const auto p = PriceSchedule::two_tier(kMidnight, 2, 0.1, 0.4, 7, 22);
  CHECK(p.price_at(kMidnight) == 0.1);
  CHECK(p.price_at(Clock(kMidnight.epoch_ns() + 7 * 3600 * kSec)) == 0.4);
  CHECK(p.price_at(Clock(kMidnight.epoch_ns() + 22 * 3600 * kSec - 1)) == 0.4);
  CHECK(p.price_at(Clock(kMidnight.epoch_ns() + 22 * 3600 * kSec)) == 0.1);
  CHECK(p.price_at(Clock(kMidnight.epoch_ns() + 31 * 3600 * kSec)) == 0.4);
  CHECK_THROWS_AS(PriceSchedule({{Clock(10), 0.1}, {Clock(10), 0.2}}), ConfigError);
  CHECK_THROWS_AS(PriceSchedule({{Clock(10), -0.1}}), ConfigError);
}

TEST_CASE("synthetic pv") {
  SyntheticPvConfig cfg;
  cfg.peak_power = 1234.0;
  CHECK(synthetic_pv_power(cfg, kMidnight) == 0.0);
  CHECK(synthetic_pv_power(cfg, Clock(kMidnight.epoch_ns() + 12 * 3600 * kSec)) ==
        doctest::Approx(1234.0).epsilon(1e-12));
  cfg.noise_amplitude = 0.3;
  cfg.seed = 9;
  SyntheticPowerSource a(kMidnight, cfg), b(kMidnight, cfg);
  for (int i = 0; i < 720; ++i) {
    const auto ra = a.step(120);
    const auto rb = b.step(120);
    CHECK(ra.power == rb.power);
    CHECK(ra.power >= 0.0);
  }
}

TEST_CASE("synthetic load") {
  SyntheticLoadConfig cfg;
  cfg.base_load = 100.0;
  CHECK(synthetic_load_power(cfg, kMidnight) == 100.0);

  JobEvent job;
  job.begins_at = Clock(kMidnight.epoch_ns() + 3600 * kSec);
  job.ends_at = Clock(kMidnight.epoch_ns() + 2 * 3600 * kSec);
  job.true_effort = 4.0;
  job.watts_per_effort = 50.0;
  cfg.jobs = {job};
  CHECK(synthetic_load_power(cfg, job.begins_at) == 300.0);
  CHECK(synthetic_load_power(cfg, job.ends_at) == 100.0);

  SyntheticLoad load(Clock(job.ends_at.epoch_ns() - 120 * kSec), cfg);
  CHECK(load.step(60).requested_active_power == 300.0);
  const auto after = load.step(60);
  CHECK(after.requested_active_power == 100.0);
  CHECK(after.requested_apparent_power == after.requested_active_power);
}

TEST_CASE("job records are announced ahead and queried like any context") {
  SyntheticScenarioConfig sc;
  sc.seed = 4;
  sc.start = kMidnight;
  sc.day_count = 5;
  sc.generator = JobGeneratorConfig{};
  const auto jobs = scenario_jobs(sc);
  REQUIRE_FALSE(jobs.empty());
  CHECK(scenario_jobs(sc).size() == jobs.size());
  const auto records = records_from_jobs(jobs);
  REQUIRE(records.size() == jobs.size());
  std::vector<std::pair<std::int64_t, std::string>> from_jobs;
  std::vector<std::pair<std::int64_t, std::string>> from_records;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK(records[i].recorded_at < records[i].begins_at);
    from_jobs.emplace_back(jobs[i].begins_at.epoch_ns(), jobs[i].description);
    from_records.emplace_back(records[i].begins_at.epoch_ns(), records[i].text());
  }
  std::sort(from_jobs.begin(), from_jobs.end());
  std::sort(from_records.begin(), from_records.end());
  CHECK(from_jobs == from_records);
  ScriptedContext ctx(kMidnight, records);
  for (int i = 0; i < 24 * 5; ++i) {
    const auto got = ctx.step(3600);
    CHECK(got == context_query(records, ctx.now()));
  }
}
