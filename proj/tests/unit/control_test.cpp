#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cemsim/control/charging.hpp"
#include "cemsim/control/mpc.hpp"
#include "cemsim/engine/simulator.hpp"
#include "cemsim/errors.hpp"
#include "cemsim/forecast/providers.hpp"
#include "cemsim/models/battery_linear.hpp"
#include "cemsim/models/synthetic.hpp"
#include "oracles/charging_oracle.hpp"

using namespace cemsim;
using namespace cemsim::control;

namespace {

constexpr std::int64_t kSec = Clock::kNanosPerSecond;
constexpr double kKwh = 3.6e6;
const Clock kStart(1'753'660'800LL * kSec);

// One energy unit is 1 kWh over 1 h steps, so price * units is the cost.
ChargingProblem from_units(const oracles::IntegerChargingInstance& in) {
  ChargingProblem p;
  p.step_seconds = 3600.0;
  p.prices = in.prices;
  for (int v : in.load) p.load.push_back(1000.0 * v);
  for (int v : in.pv) p.pv.push_back(1000.0 * v);
  p.capacity = kKwh * std::max(1, in.headroom) * 2.0;
  p.soc_min = 0.25;
  p.soc_max = p.soc_min + in.headroom * kKwh / p.capacity;
  p.soc_initial = p.soc_min + in.initial_level * kKwh / p.capacity;
  if (in.grid_cap) p.max_grid_power = 1000.0 * *in.grid_cap;
  return p;
}

oracles::IntegerChargingInstance random_instance(std::mt19937_64& rng) {
  oracles::IntegerChargingInstance in;
  const std::size_t n = 1 + rng() % 8;
  for (std::size_t t = 0; t < n; ++t) {
    in.prices.push_back(0.1 * static_cast<double>(rng() % 6));
    in.load.push_back(static_cast<int>(rng() % 4));
    in.pv.push_back(rng() % 3 == 0 ? static_cast<int>(rng() % 4) : 0);
  }
  in.headroom = static_cast<int>(rng() % 6);
  in.initial_level = in.headroom == 0 ? 0 : static_cast<int>(rng() % (in.headroom + 1));
  if (rng() % 2 == 0) in.grid_cap = 2 + static_cast<int>(rng() % 3);
  return in;
}

void check_feasible(const ChargingProblem& p, const ChargingPlan& plan) {
  const double dt = p.step_seconds;
  REQUIRE(plan.soc.size() == p.steps() + 1);
  CHECK(plan.soc[0] == doctest::Approx(p.soc_initial).epsilon(1e-12));
  for (std::size_t t = 0; t < p.steps(); ++t) {
    CHECK(plan.grid_power[t] >= 0.0);
    if (p.max_grid_power) CHECK(plan.grid_power[t] <= *p.max_grid_power * (1 + 1e-12));
    CHECK(plan.pv_curtailed[t] >= 0.0);
    CHECK(plan.pv_curtailed[t] <= p.pv[t] * (1 + 1e-12) + 1e-9);
    const double used = p.pv[t] - plan.pv_curtailed[t];
    const double expected =
        plan.soc[t] + dt / p.capacity * (used + plan.grid_power[t] - p.load[t]);
    CHECK(plan.soc[t + 1] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    CHECK(plan.soc[t + 1] >= p.soc_min - 1e-9);
    CHECK(plan.soc[t + 1] <= p.soc_max + 1e-9);
  }
}

ChargingProblem two_step(std::vector<double> prices) {
  ChargingProblem p;
  p.step_seconds = 3600.0;
  p.prices = std::move(prices);
  p.load = {0.0, 1000.0};
  p.pv = {0.0, 0.0};
  p.capacity = 10 * kKwh;
  p.soc_min = 0.1;
  p.soc_max = 1.0;
  p.soc_initial = 0.1;
  return p;
}

}  // namespace

TEST_CASE("charging examples") {
  SUBCASE("buy early when cheaper") {
    const auto plan = solve_charging(two_step({0.1, 1.0}));
    CHECK(plan.total_cost == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(plan.grid_power[0] == doctest::Approx(1000.0));
    CHECK(plan.grid_power[1] == doctest::Approx(0.0));
  }
  SUBCASE("flat prices buy at need") {
    const auto plan = solve_charging(two_step({0.5, 0.5}));
    CHECK(plan.total_cost == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(plan.grid_power[0] == 0.0);
    CHECK(plan.grid_power[1] == doctest::Approx(1000.0));
  }
  SUBCASE("limited headroom splits the purchase") {
    auto p = two_step({0.1, 1.0});
    p.capacity = kKwh;
    p.soc_min = 0.0;
    p.soc_max = 0.5;
    p.soc_initial = 0.0;
    const auto plan = solve_charging(p);
    CHECK(plan.grid_power[0] == doctest::Approx(500.0));
    CHECK(plan.grid_power[1] == doctest::Approx(500.0));
    CHECK(plan.total_cost == doctest::Approx(0.55).epsilon(1e-12));
    check_feasible(p, plan);
  }
  SUBCASE("nothing to buy") {
    auto p = two_step({0.3, 0.7});
    p.load = {0.0, 0.0};
    const auto plan = solve_charging(p);
    CHECK(plan.total_cost == 0.0);
    CHECK(plan.purchased_energy == 0.0);
  }
  SUBCASE("surplus pv is stored for later") {
    auto p = two_step({0.1, 1.0});
    p.pv = {600.0, 0.0};
    const auto plan = solve_charging(p);
    CHECK(plan.grid_power[0] == doctest::Approx(400.0));
    CHECK(plan.total_cost == doctest::Approx(0.04).epsilon(1e-12));
  }
  SUBCASE("pv beyond the headroom is curtailed") {
    auto p = two_step({0.1, 1.0});
    p.capacity = kKwh;
    p.soc_min = 0.0;
    p.soc_max = 0.5;
    p.soc_initial = 0.0;
    p.pv = {2000.0, 0.0};
    p.load = {0.0, 0.0};
    const auto plan = solve_charging(p);
    CHECK(plan.pv_curtailed[0] == doctest::Approx(1500.0));
    CHECK(plan.soc[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("charging infeasibility names the step") {
  auto p = two_step({0.1, 1.0});
  p.load = {0.0, 5000.0};
  p.max_grid_power = 1000.0;
  p.capacity = kKwh;
  p.soc_min = 0.0;
  p.soc_max = 0.5;
  p.soc_initial = 0.0;
  try {
    solve_charging(p);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("charging input validation") {
  auto p = two_step({0.1, 1.0});
  p.load = {1.0};
  CHECK_THROWS_AS(solve_charging(p), DomainError);
  p = two_step({0.1, -1.0});
  CHECK_THROWS_AS(solve_charging(p), DomainError);
  p = two_step({0.1, 1.0});
  p.soc_initial = 0.05;
  CHECK_THROWS_AS(solve_charging(p), DomainError);
}

TEST_CASE("charging matches the exhaustive oracle") {
  std::mt19937_64 rng(2024);
  int feasible = 0;
  for (int i = 0; i < 400; ++i) {
    const auto inst = random_instance(rng);
    const auto problem = from_units(inst);
    const auto oracle = oracles::brute_force_charging(inst);
    if (!oracle.feasible) {
      CHECK_THROWS_AS(solve_charging(problem), InfeasibleError);
      continue;
    }
    ++feasible;
    const auto plan = solve_charging(problem);
    CHECK(plan.total_cost == doctest::Approx(oracle.cost).epsilon(1e-6).scale(1.0));
    CHECK(plan.purchased_energy / kKwh == doctest::Approx(oracle.purchased).epsilon(1e-9));
    check_feasible(problem, plan);
  }
  CHECK(feasible > 200);
}

TEST_CASE("scaling prices scales cost and keeps the plan") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_instance(rng);
    if (!oracles::brute_force_charging(inst).feasible) continue;
    auto p = from_units(inst);
    const auto base = solve_charging(p);
    for (double& x : p.prices) x *= 2.5;
    const auto scaled = solve_charging(p);
    CHECK(scaled.grid_power == base.grid_power);
    CHECK(scaled.total_cost == doctest::Approx(2.5 * base.total_cost).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("marginal prices") {
  const auto plan = solve_charging(two_step({0.1, 1.0}));
  CHECK(plan.marginal_price[0] == doctest::Approx(0.1));
  CHECK(plan.marginal_price[1] == doctest::Approx(0.1));
  std::ostringstream csv;
  write_plan_csv(csv, plan);
  CHECK(csv.str().rfind("step,grid_power_w,pv_curtailed_w,soc,marginal_price\n", 0) == 0);
}

TEST_CASE("receding horizon of one step buys the current deficit") {
  RecedingHorizonConfig cfg;
  cfg.horizon_steps = 1;
  cfg.capacity = kKwh;
  cfg.soc_min = 0.1;
  cfg.soc_max = 0.9;
  const auto d = receding_horizon_step(cfg, 120.0, 0.1, {{500.0}, {100.0}}, {0.3});
  REQUIRE(d.directive);
  CHECK(d.directive->grid_to_load_power == doctest::Approx(400.0));
  CHECK(d.directive->grid_to_battery_power == 0.0);
}

TEST_CASE("receding horizon splits a cheap purchase into load and battery") {
  RecedingHorizonConfig cfg;
  cfg.capacity = 10 * kKwh;
  cfg.soc_min = 0.1;
  cfg.soc_max = 0.9;
  const auto d =
      receding_horizon_step(cfg, 3600.0, 0.1, {{200.0, 1000.0}, {0.0, 0.0}}, {0.1, 1.0});
  REQUIRE(d.directive);
  CHECK(d.directive->grid_to_load_power == doctest::Approx(200.0));
  CHECK(d.directive->grid_to_battery_power == doctest::Approx(1000.0));
  CHECK(d.window_steps == 2);
}

TEST_CASE("infeasible windows fall back without a directive") {
  RecedingHorizonConfig cfg;
  cfg.capacity = kKwh;
  cfg.soc_min = 0.1;
  cfg.soc_max = 0.9;
  cfg.max_grid_power = 100.0;
  const auto d = receding_horizon_step(cfg, 120.0, 0.1, {{500.0}, {0.0}}, {0.3});
  CHECK_FALSE(d.directive);
}

TEST_CASE("window length stops at the run end") {
  RecedingHorizonConfig cfg;
  cfg.horizon_steps = 10;
  cfg.run_end = kStart.advance(600);
  CHECK(window_steps(cfg, kStart, 120) == 5);
  CHECK(window_steps(cfg, kStart.advance(540), 120) == 1);
  cfg.run_end.reset();
  CHECK(window_steps(cfg, kStart, 120) == 10);
}

TEST_CASE("a downward forecast revision shrinks later purchases") {
  // A long job that ends early (the reboot pattern): load drops after step 6.
  ChargingProblem original;
  original.step_seconds = 3600.0;
  original.capacity = 8 * kKwh;
  original.soc_min = 0.1;
  original.soc_max = 0.9;
  original.soc_initial = 0.1;
  for (int t = 0; t < 12; ++t) {
    original.prices.push_back(t < 4 ? 0.1 : 0.4);
    original.load.push_back(t < 3 ? 200.0 : 1500.0);
    original.pv.push_back(0.0);
  }
  ChargingProblem revised = original;
  for (int t = 6; t < 12; ++t) revised.load[t] = 200.0;
  const auto a = solve_charging(original);
  const auto b = solve_charging(revised);
  CHECK(b.purchased_energy < a.purchased_energy);
  CHECK(b.total_cost < a.total_cost);
  double after_a = 0.0, after_b = 0.0;
  for (int t = 0; t < 12; ++t) {
    CHECK(b.grid_power[t] <= a.grid_power[t] + 1e-9);
    if (t >= 6) {
      after_a += a.grid_power[t];
      after_b += b.grid_power[t];
    }
  }
  CHECK(after_b < after_a);
}

namespace {

struct MpcRun {
  double cost = 0.0;
  double purchased_wh = 0.0;
  std::size_t fallbacks = 0;
  double max_grid_to_battery = 0.0;
};

// One synthetic day with a lossless battery, perfect forecasts and a
// PV-first inverter bounded by the same SOC window as the plan.
struct PerfectDay {
  models::SyntheticPvConfig pv;
  models::SyntheticLoadConfig load;
  models::PriceSchedule prices;
  models::BatteryLinearConfig battery;
  models::InverterPVFirstConfig inverter;
  std::int64_t step = 300;
  std::int64_t total = 86400;

  explicit PerfectDay(std::uint64_t seed, double price_scale = 1.0) {
    models::SyntheticScenarioConfig sc;
    sc.seed = seed;
    sc.start = kStart;
    sc.pv_peak_power = 1500;
    sc.pv_noise_amplitude = 0.2;
    sc.base_load = 500;
    sc.load_noise_amplitude = 0.1;
    sc.generator = models::JobGeneratorConfig{};
    pv = models::scenario_pv(sc);
    load = models::scenario_load(sc);
    load.jobs = models::scenario_jobs(sc);
    prices = models::scenario_prices(sc).scaled(price_scale);
    battery.capacity = 1.8e7;
    battery.eta_charge = battery.eta_discharge = 1.0;
    battery.initial_soc = 0.15;
    inverter.soc_min = 0.1;
    inverter.soc_max = 0.9;
    inverter.storage = models::StorageLimits{battery.capacity, 1.0, 1.0};
  }

  ChargingProblem open_loop() const {
    ChargingProblem p;
    p.step_seconds = static_cast<double>(step);
    p.capacity = battery.capacity;
    p.soc_min = inverter.soc_min;
    p.soc_max = inverter.soc_max;
    p.soc_initial = battery.initial_soc;
    for (Clock t = kStart; t < kStart.advance(total);) {
      p.prices.push_back(prices.price_at(t));
      t = t.advance(step);
      p.load.push_back(models::synthetic_load_power(load, t));
      p.pv.push_back(models::synthetic_pv_power(pv, t));
    }
    return p;
  }

  MpcRun run(bool mpc) const {
    engine::SimulatorComponents c;
    c.power_source = std::make_unique<models::SyntheticPowerSource>(kStart, pv);
    c.load = std::make_unique<models::SyntheticLoad>(kStart, load);
    c.battery = std::make_unique<models::BatteryLinear>(kStart, battery);
    c.grid = std::make_unique<models::GridPriced>(
        kStart, models::GridPricedConfig{std::nullopt, std::nullopt, prices});
    control::MpcInverter* mpc_ptr = nullptr;
    if (mpc) {
      RecedingHorizonConfig rh;
      rh.horizon_steps = static_cast<std::size_t>(total / step);
      rh.capacity = battery.capacity;
      rh.soc_min = inverter.soc_min;
      rh.soc_max = inverter.soc_max;
      rh.run_end = kStart.advance(total);
      const auto l = load;
      const auto p = pv;
      auto provider = std::make_shared<forecast::FunctionForecast>(
          [l](Clock t) { return models::synthetic_load_power(l, t); },
          [p](Clock t) { return models::synthetic_pv_power(p, t); });
      auto inv = std::make_unique<MpcInverter>(kStart, inverter, rh, prices, provider);
      mpc_ptr = inv.get();
      c.inverter = std::move(inv);
    } else {
      c.inverter = std::make_unique<models::InverterPVFirst>(kStart, inverter);
    }
    engine::Simulator sim(kStart, std::move(c));
    MpcRun out;
    for (const auto& s : sim.run(total, step)) {
      if (mpc_ptr && mpc_ptr->last_decision().directive) {
        out.max_grid_to_battery = std::max(out.max_grid_to_battery,
                                           mpc_ptr->last_decision().directive->grid_to_battery_power);
      }
      (void)s;
    }
    out.cost = sim.aggregates().cost;
    out.purchased_wh = sim.aggregates().purchased_wh;
    out.fallbacks = mpc_ptr ? mpc_ptr->fallback_count() : 0;
    return out;
  }
};

}  // namespace

TEST_CASE("perfect-forecast closed loop reaches the open-loop optimum") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const PerfectDay day(seed);
    const auto plan = solve_charging(day.open_loop());
    const auto mpc = day.run(true);
    const auto pv_first = day.run(false);
    CHECK(mpc.fallbacks == 0);
    CHECK(mpc.cost == doctest::Approx(plan.total_cost).epsilon(1e-9));
    CHECK(mpc.cost <= pv_first.cost + 1e-12);
  }
}

TEST_CASE("zero prices make the controller buy only at need") {
  const PerfectDay day(5, 0.0);
  const auto mpc = day.run(true);
  const auto pv_first = day.run(false);
  CHECK(mpc.cost == 0.0);
  CHECK(mpc.max_grid_to_battery == 0.0);
  CHECK(mpc.purchased_wh == doctest::Approx(pv_first.purchased_wh).epsilon(1e-9));
}
