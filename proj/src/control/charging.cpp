#include "cemsim/control/charging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "cemsim/errors.hpp"
#include "cemsim/numeric.hpp"
#include "cemsim/replay/ingest.hpp"

namespace cemsim::control {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_non_negative(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
}

}  // namespace

void ChargingProblem::validate() const {
  const std::size_t n = steps();
  if (n == 0) throw DomainError("charging: horizon must contain at least one step");
  if (load.size() != n || pv.size() != n) {
    throw DomainError("charging: prices, load and pv must have equal length");
  }
  if (!(step_seconds > 0.0)) throw DomainError("charging: step_seconds must be > 0");
  if (!(capacity > 0.0)) throw DomainError("charging: capacity must be > 0 J");
  if (!(0.0 <= soc_min && soc_min <= soc_max && soc_max <= 1.0)) {
    throw DomainError("charging: need 0 <= soc_min <= soc_max <= 1");
  }
  if (!(soc_initial >= soc_min && soc_initial <= soc_max)) {
    throw DomainError("charging: initial SOC " + std::to_string(soc_initial) +
                      " outside [soc_min, soc_max]");
  }
  if (!all_non_negative(prices) || !all_non_negative(load) || !all_non_negative(pv)) {
    throw DomainError("charging: prices, load and pv must be finite and >= 0");
  }
  if (max_grid_power && !(*max_grid_power > 0.0)) {
    throw DomainError("charging: max_grid_power must be > 0 W");
  }
}

ChargingPlan solve_charging(const ChargingProblem& problem) {
  problem.validate();
  const std::size_t n = problem.steps();
  const double dt = problem.step_seconds;
  const double headroom_total = (problem.soc_max - problem.soc_min) * problem.capacity;
  const double grid_cap = problem.max_grid_power ? *problem.max_grid_power * dt : kInf;

  // Energy above the soc_min floor after each step, in J.
  std::vector<double> level(n + 1, 0.0);
  level[0] = std::clamp((problem.soc_initial - problem.soc_min) * problem.capacity, 0.0,
                        headroom_total);
  std::vector<double> bought(n, 0.0);
  std::vector<double> curtailed(n, 0.0);

  double scale = std::max(1.0, headroom_total);
  for (std::size_t t = 0; t < n; ++t) {
    scale = std::max({scale, problem.load[t] * dt, problem.pv[t] * dt});
  }
  const double tol = 1e-12 * scale;

  for (std::size_t t = 0; t < n; ++t) {
    double next = level[t] + (problem.pv[t] - problem.load[t]) * dt;
    if (next > headroom_total) {
      curtailed[t] = (next - headroom_total) / dt;
      next = headroom_total;
    }
    level[t + 1] = next;

    while (level[t + 1] < -tol) {
      const double need = -level[t + 1];
      std::size_t best = n;
      double best_room = 0.0;
      double room = kInf;  // min headroom over the levels a purchase at s would raise
      for (std::size_t s = t + 1; s-- > 0;) {
        if (s < t) {
          room = std::min(room, headroom_total - level[s + 1]);
          if (room <= tol) break;
        }
        if (grid_cap - bought[s] <= tol) continue;
        if (best == n || problem.prices[s] < problem.prices[best]) {
          best = s;
          best_room = room;
        }
      }
      if (best == n) {
        throw InfeasibleError("charging: shortfall of " + std::to_string(need) +
                                  " J at step " + std::to_string(t) + " cannot be bought",
                              t);
      }
      const double amount = std::min({need, grid_cap - bought[best], best_room});
      bought[best] += amount;
      for (std::size_t k = best + 1; k <= t + 1; ++k) level[k] += amount;
    }
    if (level[t + 1] < 0.0) level[t + 1] = 0.0;
  }

  ChargingPlan plan;
  plan.grid_power.resize(n);
  plan.pv_curtailed = std::move(curtailed);
  plan.soc.resize(n + 1);
  plan.marginal_price.assign(n, std::numeric_limits<double>::quiet_NaN());
  CompensatedSum cost;
  CompensatedSum energy;
  for (std::size_t t = 0; t < n; ++t) {
    plan.grid_power[t] = bought[t] / dt;
    cost.add(energy_cost(problem.prices[t], dt, plan.grid_power[t]));
    energy.add(bought[t]);
  }
  for (std::size_t t = 0; t <= n; ++t) {
    plan.soc[t] = problem.soc_min + level[t] / problem.capacity;
  }
  // Price of one more unit of demand at t given the final plan.
  for (std::size_t t = 0; t < n; ++t) {
    double room = kInf;
    for (std::size_t s = t + 1; s-- > 0;) {
      if (s < t) {
        room = std::min(room, headroom_total - level[s + 1]);
        if (room <= tol) break;
      }
      if (grid_cap - bought[s] <= tol) continue;
      if (std::isnan(plan.marginal_price[t]) || problem.prices[s] < plan.marginal_price[t]) {
        plan.marginal_price[t] = problem.prices[s];
      }
    }
  }
  plan.total_cost = cost.value();
  plan.purchased_energy = energy.value();
  return plan;
}

void write_plan_csv(std::ostream& out, const ChargingPlan& plan) {
  out << "step,grid_power_w,pv_curtailed_w,soc,marginal_price\n";
  for (std::size_t t = 0; t < plan.grid_power.size(); ++t) {
    out << t << ',' << replay::format_double(plan.grid_power[t]) << ','
        << replay::format_double(plan.pv_curtailed[t]) << ','
        << replay::format_double(plan.soc[t + 1]) << ',';
    if (!std::isnan(plan.marginal_price[t])) out << replay::format_double(plan.marginal_price[t]);
    out << '\n';
  }
}

}  // namespace cemsim::control
