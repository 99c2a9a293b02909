#include "cemsim/models/grid_priced.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cemsim/errors.hpp"
#include "cemsim/numeric.hpp"

namespace cemsim::models {

namespace {

constexpr std::int64_t kNanosPerDay = 86'400LL * Clock::kNanosPerSecond;

std::int64_t hour_offset_ns(double hour) {
  return static_cast<std::int64_t>(std::llround(hour * 3600.0)) * Clock::kNanosPerSecond;
}

}  // namespace

PriceSchedule::PriceSchedule(std::vector<Breakpoint> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i].price >= 0.0) || !std::isfinite(breakpoints_[i].price)) {
      throw ConfigError("price schedule: price at breakpoint " + std::to_string(i) +
                        " must be finite and >= 0");
    }
    if (i > 0 && !(breakpoints_[i - 1].start < breakpoints_[i].start)) {
      throw ConfigError("price schedule: breakpoint " + std::to_string(i) +
                        " does not start after its predecessor");
    }
  }
}

PriceSchedule PriceSchedule::two_tier(Clock first_day, int day_count, double off_peak_price,
                                      double peak_price, double peak_start_hour,
                                      double peak_end_hour) {
  if (day_count < 1) throw ConfigError("price schedule: day_count must be >= 1");
  if (!(0.0 <= peak_start_hour && peak_start_hour < peak_end_hour && peak_end_hour <= 24.0)) {
    throw ConfigError("price schedule: need 0 <= peak_start_hour < peak_end_hour <= 24");
  }
  const std::int64_t midnight = first_day.epoch_ns() - first_day.epoch_ns() % kNanosPerDay;
  const std::int64_t res = first_day.resolution_ns();
  std::vector<Breakpoint> bps;
  for (int d = 0; d < day_count; ++d) {
    const std::int64_t day = midnight + d * kNanosPerDay;
    const std::int64_t peak_begin = day + hour_offset_ns(peak_start_hour);
    const std::int64_t peak_end = day + hour_offset_ns(peak_end_hour);
    auto push = [&](std::int64_t t, double price) {
      if (!bps.empty() && bps.back().start.epoch_ns() == t) {
        bps.back().price = price;
      } else if (bps.empty() || bps.back().price != price) {
        bps.push_back({Clock(t, res), price});
      }
    };
    push(day, off_peak_price);
    push(peak_begin, peak_price);
    if (peak_end < day + kNanosPerDay) push(peak_end, off_peak_price);
  }
  return PriceSchedule(std::move(bps));
}

PriceSchedule PriceSchedule::flat(Clock start, double price) {
  return PriceSchedule({{start, price}});
}

double PriceSchedule::price_at(Clock t) const {
  if (breakpoints_.empty() || t < breakpoints_.front().start) {
    throw ConfigError("price schedule: no price defined at t=" + std::to_string(t.epoch_ns()) +
                      " ns");
  }
  const auto it = std::upper_bound(
      breakpoints_.begin(), breakpoints_.end(), t,
      [](const Clock& value, const Breakpoint& bp) { return value < bp.start; });
  return std::prev(it)->price;
}

PriceSchedule PriceSchedule::scaled(double factor) const {
  std::vector<Breakpoint> bps = breakpoints_;
  for (auto& bp : bps) bp.price *= factor;
  return PriceSchedule(std::move(bps));
}

void GridPricedConfig::validate() const {
  if (active_power_limit && !(*active_power_limit > 0.0)) {
    throw ConfigError("grid: active_power_limit must be > 0 W");
  }
  if (apparent_power_limit && !(*apparent_power_limit > 0.0)) {
    throw ConfigError("grid: apparent_power_limit must be > 0 VA");
  }
  if (prices.empty()) throw ConfigError("grid: price schedule is empty");
}

GridStepResult grid_priced_settle(const GridPricedConfig& config, double dt_s, Clock now,
                                  const GridStepInput& input) {
  const double p_req = input.requested_active_power;
  const double s_req = input.requested_apparent_power;
  if (!(p_req >= 0.0) || !(s_req >= 0.0)) {
    throw DomainError("grid: requested powers must be >= 0");
  }
  bool violation = false;
  double p = p_req;
  double s = std::max(s_req, p_req);
  if (config.active_power_limit && p > *config.active_power_limit) {
    p = *config.active_power_limit;
    violation = true;
  }
  if (config.apparent_power_limit && s > *config.apparent_power_limit) {
    s = *config.apparent_power_limit;
    violation = true;
  }
  // |S| >= P must survive the clamp.
  p = std::min(p, s);

  GridStepResult out;
  out.delivered_active_power = p;
  out.delivered_apparent_power = s;
  out.billing = GridBilling{energy_cost(config.prices.price_at(now), dt_s, p), violation};
  return out;
}

GridPriced::GridPriced(Clock clock, GridPricedConfig config) : Grid(clock), config_(config) {
  config_.validate();
}

GridStepResult GridPriced::step(std::int64_t step_ticks, const GridStepInput& input) {
  const Clock start = now();
  const double dt = start.ticks_to_seconds(step_ticks);
  advance_clock(step_ticks);
  return grid_priced_settle(config_, dt, start, input);
}

}  // namespace cemsim::models
