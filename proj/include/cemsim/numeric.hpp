#pragma once

#include <cmath>

namespace cemsim {

inline constexpr double kJoulesPerKwh = 3.6e6;
inline constexpr double kJoulesPerWh = 3600.0;
inline constexpr double kGridVoltage = 230.0;  // V, fixed at the installation

/// Reactive power Q from |S| = sqrt(P^2 + Q^2). Throws DomainError when
/// apparent < active or either is negative.
double reactive_power(double apparent, double active);

/// Price of drawing `power_w` for `dt_s` seconds at `price_per_kwh`.
/// The one formula shared by the grid model and the charging planner.
inline double energy_cost(double price_per_kwh, double dt_s, double power_w) noexcept {
  return price_per_kwh * (dt_s * power_w) / kJoulesPerKwh;
}

/// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace cemsim
