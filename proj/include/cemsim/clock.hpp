#pragma once

#include <compare>
#include <cstdint>

namespace cemsim {

/// Simulation time on an integral nanosecond scale.
///
/// A clock is a value: `advance` returns a new instance. All engine time
/// arithmetic happens on the integer counter; floating-point seconds appear
/// only when a duration enters a physical formula.
class Clock {
 public:
  static constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

  constexpr Clock() = default;

  /// Throws DomainError when `epoch_ns < 0` or `resolution_ns <= 0`.
  Clock(std::int64_t epoch_ns, std::int64_t resolution_ns = kNanosPerSecond);

  static Clock from_seconds(double epoch_seconds, std::int64_t resolution_ns = kNanosPerSecond);

  constexpr std::int64_t epoch_ns() const noexcept { return epoch_ns_; }
  constexpr std::int64_t resolution_ns() const noexcept { return resolution_ns_; }

  /// Throws DomainError for step_ticks < 1 and std::overflow_error when the
  /// counter would leave the int64 range.
  Clock advance(std::int64_t step_ticks) const;

  /// Duration of `step_ticks` ticks in nanoseconds (overflow-checked).
  std::int64_t ticks_to_ns(std::int64_t step_ticks) const;

  /// Duration of `step_ticks` ticks in seconds.
  double ticks_to_seconds(std::int64_t step_ticks) const;

  double seconds_since_epoch() const noexcept;

  /// Same instant, other resolution. Comparisons look at the instant only.
  Clock with_resolution(std::int64_t resolution_ns) const;

  friend constexpr bool operator==(const Clock& a, const Clock& b) noexcept {
    return a.epoch_ns_ == b.epoch_ns_;
  }
  friend constexpr std::strong_ordering operator<=>(const Clock& a, const Clock& b) noexcept {
    return a.epoch_ns_ <=> b.epoch_ns_;
  }

 private:
  std::int64_t epoch_ns_ = 0;
  std::int64_t resolution_ns_ = kNanosPerSecond;
};

/// Seconds of `ns` nanoseconds, as used in physical formulas.
constexpr double ns_to_seconds(std::int64_t ns) noexcept {
  return static_cast<double>(ns) / static_cast<double>(Clock::kNanosPerSecond);
}

}  // namespace cemsim
