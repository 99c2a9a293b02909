#include "cemsim/clock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cemsim/errors.hpp"

namespace cemsim {

Clock::Clock(std::int64_t epoch_ns, std::int64_t resolution_ns)
    : epoch_ns_(epoch_ns), resolution_ns_(resolution_ns) {
  if (epoch_ns < 0) throw DomainError("clock: epoch_ns must be >= 0");
  if (resolution_ns <= 0) throw DomainError("clock: resolution_ns must be > 0");
}

Clock Clock::from_seconds(double epoch_seconds, std::int64_t resolution_ns) {
  if (!std::isfinite(epoch_seconds) || epoch_seconds < 0.0) {
    throw DomainError("clock: epoch seconds must be finite and >= 0");
  }
  if (resolution_ns <= 0) throw DomainError("clock: resolution_ns must be > 0");
  // Round to the nearest tick, then express in ns.
  const double ticks = std::round(epoch_seconds * static_cast<double>(kNanosPerSecond) /
                                  static_cast<double>(resolution_ns));
  if (ticks >= 9.2e18 / static_cast<double>(resolution_ns)) {
    throw std::overflow_error("clock: epoch seconds out of range");
  }
  return Clock(static_cast<std::int64_t>(ticks) * resolution_ns, resolution_ns);
}

std::int64_t Clock::ticks_to_ns(std::int64_t step_ticks) const {
  std::int64_t ns = 0;
  if (__builtin_mul_overflow(step_ticks, resolution_ns_, &ns)) {
    throw std::overflow_error("clock: tick duration overflows int64 nanoseconds");
  }
  return ns;
}

Clock Clock::advance(std::int64_t step_ticks) const {
  if (step_ticks < 1) {
    throw DomainError("clock: step_ticks must be >= 1, got " + std::to_string(step_ticks));
  }
  std::int64_t next = 0;
  if (__builtin_add_overflow(epoch_ns_, ticks_to_ns(step_ticks), &next)) {
    throw std::overflow_error("clock: tick counter overflow");
  }
  Clock out;
  out.epoch_ns_ = next;
  out.resolution_ns_ = resolution_ns_;
  return out;
}

double Clock::ticks_to_seconds(std::int64_t step_ticks) const {
  return ns_to_seconds(ticks_to_ns(step_ticks));
}

double Clock::seconds_since_epoch() const noexcept { return ns_to_seconds(epoch_ns_); }

Clock Clock::with_resolution(std::int64_t resolution_ns) const {
  return Clock(epoch_ns_, resolution_ns);
}

}  // namespace cemsim
