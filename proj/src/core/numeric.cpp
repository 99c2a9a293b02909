#include "cemsim/numeric.hpp"

#include <string>

#include "cemsim/errors.hpp"
#include "cemsim/step_types.hpp"

namespace cemsim {

double reactive_power(double apparent, double active) {
  if (!(active >= 0.0) || !(apparent >= active)) {
    throw DomainError("reactive_power: need apparent >= active >= 0, got S=" +
                      std::to_string(apparent) + " P=" + std::to_string(active));
  }
  // (S - P)(S + P) keeps precision near unity power factor.
  return std::sqrt((apparent - active) * (apparent + active));
}

std::string_view to_string(BatteryMode mode) noexcept {
  switch (mode) {
    case BatteryMode::Idle:
      return "IDLE";
    case BatteryMode::Charge:
      return "CHARGE";
    case BatteryMode::Discharge:
      return "DISCHARGE";
  }
  return "IDLE";
}

}  // namespace cemsim
