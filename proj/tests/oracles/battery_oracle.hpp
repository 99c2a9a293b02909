#pragma once

#include "cemsim/step_types.hpp"

namespace cemsim::oracles {

/// Energy change of the linear battery written out in long double:
/// idle 0, charge dt*U*I*eta_c, discharge -dt*U*I/eta_d.
long double linear_battery_delta(BatteryMode mode, long double dt_s, long double voltage,
                                 long double current, long double eta_charge,
                                 long double eta_discharge);

}  // namespace cemsim::oracles
