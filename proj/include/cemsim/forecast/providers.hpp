#pragma once

// Forecast sources for the MPC inverter.

#include <functional>
#include <memory>
#include <vector>

#include "cemsim/context.hpp"
#include "cemsim/control/mpc.hpp"
#include "cemsim/forecast/effort.hpp"
#include "cemsim/forecast/regression.hpp"

namespace cemsim::forecast {

using SeriesFunction = std::function<double(Clock)>;

/// Samples known functions of time; with the simulation's own models this is
/// a perfect forecast.
class FunctionForecast final : public control::ForecastProvider {
 public:
  FunctionForecast(SeriesFunction load, SeriesFunction pv);
  control::ForecastWindow forecast(Clock start, std::int64_t step_ticks,
                                   std::size_t steps) override;

 private:
  SeriesFunction load_;
  SeriesFunction pv_;
};

/// Load from a fitted predictor using the context known at the window start;
/// PV from a function of time.
class PredictorForecast final : public control::ForecastProvider {
 public:
  PredictorForecast(Predictor predictor, std::vector<ContextRecord> records, SeriesFunction pv,
                    std::shared_ptr<EffortEstimator> estimator);
  control::ForecastWindow forecast(Clock start, std::int64_t step_ticks,
                                   std::size_t steps) override;

 private:
  Predictor predictor_;
  std::vector<ContextRecord> records_;
  SeriesFunction pv_;
  std::shared_ptr<EffortEstimator> estimator_;
};

}  // namespace cemsim::forecast
