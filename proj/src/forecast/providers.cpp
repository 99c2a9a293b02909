#include "cemsim/forecast/providers.hpp"

#include <algorithm>
#include <utility>

#include "cemsim/errors.hpp"
#include "cemsim/forecast/features.hpp"

namespace cemsim::forecast {

FunctionForecast::FunctionForecast(SeriesFunction load, SeriesFunction pv)
    : load_(std::move(load)), pv_(std::move(pv)) {
  if (!load_ || !pv_) throw ConfigError("forecast: load and pv functions are required");
}

control::ForecastWindow FunctionForecast::forecast(Clock start, std::int64_t step_ticks,
                                                   std::size_t steps) {
  control::ForecastWindow w;
  w.load.reserve(steps);
  w.pv.reserve(steps);
  Clock t = start;
  for (std::size_t j = 0; j < steps; ++j) {
    t = t.advance(step_ticks);
    w.load.push_back(load_(t));
    w.pv.push_back(pv_(t));
  }
  return w;
}

PredictorForecast::PredictorForecast(Predictor predictor, std::vector<ContextRecord> records,
                                     SeriesFunction pv, std::shared_ptr<EffortEstimator> estimator)
    : predictor_(std::move(predictor)),
      records_(std::move(records)),
      pv_(std::move(pv)),
      estimator_(std::move(estimator)) {
  if (!pv_ || !estimator_) throw ConfigError("forecast: pv function and estimator are required");
}

control::ForecastWindow PredictorForecast::forecast(Clock start, std::int64_t step_ticks,
                                                    std::size_t steps) {
  const auto known = context_query(records_, start);
  control::ForecastWindow w;
  w.load.reserve(steps);
  w.pv.reserve(steps);
  Clock t = start;
  for (std::size_t j = 0; j < steps; ++j) {
    t = t.advance(step_ticks);
    const auto features = build_features(known, predictor_.family, t, *estimator_);
    w.load.push_back(std::max(0.0, predictor_.predict(features)));
    w.pv.push_back(pv_(t));
  }
  return w;
}

}  // namespace cemsim::forecast
