#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "cemsim/context.hpp"
#include "cemsim/forecast/features.hpp"
#include "cemsim/forecast/regression.hpp"

namespace cemsim::forecast {

/// Memoizes another estimator by exact text. Not thread-safe.
class CachingEffortEstimator final : public EffortEstimator {
 public:
  explicit CachingEffortEstimator(EffortEstimator& inner) : inner_(inner) {}
  double estimate(std::string_view text) override;

 private:
  EffortEstimator& inner_;
  std::unordered_map<std::string, double> cache_;
};

/// Observed load samples plus every context record of the scenario. Features
/// for times[i] only see context_query(records, times[i]).
struct EvaluationData {
  std::vector<Clock> times;
  std::vector<double> load;  // W
  std::vector<ContextRecord> records;
};

struct SplitConfig {
  double train_fraction = 0.7;  // of samples, per resample
  int resamples = 1;
  std::uint64_t seed = 0;
  FitOptions fit;

  void validate() const;
};

struct FamilyEvaluation {
  FeatureFamily family = FeatureFamily::None;
  std::vector<double> train_rmse;  // one per resample
  std::vector<double> test_rmse;
  Predictor predictor;  // fitted on resample 0

  double mean_test_rmse() const;
};

/// Index permutation used by resample r; shared by every family so all of
/// them see the same split.
std::vector<std::size_t> resample_permutation(std::size_t n, std::uint64_t seed, int resample);

/// Fits one predictor per family on each resample's training part and
/// reports train and test RMSE. Deterministic for fixed data and seed.
std::vector<FamilyEvaluation> evaluate_families(const EvaluationData& data,
                                                const SplitConfig& split,
                                                const std::vector<FeatureFamily>& families,
                                                EffortEstimator& estimator);

/// CSV with header family,resample,train_rmse_w,test_rmse_w.
void write_evaluation_csv(std::ostream& out, const std::vector<FamilyEvaluation>& results);

}  // namespace cemsim::forecast
