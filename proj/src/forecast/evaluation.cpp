#include "cemsim/forecast/evaluation.hpp"

#include <numeric>
#include <ostream>
#include <random>

#include "cemsim/errors.hpp"
#include "cemsim/replay/ingest.hpp"

namespace cemsim::forecast {

double CachingEffortEstimator::estimate(std::string_view text) {
  auto it = cache_.find(std::string(text));
  if (it == cache_.end()) it = cache_.emplace(std::string(text), inner_.estimate(text)).first;
  return it->second;
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train_fraction must be in (0, 1)");
  }
  if (resamples < 1) throw ConfigError("split: resamples must be >= 1");
}

double FamilyEvaluation::mean_test_rmse() const {
  if (test_rmse.empty()) return 0.0;
  return std::accumulate(test_rmse.begin(), test_rmse.end(), 0.0) /
         static_cast<double>(test_rmse.size());
}

std::vector<std::size_t> resample_permutation(std::size_t n, std::uint64_t seed, int resample) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // mt19937_64 output is fixed by the standard; the modulo draw keeps the
  // shuffle identical across standard libraries.
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(resample) + 1);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<FamilyEvaluation> evaluate_families(const EvaluationData& data,
                                                const SplitConfig& split,
                                                const std::vector<FeatureFamily>& families,
                                                EffortEstimator& estimator) {
  split.validate();
  const std::size_t n = data.times.size();
  if (data.load.size() != n) throw DomainError("evaluate: times and load differ in length");
  const auto n_train = static_cast<std::size_t>(split.train_fraction * static_cast<double>(n));
  if (n_train == 0 || n_train >= n) {
    throw DomainError("evaluate: train/test split leaves an empty part");
  }

  CachingEffortEstimator cached(estimator);
  std::vector<std::vector<FeatureVector>> features(families.size(),
                                                   std::vector<FeatureVector>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto known = context_query(data.records, data.times[i]);
    for (std::size_t f = 0; f < families.size(); ++f) {
      features[f][i] = build_features(known, families[f], data.times[i], cached);
    }
  }

  std::vector<FamilyEvaluation> out(families.size());
  for (std::size_t f = 0; f < families.size(); ++f) out[f].family = families[f];

  for (int r = 0; r < split.resamples; ++r) {
    const auto perm = resample_permutation(n, split.seed, r);
    std::vector<double> y_train, y_test;
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_train ? y_train : y_test).push_back(data.load[perm[i]]);
    }
    for (std::size_t f = 0; f < families.size(); ++f) {
      std::vector<FeatureVector> x_train, x_test;
      for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? x_train : x_test).push_back(features[f][perm[i]]);
      }
      Predictor p = fit_least_squares(x_train, y_train, split.fit);
      auto predict_all = [&](const std::vector<FeatureVector>& xs) {
        std::vector<double> y;
        y.reserve(xs.size());
        for (const auto& x : xs) y.push_back(p.predict(x));
        return y;
      };
      out[f].train_rmse.push_back(rmse(predict_all(x_train), y_train));
      out[f].test_rmse.push_back(rmse(predict_all(x_test), y_test));
      if (r == 0) out[f].predictor = std::move(p);
    }
  }
  return out;
}

void write_evaluation_csv(std::ostream& out, const std::vector<FamilyEvaluation>& results) {
  out << "family,resample,train_rmse_w,test_rmse_w\n";
  for (const auto& e : results) {
    for (std::size_t r = 0; r < e.test_rmse.size(); ++r) {
      out << to_string(e.family) << ',' << r << ',' << replay::format_double(e.train_rmse[r]) << ','
          << replay::format_double(e.test_rmse[r]) << '\n';
    }
  }
}

}  // namespace cemsim::forecast
