#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/forecast/features.hpp"

namespace cemsim::forecast {

struct FitOptions {
  /// On a rank-deficient design, solve (X'X + lambda I) b = X'y with
  /// lambda = 1e-8 * trace(X'X) / p instead of throwing.
  bool ridge_fallback = true;
};

struct Predictor {
  FeatureFamily family = FeatureFamily::None;
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;
  std::size_t training_samples = 0;
  double ridge_lambda = 0.0;  // 0 for a plain least-squares fit

  /// Throws DomainError when the vector does not match the layout.
  double predict(const FeatureVector& features) const;

  nlohmann::json to_json() const;
  static Predictor from_json(const nlohmann::json& j);
};

/// Least-squares fit of y on the rows of `x` (all of one family). Throws
/// DomainError on empty or mismatched input, and on a rank-deficient design
/// when the fallback is disabled.
Predictor fit_least_squares(std::span<const FeatureVector> x, std::span<const double> y,
                            const FitOptions& options = {});

/// sqrt(mean((predicted - observed)^2)). Throws DomainError on empty or
/// mismatched input.
double rmse(std::span<const double> predicted, std::span<const double> observed);

}  // namespace cemsim::forecast
