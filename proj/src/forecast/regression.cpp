#include "cemsim/forecast/regression.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cemsim/errors.hpp"

namespace cemsim::forecast {

double Predictor::predict(const FeatureVector& features) const {
  if (features.family != family || features.values.size() != coefficients.size()) {
    throw DomainError("predictor: feature vector does not match the " + to_string(family) +
                      " layout");
  }
  double y = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) y += coefficients[i] * features.values[i];
  return y;
}

nlohmann::json Predictor::to_json() const {
  nlohmann::json j;
  j["family"] = to_string(family);
  j["features"] = feature_names;
  j["coefficients"] = coefficients;
  j["training_samples"] = training_samples;
  j["ridge_lambda"] = ridge_lambda;
  return j;
}

Predictor Predictor::from_json(const nlohmann::json& j) {
  Predictor p;
  try {
    p.family = parse_feature_family(j.at("family").get<std::string>());
    p.feature_names = j.at("features").get<std::vector<std::string>>();
    p.coefficients = j.at("coefficients").get<std::vector<double>>();
    p.training_samples = j.value("training_samples", std::size_t{0});
    p.ridge_lambda = j.value("ridge_lambda", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("predictor json: ") + e.what());
  }
  if (p.feature_names != forecast::feature_names(p.family) ||
      p.coefficients.size() != p.feature_names.size()) {
    throw ConfigError("predictor json: coefficients do not match the " + to_string(p.family) +
                      " layout");
  }
  return p;
}

Predictor fit_least_squares(std::span<const FeatureVector> x, std::span<const double> y,
                            const FitOptions& options) {
  if (x.empty()) throw DomainError("fit: no samples");
  if (x.size() != y.size()) throw DomainError("fit: feature and target counts differ");
  const FeatureFamily family = x.front().family;
  const auto names = feature_names(family);
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto p = static_cast<Eigen::Index>(names.size());

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = x[static_cast<std::size_t>(i)];
    if (row.family != family || static_cast<Eigen::Index>(row.values.size()) != p) {
      throw DomainError("fit: sample " + std::to_string(i) + " has a different feature layout");
    }
    for (Eigen::Index k = 0; k < p; ++k) design(i, k) = row.values[static_cast<std::size_t>(k)];
    target(i) = y[static_cast<std::size_t>(i)];
  }

  Predictor out;
  out.family = family;
  out.feature_names = names;
  out.training_samples = x.size();

  Eigen::VectorXd beta;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (n >= p && qr.rank() == p) {
    beta = qr.solve(target);
  } else {
    if (!options.ridge_fallback) {
      throw DomainError("fit: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                        " of " + std::to_string(p) + ")");
    }
    const Eigen::MatrixXd gram = design.transpose() * design;
    out.ridge_lambda = 1e-8 * gram.trace() / static_cast<double>(p);
    if (!(out.ridge_lambda > 0.0)) out.ridge_lambda = 1e-8;
    const Eigen::MatrixXd regularized =
        gram + out.ridge_lambda * Eigen::MatrixXd::Identity(p, p);
    beta = regularized.ldlt().solve(design.transpose() * target);
  }
  out.coefficients.assign(beta.data(), beta.data() + beta.size());
  return out;
}

double rmse(std::span<const double> predicted, std::span<const double> observed) {
  if (predicted.empty()) throw DomainError("rmse: no samples");
  if (predicted.size() != observed.size()) throw DomainError("rmse: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - observed[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

}  // namespace cemsim::forecast
