#include "cemsim/forecast/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cemsim/errors.hpp"
#include "cemsim/models/synthetic.hpp"

namespace cemsim::forecast {

namespace {

bool has_numeric(FeatureFamily f) {
  return f == FeatureFamily::Numeric || f == FeatureFamily::Combined;
}

bool has_effort(FeatureFamily f) {
  return f == FeatureFamily::Effort || f == FeatureFamily::Combined;
}

}  // namespace

std::string to_string(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::None: return "none";
    case FeatureFamily::Numeric: return "numeric";
    case FeatureFamily::Effort: return "effort";
    case FeatureFamily::Combined: return "combined";
  }
  return "unknown";
}

FeatureFamily parse_feature_family(std::string_view name) {
  for (FeatureFamily f : all_feature_families()) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown feature family '" + std::string(name) +
                    "' (expected none, numeric, effort or combined)");
}

std::vector<FeatureFamily> parse_feature_families(std::string_view list) {
  if (list.empty()) return all_feature_families();
  std::vector<FeatureFamily> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const FeatureFamily f = parse_feature_family(list.substr(pos, comma - pos));
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    pos = comma + 1;
  }
  return out;
}

const std::vector<FeatureFamily>& all_feature_families() {
  static const std::vector<FeatureFamily> kAll = {FeatureFamily::None, FeatureFamily::Numeric,
                                                  FeatureFamily::Effort, FeatureFamily::Combined};
  return kAll;
}

const std::vector<std::string>& numeric_context_fields() {
  static const std::vector<std::string> kFields = {"cores", "files", "parameters"};
  return kFields;
}

std::vector<std::string> feature_names(FeatureFamily family) {
  std::vector<std::string> names = {"intercept", "hour_sin", "hour_cos", "hour_sin2", "hour_cos2"};
  if (has_numeric(family)) {
    for (const auto& field : numeric_context_fields()) {
      names.push_back(field);
      names.push_back(field + "_present");
    }
  }
  if (has_effort(family)) names.emplace_back("effort");
  return names;
}

FeatureVector build_features(std::span<const ContextRecord> records, FeatureFamily family, Clock t,
                             EffortEstimator& estimator) {
  FeatureVector fv;
  fv.family = family;
  const double angle = 2.0 * std::numbers::pi * models::hour_of_day(t) / 24.0;
  fv.values = {1.0, std::sin(angle), std::cos(angle), std::sin(2.0 * angle), std::cos(2.0 * angle)};
  if (family == FeatureFamily::None) return fv;

  const auto& fields = numeric_context_fields();
  std::vector<double> sums(fields.size(), 0.0);
  std::vector<double> present(fields.size(), 0.0);
  double effort = 0.0;
  for (const auto& r : records) {
    if (!(r.begins_at <= t && t < r.ends_at)) continue;
    if (has_numeric(family)) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto it = r.payload.find(fields[i]);
        if (it != r.payload.end() && it->is_number()) {
          sums[i] += it->get<double>();
          present[i] = 1.0;
        }
      }
    }
    if (has_effort(family)) effort += estimator.estimate(r.text());
  }
  if (has_numeric(family)) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      fv.values.push_back(sums[i]);
      fv.values.push_back(present[i]);
    }
  }
  if (has_effort(family)) fv.values.push_back(effort);
  return fv;
}

}  // namespace cemsim::forecast
