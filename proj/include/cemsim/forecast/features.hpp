#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cemsim/context.hpp"
#include "cemsim/forecast/effort.hpp"

namespace cemsim::forecast {

enum class FeatureFamily { None, Numeric, Effort, Combined };

std::string to_string(FeatureFamily family);
/// Accepts "none", "numeric", "effort", "combined". Throws ConfigError.
FeatureFamily parse_feature_family(std::string_view name);
/// Comma-separated list; empty input yields all families.
std::vector<FeatureFamily> parse_feature_families(std::string_view list);
const std::vector<FeatureFamily>& all_feature_families();

/// Numeric payload fields read from context records, in layout order.
const std::vector<std::string>& numeric_context_fields();

/// Column names in layout order. Every family starts with
///   intercept, hour_sin, hour_cos, hour_sin2, hour_cos2
/// (first two harmonics of the UTC hour of day). Numeric adds a value and a
/// presence flag per numeric field; effort adds "effort"; combined adds both,
/// numeric first.
std::vector<std::string> feature_names(FeatureFamily family);

struct FeatureVector {
  FeatureFamily family = FeatureFamily::None;
  std::vector<double> values;
};

/// Features at time t from records already filtered by context_query. Only
/// records with begins_at <= t < ends_at contribute; numeric fields and
/// effort are summed over them. A missing numeric field contributes 0 and
/// leaves its presence flag at 0. The None family ignores `records`.
FeatureVector build_features(std::span<const ContextRecord> records, FeatureFamily family, Clock t,
                             EffortEstimator& estimator);

}  // namespace cemsim::forecast
