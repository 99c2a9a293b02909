#pragma once

#include <string>
#include <string_view>

namespace cemsim::forecast {

std::string to_lower(std::string_view text);

/// Keyword score of a job description. Base 1.0, plus once per class found
/// (case-insensitive):
///
///   class           matches                                  bonus
///   cpu-intensive   "cpu-intensive", "cpu intensive"          +2.0
///   gpu             "gpu"                                     +3.0
///   multi-core      "multi-core", "multicore", "multi core"   +1.0
///   compile/build   "compil", "build"                         +1.0
///
/// The sum is multiplied by hours/24 for the first duration such as "48h" or
/// "12 hours", otherwise by 1. Never negative; empty text scores 1.0.
double estimate_effort_heuristic(std::string_view text);

/// Source of effort estimates for context descriptions.
class EffortEstimator {
 public:
  virtual ~EffortEstimator() = default;
  virtual double estimate(std::string_view text) = 0;
};

class HeuristicEffortEstimator final : public EffortEstimator {
 public:
  double estimate(std::string_view text) override { return estimate_effort_heuristic(text); }
};

}  // namespace cemsim::forecast
