#include "cemsim/forecast/effort.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <regex>

namespace cemsim::forecast {

namespace {

struct KeywordClass {
  std::array<std::string_view, 3> patterns;
  double bonus;
};

constexpr std::array<KeywordClass, 4> kKeywordTable = {{
    {{"cpu-intensive", "cpu intensive", ""}, 2.0},
    {{"gpu", "", ""}, 3.0},
    {{"multi-core", "multicore", "multi core"}, 1.0},
    {{"compil", "build", ""}, 1.0},
}};

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double estimate_effort_heuristic(std::string_view text) {
  const std::string lower = to_lower(text);
  double score = 1.0;
  for (const auto& cls : kKeywordTable) {
    const bool hit = std::any_of(cls.patterns.begin(), cls.patterns.end(), [&](std::string_view p) {
      return !p.empty() && lower.find(p) != std::string::npos;
    });
    if (hit) score += cls.bonus;
  }

  static const std::regex kDuration(R"((\d+(?:\.\d+)?)\s*(?:h|hr|hrs|hour|hours)\b)");
  std::smatch m;
  if (std::regex_search(lower, m, kDuration)) {
    try {
      const double hours = std::stod(m[1].str());
      if (std::isfinite(hours)) score *= hours / 24.0;
    } catch (const std::out_of_range&) {
      // Absurd durations leave the base score untouched.
    }
  }
  return std::max(0.0, score);
}

}  // namespace cemsim::forecast
