#include "cemsim/replay/timeseries.hpp"

#include <algorithm>
#include <cmath>

#include "cemsim/errors.hpp"

namespace cemsim::replay {

const std::vector<std::string>& known_channels() {
  static const std::vector<std::string> kChannels = {
      "battery_voltage", "battery_current", "battery_soc",        "battery_power",
      "pv_voltage",      "pv_current",      "pv_power",           "load_voltage",
      "load_current",    "load_frequency",  "load_power",         "load_apparent_power",
      "grid_voltage",    "grid_current",    "grid_frequency",     "grid_apparent_power",
      "grid_power",
  };
  return kChannels;
}

bool is_known_channel(std::string_view name) {
  const auto& known = known_channels();
  return std::find(known.begin(), known.end(), name) != known.end();
}

void TimeSeriesChannel::append(std::int64_t t_ns, double value) {
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value at t=" + std::to_string(t_ns), size());
  }
  if (!times_.empty() && t_ns <= times_.back()) {
    throw ValidationError(t_ns == times_.back()
                              ? "duplicate timestamp " + std::to_string(t_ns)
                              : "timestamp " + std::to_string(t_ns) + " is before previous " +
                                    std::to_string(times_.back()),
                          size());
  }
  times_.push_back(t_ns);
  values_.push_back(value);
}

double interpolate(const TimeSeriesChannel& channel, Clock t, std::int64_t tolerance_ns) {
  if (channel.empty()) throw DomainError("interpolate: empty channel");
  const auto& times = channel.times();
  const auto& values = channel.values();
  const std::int64_t q = t.epoch_ns();

  if (q <= times.front()) {
    if (times.front() - q > tolerance_ns) {
      throw OutOfRangeError("interpolate: t=" + std::to_string(q) + " ns is " +
                            std::to_string(times.front() - q) + " ns before the first sample");
    }
    return values.front();
  }
  if (q >= times.back()) {
    if (q - times.back() > tolerance_ns) {
      throw OutOfRangeError("interpolate: t=" + std::to_string(q) + " ns is " +
                            std::to_string(q - times.back()) + " ns after the last sample");
    }
    return values.back();
  }
  const auto hi = std::lower_bound(times.begin(), times.end(), q);
  const auto i = static_cast<std::size_t>(hi - times.begin());
  if (*hi == q) return values[i];
  const double span = static_cast<double>(times[i] - times[i - 1]);
  const double frac = static_cast<double>(q - times[i - 1]) / span;
  return values[i - 1] + (values[i] - values[i - 1]) * frac;
}

const TimeSeriesChannel& TimeSeriesTable::channel(const ChannelKey& key) const {
  const auto it = channels_.find(key);
  if (it == channels_.end()) {
    throw ConfigError("time series: missing channel '" + key.name + "' for subsystem " +
                      std::to_string(key.subsystem_id));
  }
  return it->second;
}

std::size_t TimeSeriesTable::sample_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [key, ch] : channels_) n += ch.size();
  return n;
}

}  // namespace cemsim::replay
