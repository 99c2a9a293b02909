#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cemsim/clock.hpp"

namespace cemsim::replay {

/// Channel names accepted on ingestion, one per measured quantity:
///   battery_voltage [V], battery_current [A, + = charging], battery_soc [0..1],
///   battery_power [W, + = charging]
///   pv_voltage [V], pv_current [A], pv_power [W]
///   load_voltage [V], load_current [A], load_frequency [Hz], load_power [W],
///   load_apparent_power [VA]
///   grid_voltage [V], grid_current [A], grid_frequency [Hz],
///   grid_apparent_power [VA], grid_power [W]
const std::vector<std::string>& known_channels();
bool is_known_channel(std::string_view name);

struct ChannelKey {
  int subsystem_id = 1;
  std::string name;

  friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;
};

/// Samples of one quantity with strictly increasing timestamps.
class TimeSeriesChannel {
 public:
  /// Throws ValidationError unless `t_ns` is after the last sample and
  /// `value` is finite.
  void append(std::int64_t t_ns, double value);

  bool empty() const noexcept { return times_.empty(); }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<std::int64_t>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const TimeSeriesChannel&, const TimeSeriesChannel&) = default;

 private:
  std::vector<std::int64_t> times_;
  std::vector<double> values_;
};

/// Exact at sample times, linear between neighbours, clamped to the nearest
/// endpoint up to `tolerance_ns` outside the sampled range. Throws
/// OutOfRangeError beyond that and DomainError for an empty channel.
double interpolate(const TimeSeriesChannel& channel, Clock t, std::int64_t tolerance_ns);

class TimeSeriesTable {
 public:
  TimeSeriesChannel& channel_for_append(const ChannelKey& key) { return channels_[key]; }

  bool has(const ChannelKey& key) const { return channels_.count(key) != 0; }
  /// Throws ConfigError naming the missing channel.
  const TimeSeriesChannel& channel(const ChannelKey& key) const;

  const std::map<ChannelKey, TimeSeriesChannel>& channels() const noexcept { return channels_; }
  std::size_t sample_count() const noexcept;

  friend bool operator==(const TimeSeriesTable&, const TimeSeriesTable&) = default;

 private:
  std::map<ChannelKey, TimeSeriesChannel> channels_;
};

}  // namespace cemsim::replay
