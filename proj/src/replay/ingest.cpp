#include "cemsim/replay/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cemsim/errors.hpp"

namespace cemsim::replay {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Shared row sink for both time-series formats.
class RowSink {
 public:
  RowSink(TimeSeriesIngest& result, const IngestOptions& options)
      : result_(result), options_(options) {}

  void add(std::size_t line, std::int64_t t_ns, int subsystem, std::string_view channel,
           double value) {
    if (!is_known_channel(channel)) {
      const std::string msg = line_prefix(line) + "unknown channel '" + std::string(channel) + "'";
      if (options_.strict) {
        result_.errors.push_back({line, msg});
      } else {
        result_.warnings.push_back({line, msg + " skipped"});
      }
      return;
    }
    try {
      result_.table.channel_for_append({subsystem, std::string(channel)}).append(t_ns, value);
    } catch (const ValidationError& e) {
      result_.errors.push_back({line, line_prefix(line) + "channel '" + std::string(channel) +
                                          "' subsystem " + std::to_string(subsystem) + ": " +
                                          e.what()});
    }
  }

 private:
  TimeSeriesIngest& result_;
  const IngestOptions& options_;
};

void read_csv(std::istream& in, TimeSeriesIngest& result, const IngestOptions& options) {
  RowSink sink(result, options);
  std::string raw;
  std::size_t line = 0;
  int col_t = -1, col_sub = -1, col_ch = -1, col_v = -1;
  std::size_t columns = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    if (!have_header) {
      have_header = true;
      columns = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto f = fields[i];
        const int idx = static_cast<int>(i);
        if (f == "timestamp_ns") {
          col_t = idx;
        } else if (f == "subsystem_id") {
          col_sub = idx;
        } else if (f == "channel") {
          col_ch = idx;
        } else if (f == "value") {
          col_v = idx;
        } else if (options.strict) {
          result.errors.push_back({line, line_prefix(line) + "unknown column '" + std::string(f) + "'"});
        } else {
          result.warnings.push_back({line, line_prefix(line) + "unknown column '" + std::string(f) + "' ignored"});
        }
      }
      if (col_t < 0 || col_sub < 0 || col_ch < 0 || col_v < 0) {
        result.errors.push_back(
            {line, line_prefix(line) + "header must contain timestamp_ns,subsystem_id,channel,value"});
        return;
      }
      continue;
    }
    if (fields.size() != columns) {
      result.errors.push_back({line, line_prefix(line) + "expected " + std::to_string(columns) +
                                         " fields, found " + std::to_string(fields.size())});
      continue;
    }
    std::int64_t t_ns = 0;
    int subsystem = 0;
    double value = 0.0;
    if (!parse_number(fields[col_t], t_ns)) {
      result.errors.push_back({line, line_prefix(line) + "bad timestamp_ns '" + std::string(fields[col_t]) + "'"});
      continue;
    }
    if (!parse_number(fields[col_sub], subsystem)) {
      result.errors.push_back({line, line_prefix(line) + "bad subsystem_id '" + std::string(fields[col_sub]) + "'"});
      continue;
    }
    if (!parse_number(fields[col_v], value)) {
      result.errors.push_back({line, line_prefix(line) + "bad value '" + std::string(fields[col_v]) + "'"});
      continue;
    }
    sink.add(line, t_ns, subsystem, fields[col_ch], value);
  }
  if (!have_header) result.errors.push_back({0, "missing header row"});
}

void read_ts_jsonl(std::istream& in, TimeSeriesIngest& result, const IngestOptions& options) {
  RowSink sink(result, options);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(raw);
      sink.add(line, j.at("timestamp_ns").get<std::int64_t>(), j.at("subsystem_id").get<int>(),
               j.at("channel").get<std::string>(), j.at("value").get<double>());
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line, line_prefix(line) + e.what()});
    }
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

TimeSeriesFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? TimeSeriesFormat::JsonLines
                                               : TimeSeriesFormat::Csv;
}

TimeSeriesIngest read_timeseries(std::istream& in, TimeSeriesFormat format,
                                 const IngestOptions& options) {
  TimeSeriesIngest result;
  if (format == TimeSeriesFormat::Csv) {
    read_csv(in, result, options);
  } else {
    read_ts_jsonl(in, result, options);
  }
  return result;
}

ContextIngest read_context(std::istream& in) {
  ContextIngest result;
  std::string raw;
  std::size_t line = 0;
  std::size_t index = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const std::size_t record_index = index++;
    const std::string where = line_prefix(line) + "record " + std::to_string(record_index) + ": ";
    try {
      const auto j = nlohmann::json::parse(raw);
      ContextRecord r;
      r.recorded_at = Clock(j.at("recorded_at_ns").get<std::int64_t>());
      r.begins_at = Clock(j.at("begins_at_ns").get<std::int64_t>());
      r.ends_at = Clock(j.at("ends_at_ns").get<std::int64_t>());
      r.subsystem_id = j.at("subsystem_id").get<int>();
      r.payload = j.at("payload");
      if (!r.payload.is_object() || !r.payload.contains("text") || !r.payload["text"].is_string()) {
        result.errors.push_back({line, where + "payload must be an object with a string 'text'"});
        result.rejected_records.push_back(record_index);
        continue;
      }
      if (auto problem = validate_context_record(r); !problem.empty()) {
        result.errors.push_back({line, where + problem});
        result.rejected_records.push_back(record_index);
        continue;
      }
      result.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line, where + e.what()});
      result.rejected_records.push_back(record_index);
    } catch (const DomainError& e) {
      result.errors.push_back({line, where + e.what()});
      result.rejected_records.push_back(record_index);
    }
  }
  normalize_context_order(result.records);
  return result;
}

TimeSeriesTable ingest_timeseries(const std::filesystem::path& path, TimeSeriesFormat format,
                                  const IngestOptions& options) {
  auto in = open_or_throw(path);
  auto result = read_timeseries(in, format, options);
  for (const auto& w : result.warnings) spdlog::warn("{}: {}", path.string(), w.message);
  if (!result.ok()) {
    const auto& first = result.errors.front();
    throw ParseError(path.string() + ": " + first.message, first.line);
  }
  return std::move(result.table);
}

std::vector<ContextRecord> ingest_context(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  auto result = read_context(in);
  if (!result.ok()) {
    throw ValidationError(path.string() + ": " + result.errors.front().message,
                          result.rejected_records.empty() ? 0 : result.rejected_records.front());
  }
  return std::move(result.records);
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_timeseries_csv(std::ostream& out, const TimeSeriesTable& table) {
  out << "timestamp_ns,subsystem_id,channel,value\n";
  for (const auto& [key, ch] : table.channels()) {
    for (std::size_t i = 0; i < ch.size(); ++i) {
      out << ch.times()[i] << ',' << key.subsystem_id << ',' << key.name << ','
          << format_double(ch.values()[i]) << '\n';
    }
  }
}

void write_timeseries_jsonl(std::ostream& out, const TimeSeriesTable& table) {
  for (const auto& [key, ch] : table.channels()) {
    for (std::size_t i = 0; i < ch.size(); ++i) {
      out << "{\"timestamp_ns\":" << ch.times()[i] << ",\"subsystem_id\":" << key.subsystem_id
          << ",\"channel\":\"" << key.name << "\",\"value\":" << format_double(ch.values()[i])
          << "}\n";
    }
  }
}

void write_context_jsonl(std::ostream& out, const std::vector<ContextRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["recorded_at_ns"] = r.recorded_at.epoch_ns();
    j["begins_at_ns"] = r.begins_at.epoch_ns();
    j["ends_at_ns"] = r.ends_at.epoch_ns();
    j["subsystem_id"] = r.subsystem_id;
    j["payload"] = r.payload;
    out << j.dump() << '\n';
  }
}

}  // namespace cemsim::replay
