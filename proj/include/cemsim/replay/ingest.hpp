#pragma once

// File formats for recorded data.
//
// Time series, delimited text with a header row:
//
//   timestamp_ns,subsystem_id,channel,value
//   1753747200000000000,1,pv_power,412.5
//
// Rows of different channels may interleave; within one channel timestamps
// must strictly increase in file order. Values are written with 17
// significant digits so a write/read cycle is bit-exact.
//
// Time series, JSON Lines: one {"timestamp_ns", "subsystem_id", "channel",
// "value"} object per line, same rules.
//
// Context, JSON Lines: one object per line,
//
//   {"recorded_at_ns": ..., "begins_at_ns": ..., "ends_at_ns": ...,
//    "subsystem_id": 1, "payload": {"text": "...", "cores": 16}}

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cemsim/context.hpp"
#include "cemsim/replay/timeseries.hpp"

namespace cemsim::replay {

enum class TimeSeriesFormat { Csv, JsonLines };

/// Picks the format from the extension: ".jsonl"/".ndjson" -> JsonLines,
/// anything else -> Csv.
TimeSeriesFormat format_for_path(const std::filesystem::path& path);

struct IngestOptions {
  // Unknown channel names or header columns fail instead of warn-and-skip.
  bool strict = false;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based; 0 for whole-file problems
  std::string message;
};

struct TimeSeriesIngest {
  TimeSeriesTable table;
  std::vector<Diagnostic> warnings;
  std::vector<Diagnostic> errors;
  bool ok() const noexcept { return errors.empty(); }
};

struct ContextIngest {
  std::vector<ContextRecord> records;  // canonical order
  std::vector<Diagnostic> errors;
  std::vector<std::size_t> rejected_records;  // 0-based record indices
  bool ok() const noexcept { return errors.empty(); }
};

/// Parses everything and collects all diagnostics instead of stopping at the
/// first one.
TimeSeriesIngest read_timeseries(std::istream& in, TimeSeriesFormat format,
                                 const IngestOptions& options = {});
ContextIngest read_context(std::istream& in);

/// Throws ParseError / ValidationError for the first error, ConfigError when
/// the file cannot be opened. Warnings go to the log.
TimeSeriesTable ingest_timeseries(const std::filesystem::path& path, TimeSeriesFormat format,
                                  const IngestOptions& options = {});
std::vector<ContextRecord> ingest_context(const std::filesystem::path& path);

void write_timeseries_csv(std::ostream& out, const TimeSeriesTable& table);
void write_timeseries_jsonl(std::ostream& out, const TimeSeriesTable& table);
void write_context_jsonl(std::ostream& out, const std::vector<ContextRecord>& records);

/// Shortest text that parses back to the same double; used by every text
/// emitter in the project.
std::string format_double(double value);

}  // namespace cemsim::replay
