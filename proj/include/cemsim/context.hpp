#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cemsim/clock.hpp"

namespace cemsim {

/// A timestamped event that applies to [begins_at, ends_at) on one inverter
/// subsystem. `payload` holds at least a "text" field with the natural
/// language description, optionally numeric metadata.
struct ContextRecord {
  Clock recorded_at;
  Clock begins_at;
  Clock ends_at;
  int subsystem_id = 1;
  nlohmann::json payload = nlohmann::json::object();

  /// The "text" payload field, empty when absent.
  std::string text() const;

  friend bool operator==(const ContextRecord&, const ContextRecord&) = default;
};

/// Builds a record and enforces begins_at < ends_at and recorded_at < ends_at.
/// Throws ValidationError (index 0) on violation.
ContextRecord make_context_record(Clock recorded_at, Clock begins_at, Clock ends_at,
                                  int subsystem_id, nlohmann::json payload);

/// Checks the record invariants; returns an empty string when valid.
std::string validate_context_record(const ContextRecord& record);

/// Records known at `now` that still apply: recorded_at <= now < ends_at.
/// Ordered by begins_at, then recorded_at, then input order.
std::vector<ContextRecord> context_query(std::span<const ContextRecord> records, Clock now);

/// Stable sort into the canonical (begins_at, recorded_at) order.
void normalize_context_order(std::vector<ContextRecord>& records);

}  // namespace cemsim
