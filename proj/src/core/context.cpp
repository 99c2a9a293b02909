#include "cemsim/context.hpp"

#include <algorithm>

#include "cemsim/errors.hpp"

namespace cemsim {

std::string ContextRecord::text() const {
  if (payload.is_object()) {
    const auto it = payload.find("text");
    if (it != payload.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

std::string validate_context_record(const ContextRecord& record) {
  if (!(record.begins_at < record.ends_at)) {
    return "ends_at (" + std::to_string(record.ends_at.epoch_ns()) +
           ") must be after begins_at (" + std::to_string(record.begins_at.epoch_ns()) + ")";
  }
  if (!(record.recorded_at < record.ends_at)) {
    return "recorded_at (" + std::to_string(record.recorded_at.epoch_ns()) +
           ") must be before ends_at (" + std::to_string(record.ends_at.epoch_ns()) + ")";
  }
  if (!record.payload.is_object()) return "payload must be a JSON object";
  return {};
}

ContextRecord make_context_record(Clock recorded_at, Clock begins_at, Clock ends_at,
                                  int subsystem_id, nlohmann::json payload) {
  ContextRecord record{recorded_at, begins_at, ends_at, subsystem_id, std::move(payload)};
  if (auto problem = validate_context_record(record); !problem.empty()) {
    throw ValidationError("context record: " + problem, 0);
  }
  return record;
}

namespace {

bool canonical_less(const ContextRecord& a, const ContextRecord& b) {
  if (a.begins_at != b.begins_at) return a.begins_at < b.begins_at;
  return a.recorded_at < b.recorded_at;
}

}  // namespace

void normalize_context_order(std::vector<ContextRecord>& records) {
  std::stable_sort(records.begin(), records.end(), canonical_less);
}

std::vector<ContextRecord> context_query(std::span<const ContextRecord> records, Clock now) {
  std::vector<ContextRecord> out;
  for (const auto& r : records) {
    if (r.recorded_at <= now && now < r.ends_at) out.push_back(r);
  }
  normalize_context_order(out);
  return out;
}

}  // namespace cemsim
