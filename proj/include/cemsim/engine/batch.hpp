#pragma once

// Whole-simulation fan-out. Each simulation stays single-threaded; the
// OpenMP kernel distributes independent simulations across threads. The
// serial kernel is the reference the parallel one is tested against.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cemsim/engine/simulator.hpp"

namespace cemsim::engine {

/// Calls fn(i) for i in [0, n) on up to `jobs` OpenMP threads (jobs <= 0
/// means the OpenMP default). The first exception, by index, is rethrown
/// after all iterations finish.
void parallel_for_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Same contract, plain loop on the calling thread.
void serial_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

struct BatchItem {
  std::function<std::unique_ptr<Simulator>()> make;
  std::int64_t total_ticks = 0;
  std::int64_t step_ticks = 1;
};

struct RunSummary {
  std::size_t steps = 0;
  Clock end;
  Aggregates aggregates;
  Maxima maxima;
  double final_soc = 0.0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

RunSummary run_to_summary(Simulator& sim, std::int64_t total_ticks, std::int64_t step_ticks);

std::vector<RunSummary> run_batch_serial(std::span<const BatchItem> items);
std::vector<RunSummary> run_batch_parallel(std::span<const BatchItem> items, int jobs);

/// Threads OpenMP would use for `jobs` (1 when built without OpenMP).
int effective_jobs(int jobs);

}  // namespace cemsim::engine
