#include "cemsim/engine/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cemsim::engine {

namespace {

class SummarySink final : public StepSink {
 public:
  void consume(const SimulatorStepOutput& out) override {
    ++steps;
    soc = out.battery.soc;
  }
  std::size_t steps = 0;
  double soc = 0.0;
};

}  // namespace

int effective_jobs(int jobs) {
#ifdef _OPENMP
  return jobs > 0 ? jobs : omp_get_max_threads();
#else
  (void)jobs;
  return 1;
#endif
}

void serial_for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

void parallel_for_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(effective_jobs(jobs))
#endif
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  (void)jobs;
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunSummary run_to_summary(Simulator& sim, std::int64_t total_ticks, std::int64_t step_ticks) {
  SummarySink sink;
  sink.soc = sim.last_battery().soc;
  sim.run(total_ticks, step_ticks, sink);
  return {sink.steps, sim.now(), sim.aggregates(), sim.maxima(), sink.soc};
}

std::vector<RunSummary> run_batch_serial(std::span<const BatchItem> items) {
  std::vector<RunSummary> out(items.size());
  serial_for_index(items.size(), [&](std::size_t i) {
    auto sim = items[i].make();
    out[i] = run_to_summary(*sim, items[i].total_ticks, items[i].step_ticks);
  });
  return out;
}

std::vector<RunSummary> run_batch_parallel(std::span<const BatchItem> items, int jobs) {
  std::vector<RunSummary> out(items.size());
  parallel_for_index(items.size(), jobs, [&](std::size_t i) {
    auto sim = items[i].make();
    out[i] = run_to_summary(*sim, items[i].total_ticks, items[i].step_ticks);
  });
  return out;
}

}  // namespace cemsim::engine
