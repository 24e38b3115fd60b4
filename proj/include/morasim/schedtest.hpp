#ifndef MORASIM_SCHEDTEST_HPP
#define MORASIM_SCHEDTEST_HPP

#include <map>
#include <span>
#include <string>

#include "morasim/model.hpp"

namespace morasim {

struct SizingResult {
    std::size_t m = 1;
    std::string test_used;
    Rational margin;  // right-hand side minus left-hand side of the passing test
};

// Global-EDF density bound:
//   sum_i C_i/(s D_i) <= m (1 - max_i C_i/(s D_i)) + max_i C_i/(s D_i)
// with every scaled density <= 1. An empty set always passes.
bool density_test(std::span<const Task> tasks, std::size_t m, const Speed& speed = 1);

// Slack of the density inequality (negative when it fails). Ignores the
// per-task <= 1 precondition.
Rational density_margin(const DensityStats& stats, std::size_t m);

// Smallest m that passes density_test at speed 1. Throws Error when some
// density exceeds 1, or when a density of exactly 1 sits next to other tasks
// (no m certifies such a set).
SizingResult min_processors(std::span<const Task> tasks);

// min_processors capped at n: with one processor per task every job runs
// alone, so n processors always suffice for constrained deadlines.
SizingResult size_platform(std::span<const Task> tasks);

// Density test with each task scaled by its own offline speed. Throws Error
// when an assigned speed is missing from the model or a task has no entry.
bool validate_offline_speeds(std::span<const Task> tasks, const std::map<TaskId, Speed>& assignment, std::size_t m,
                             const ProcessorModel& model);

}  // namespace morasim

#endif  // MORASIM_SCHEDTEST_HPP
