#ifndef MORASIM_WORKLOAD_HPP
#define MORASIM_WORKLOAD_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "morasim/model.hpp"

namespace morasim {

enum class OvershootPolicy {
    Clamp,   // shrink the overshooting draw so the sum lands on the band's top edge
    Reject,  // throw the whole set away and start over
};

struct GenSpec {
    Rational band_low = 0;      // total density lands in [band_low, band_low + band_width]
    Rational band_width = Rational(1, 20);
    Rational d_max = 1;         // per-task density cap, in [0.01, 1]
    std::vector<Time> period_pool{10, 20, 40, 50, 80, 100};
    Rational e_low = Rational(4, 5);
    Rational e_high = Rational(6, 5);
    OvershootPolicy overshoot = OvershootPolicy::Clamp;
    std::uint64_t seed = 0;
};

// Throws Error on an invalid spec.
void validate_spec(const GenSpec& spec);

// Implicit-deadline periodic task set (ids 1..n). Densities are drawn in
// thousandths from [0.01, d_max] until the sum enters the band.
TaskSet generate_taskset(const GenSpec& spec);

// Periodic releases k*T below the horizon with actual execution times drawn
// in thousandths from [C/10, C]. Each task draws from its own stream, so
// adding a task does not disturb the others.
std::vector<JobRelease> generate_actual_times(std::span<const Task> tasks, const Time& horizon, std::uint64_t seed);

// lcm of all periods; 0 for an empty set.
Time hyperperiod(std::span<const Task> tasks);

// A random instance for invariant fuzzing: 1..max_tasks tasks with periods
// from the default pool, m from size_platform (at most max_processors),
// horizon `hyperperiods` hyperperiods and actual times from [C/10, C].
struct RandomInstance {
    std::uint64_t seed = 0;
    TaskSet tasks;
    std::size_t processors = 1;
    Time horizon;
    std::vector<JobRelease> releases;
};

RandomInstance random_instance(std::uint64_t seed, std::size_t max_tasks = 8, std::size_t max_processors = 4,
                               std::int64_t hyperperiods = 2);

}  // namespace morasim

#endif  // MORASIM_WORKLOAD_HPP
