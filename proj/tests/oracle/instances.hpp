#ifndef MORASIM_TESTS_INSTANCES_HPP
#define MORASIM_TESTS_INSTANCES_HPP

#include <random>
#include <vector>

#include "morasim/engine.hpp"
#include "morasim/schedtest.hpp"
#include "morasim/workload.hpp"

namespace oracle {

struct Instance {
    std::vector<morasim::Task> tasks;
    std::vector<morasim::JobRelease> releases;
    std::size_t processors = 1;
    morasim::Time horizon;
};

// Small instance with every parameter a multiple of `grain` tenths.
// With `dense`, m is the capacity bound ceil(density sum) instead of the
// density-test size, so processors are busy and reclaiming happens often
// (deadlines may then be missed; the schedules must still agree).
inline Instance small_instance(std::uint64_t seed, std::int64_t grain = 1, bool dense = false) {
    using morasim::Rational;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    static const std::int64_t periods[] = {3, 4, 5, 6, 8, 10, 12};
    Instance inst;
    const auto n = pick(2, 5);
    for (std::int64_t i = 1; i <= n; ++i) {
        morasim::Task t;
        t.id = static_cast<morasim::TaskId>(i);
        const std::int64_t T = periods[pick(0, 6)];
        const std::int64_t steps = T * 10 / grain;
        const std::int64_t d = pick(std::max<std::int64_t>(1, steps / 2), steps);
        const std::int64_t c = pick(1, d);
        t.period = T;
        t.deadline = Rational(d * grain, 10);
        t.wcet = Rational(c * grain, 10);
        t.energy_factor = Rational(pick(8, 12), 10);
        inst.tasks.push_back(t);
    }
    inst.processors = morasim::size_platform(inst.tasks).m;
    if (dense) {
        const auto need = morasim::density_stats(inst.tasks).sum.ceil().convert_to<std::size_t>();
        inst.processors = std::max<std::size_t>(1, std::min(inst.processors, need));
    }
    inst.horizon = morasim::min(morasim::hyperperiod(inst.tasks), Rational(30));
    for (const auto& t : inst.tasks) {
        const std::int64_t c = (t.wcet * 10 / grain).numerator().convert_to<std::int64_t>();
        std::int64_t k = 1;
        for (Rational a = 0; a < inst.horizon; a += t.period) {
            const std::int64_t lo = std::max<std::int64_t>(1, (c + 9) / 10);
            inst.releases.push_back({{t.id, k++}, a, Rational(pick(lo, c) * grain, 10)});
        }
    }
    return inst;
}

}  // namespace oracle

#endif
