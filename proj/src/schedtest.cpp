#include "morasim/schedtest.hpp"

namespace morasim {

namespace {

bool passes(const std::vector<Rational>& densities, std::size_t m) {
    DensityStats stats;
    for (const auto& d : densities) {
        if (Rational(1) < d) return false;
        stats.sum += d;
        stats.max = max(stats.max, d);
    }
    return density_margin(stats, m).sign() >= 0;
}

}  // namespace

Rational density_margin(const DensityStats& stats, std::size_t m) {
    return Rational(static_cast<std::int64_t>(m)) * (Rational(1) - stats.max) + stats.max - stats.sum;
}

bool density_test(std::span<const Task> tasks, std::size_t m, const Speed& speed) {
    if (m == 0) throw Error("density test needs m >= 1");
    if (speed.sign() <= 0 || Rational(1) < speed) throw Error("speed scale must lie in (0, 1]");
    std::vector<Rational> densities;
    densities.reserve(tasks.size());
    for (const auto& t : tasks) densities.push_back(density(t) / speed);
    return passes(densities, m);
}

SizingResult min_processors(std::span<const Task> tasks) {
    const DensityStats stats = density_stats(tasks);
    for (const auto& t : tasks)
        if (Rational(1) < density(t))
            throw Error("task " + std::to_string(t.id) + " has density " + density(t).str() + " > 1");
    std::size_t m = 1;
    if (stats.max == 1) {
        if (tasks.size() > 1) throw Error("a task with density 1 cannot be certified next to other tasks");
    } else {
        const BigInt need = ((stats.sum - stats.max) / (Rational(1) - stats.max)).ceil();
        if (need > 1) m = need.convert_to<std::size_t>();
    }
    if (!density_test(tasks, m) || (m > 1 && density_test(tasks, m - 1)))
        throw Error("internal error: density closed form disagrees with the predicate");
    return {m, "density", density_margin(stats, m)};
}

SizingResult size_platform(std::span<const Task> tasks) {
    const std::size_t n = std::max<std::size_t>(tasks.size(), 1);
    for (const auto& t : tasks)
        if (Rational(1) < density(t))
            throw Error("task " + std::to_string(t.id) + " has density " + density(t).str() + " > 1");
    try {
        SizingResult r = min_processors(tasks);
        if (r.m <= n) return r;
    } catch (const Error&) {
        if (tasks.size() <= 1) throw;
    }
    return {n, "one-per-task", 0};
}

bool validate_offline_speeds(std::span<const Task> tasks, const std::map<TaskId, Speed>& assignment, std::size_t m,
                             const ProcessorModel& model) {
    if (m == 0) throw Error("validation needs m >= 1");
    std::vector<Rational> densities;
    for (const auto& t : tasks) {
        auto it = assignment.find(t.id);
        if (it == assignment.end()) throw Error("no offline speed for task " + std::to_string(t.id));
        if (!model.has_speed(it->second))
            throw Error("offline speed " + it->second.str() + " of task " + std::to_string(t.id) +
                        " is not a level of '" + model.name() + "'");
        densities.push_back(density(t) / it->second);
    }
    return passes(densities, m);
}

}  // namespace morasim
