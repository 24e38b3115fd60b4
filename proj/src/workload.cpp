#include "morasim/workload.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/seed_seq.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "morasim/schedtest.hpp"

namespace morasim {

namespace {

using Engine = boost::random::mt19937_64;

std::int64_t draw(Engine& rng, std::int64_t lo, std::int64_t hi) {
    return boost::random::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::int64_t thousandths_floor(const Rational& x) { return (x * 1000).floor().convert_to<std::int64_t>(); }
std::int64_t thousandths_ceil(const Rational& x) { return (x * 1000).ceil().convert_to<std::int64_t>(); }

Rational round_thousandths(const Rational& x) {
    return Rational((x * 1000 + Rational(1, 2)).floor().convert_to<std::int64_t>(), 1000);
}

Engine make_engine(std::initializer_list<std::uint64_t> seeds) {
    std::vector<std::uint32_t> words;
    for (auto s : seeds) {
        words.push_back(static_cast<std::uint32_t>(s));
        words.push_back(static_cast<std::uint32_t>(s >> 32));
    }
    boost::random::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

}  // namespace

void validate_spec(const GenSpec& spec) {
    if (spec.d_max < Rational(1, 100) || Rational(1) < spec.d_max) throw Error("d_max must lie in [0.01, 1]");
    if (spec.band_low.sign() < 0) throw Error("the density band must start at or above 0");
    if (spec.band_width.sign() <= 0) throw Error("the density band must have a positive width");
    if (spec.band_low + spec.band_width < Rational(1, 100))
        throw Error("the density band ends below the smallest density 0.01");
    if (spec.period_pool.empty()) throw Error("the period pool is empty");
    for (const auto& p : spec.period_pool)
        if (p.sign() <= 0) throw Error("periods must be positive");
    if (spec.e_low.sign() < 0 || spec.e_high < spec.e_low) throw Error("invalid energy-factor range");
}

TaskSet generate_taskset(const GenSpec& spec) {
    validate_spec(spec);
    Engine rng = make_engine({spec.seed});
    const std::int64_t lo = 10;
    const std::int64_t hi = thousandths_floor(spec.d_max);
    const Rational top = spec.band_low + spec.band_width;

    std::vector<Rational> densities;
    for (;;) {
        densities.clear();
        Rational sum = 0;
        bool rejected = false;
        while (densities.empty() || sum < spec.band_low) {
            Rational d(draw(rng, lo, hi), 1000);
            if (top < sum + d) {
                if (spec.overshoot == OvershootPolicy::Reject) {
                    rejected = true;
                    break;
                }
                d = top - sum;
                if (d < Rational(1, 100)) continue;
            }
            sum += d;
            densities.push_back(d);
        }
        if (!rejected) break;
    }

    TaskSet tasks;
    const auto pool = static_cast<std::int64_t>(spec.period_pool.size());
    const std::int64_t e_lo = thousandths_ceil(spec.e_low);
    const std::int64_t e_hi = std::max(e_lo, thousandths_floor(spec.e_high));
    for (std::size_t i = 0; i < densities.size(); ++i) {
        Task t;
        t.id = static_cast<TaskId>(i + 1);
        t.period = spec.period_pool[static_cast<std::size_t>(draw(rng, 0, pool - 1))];
        t.deadline = t.period;
        t.wcet = max(round_thousandths(densities[i] * t.deadline), Rational(1, 1000));
        if (t.deadline < t.wcet) t.wcet = t.deadline;
        t.energy_factor = Rational(draw(rng, e_lo, e_hi), 1000);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::vector<JobRelease> generate_actual_times(std::span<const Task> tasks, const Time& horizon, std::uint64_t seed) {
    if (horizon.sign() <= 0) throw Error("the horizon must be positive");
    std::vector<JobRelease> out;
    for (const auto& task : tasks) {
        Engine rng = make_engine({seed, static_cast<std::uint64_t>(task.id)});
        const std::int64_t lo = thousandths_ceil(task.wcet / 10);
        const std::int64_t hi = thousandths_floor(task.wcet);
        std::int64_t index = 1;
        for (Time a = 0; a < horizon; a += task.period) {
            Work actual = hi < lo ? task.wcet : Rational(draw(rng, lo, hi), 1000);
            out.push_back({{task.id, index++}, a, actual});
        }
    }
    return out;
}

Time hyperperiod(std::span<const Task> tasks) {
    Time h = 0;
    for (const auto& t : tasks) h = h.is_zero() ? t.period : lcm(h, t.period);
    return h;
}

RandomInstance random_instance(std::uint64_t seed, std::size_t max_tasks, std::size_t max_processors,
                               std::int64_t hyperperiods) {
    if (max_tasks == 0 || max_processors == 0) throw Error("random instances need at least one task and processor");
    Engine rng = make_engine({seed, 0x5eedULL});
    const GenSpec defaults;
    RandomInstance inst;
    inst.seed = seed;
    for (;;) {
        const auto n = static_cast<std::size_t>(draw(rng, 1, static_cast<std::int64_t>(max_tasks)));
        TaskSet tasks;
        for (std::size_t i = 0; i < n; ++i) {
            Task t;
            t.id = static_cast<TaskId>(i + 1);
            t.period = defaults.period_pool[static_cast<std::size_t>(
                draw(rng, 0, static_cast<std::int64_t>(defaults.period_pool.size()) - 1))];
            t.deadline = t.period;
            t.wcet = Rational(draw(rng, 1, 1000), 1000) * t.deadline;
            t.energy_factor = Rational(draw(rng, 800, 1200), 1000);
            tasks.push_back(std::move(t));
        }
        const SizingResult sizing = size_platform(tasks);
        if (sizing.m > max_processors) continue;
        inst.tasks = std::move(tasks);
        inst.processors = sizing.m;
        break;
    }
    inst.horizon = hyperperiod(inst.tasks) * hyperperiods;
    inst.releases = generate_actual_times(inst.tasks, inst.horizon, seed);
    return inst;
}

}  // namespace morasim
