#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "morasim/engine.hpp"
#include "morasim/workload.hpp"

using namespace morasim;
using testutil::Box;
using testutil::R;

namespace {

bool has_violation(const SimTrace& trace, InvariantKind kind) {
    return std::any_of(trace.violations.begin(), trace.violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("reclaiming schedule of the five-task example") {
    const SimResult r = testutil::run_example();
    const std::vector<Box> expected{
        {1, {1, 1}, 1, 0, 3},         {1, {4, 1}, R("0.4"), 3, 6}, {1, {3, 1}, R("0.4"), 6, R("13.5")},
        {2, {2, 1}, 1, 0, 2},         {2, {5, 1}, R("0.6"), 2, 6}, {2, {4, 1}, R("0.4"), 6, 8},
        {2, {5, 1}, R("0.6"), 8, 14},
    };
    CHECK(testutil::boxes(r.trace.intervals) == expected);
    CHECK(r.energy.total == 14625);
    CHECK(r.energy.idle == 500);
    CHECK(r.trace.violations.empty());
    CHECK(r.trace.outcome({5, 1})->completion == Time(14));
    CHECK(r.trace.outcome({3, 1})->completion == R("13.5"));

    const std::vector<Box> offline{
        {1, {1, 1}, 1, 0, 6}, {1, {3, 1}, 1, 6, 14}, {2, {2, 1}, 1, 0, 6}, {2, {4, 1}, 1, 6, 8}, {2, {5, 1}, 1, 8, 14},
    };
    CHECK(testutil::boxes(r.trace.offline_intervals) == offline);
}

TEST_CASE("rule 2 trace at t=2 lists the candidate savings") {
    const SimResult r = testutil::run_example();
    const auto it = std::find_if(r.trace.events.begin(), r.trace.events.end(), [](const TraceEvent& e) {
        return e.kind == EventKind::Rule2 && e.time == Time(2);
    });
    REQUIRE(it != r.trace.events.end());
    CHECK(it->job == JobId{5, 1});
    CHECK(it->new_speed == R("0.6"));
    std::vector<Rational> savings;
    for (const auto& c : it->candidates) savings.push_back(c.saving);
    std::sort(savings.begin(), savings.end());
    CHECK(savings == std::vector<Rational>{0, 2350, 5600});
}

TEST_CASE("MAX runs everything at full speed") {
    const SimResult r = testutil::run_example(Policy::max());
    CHECK(r.trace.outcome({5, 1})->completion == Time(11));
    CHECK(r.energy.total == 26560);
    CHECK(r.trace.offline_intervals.empty());
    for (const auto& iv : r.trace.intervals) CHECK(iv.speed == 1);
    CHECK(normalized_pct(testutil::run_example().energy, r.energy) == Rational(73125, 1328));
}

TEST_CASE("CONST and DM") {
    const TaskSet tasks{testutil::task(1, "3", "10", "10"), testutil::task(2, "1", "4", "20")};
    SimConfig c;
    c.policy = Policy::constant(R("0.6"));
    c.horizon = Time(10);
    const std::vector<JobRelease> rel{{{1, 1}, 0, 3}, {{2, 1}, 0, 1}};
    const SimResult r = simulate(tasks, rel, c, ProcessorModel::xscale());
    // EDF: tau2 (deadline 4) first
    CHECK(r.trace.outcome({2, 1})->completion == R("5/3"));
    CHECK(r.trace.outcome({1, 1})->completion == R("20/3"));
    c.priority = PriorityOrder::Dm;
    CHECK(simulate(tasks, rel, c, ProcessorModel::xscale()).trace.outcome({2, 1})->completion == R("5/3"));
    c.policy = Policy::constant(R("0.5"));
    CHECK_THROWS_AS(simulate(tasks, rel, c, ProcessorModel::xscale()), Error);
}

TEST_CASE("empty task set burns idle power only") {
    SimConfig c;
    c.processors = 3;
    c.horizon = Time(10);
    const SimResult r = simulate(TaskSet{}, {}, c, ProcessorModel::xscale());
    CHECK(r.energy.total == 3 * 10 * 40);
    CHECK(r.trace.intervals.empty());
}

TEST_CASE("deadline miss is reported") {
    const TaskSet tasks{testutil::task(1, "3", "4", "4"), testutil::task(2, "3", "4", "4")};
    SimConfig c;
    c.policy = Policy::max();
    c.horizon = Time(4);
    const std::vector<JobRelease> rel{{{1, 1}, 0, 3}, {{2, 1}, 0, 3}};
    CHECK_THROWS_AS(simulate(tasks, rel, c, ProcessorModel::xscale()), DeadlineMissError);
    c.fail_fast = false;
    const SimResult r = simulate(tasks, rel, c, ProcessorModel::xscale());
    REQUIRE(r.trace.violations.size() == 1);
    CHECK(r.trace.violations[0].kind == InvariantKind::DeadlineMiss);
    CHECK(r.trace.violations[0].job == JobId{2, 1});
}

TEST_CASE("skipping the rule 1 preemption breaks the offline mirror") {
    SimConfig c;
    c.processors = 2;
    c.horizon = Time(20);
    c.fail_fast = false;
    c.faults.skip_rule1_preemption = true;
    const auto tasks = testutil::example_tasks();
    const SimResult r = simulate(tasks, testutil::example_releases(), c, ProcessorModel::xscale());
    CHECK(has_violation(r.trace, InvariantKind::OfflineRunningActualWaiting));
    c.fail_fast = true;
    CHECK_THROWS_AS(simulate(tasks, testutil::example_releases(), c, ProcessorModel::xscale()), InvariantViolationError);
}

TEST_CASE("release validation and horizon handling") {
    const TaskSet tasks{testutil::task(1, "1", "5", "5")};
    SimConfig c;
    c.horizon = Time(3);
    const std::vector<JobRelease> late{{{1, 1}, 4, 1}};
    const SimResult r = simulate(tasks, late, c, ProcessorModel::xscale());
    CHECK_FALSE(r.trace.warnings.empty());
    const std::vector<JobRelease> close{{{1, 1}, 0, 1}, {{1, 2}, 2, 1}};
    c.horizon = Time(10);
    CHECK_THROWS_AS(simulate(tasks, close, c, ProcessorModel::xscale()), Error);
    const std::vector<JobRelease> unknown{{{9, 1}, 0, 1}};
    CHECK_THROWS_AS(simulate(tasks, unknown, c, ProcessorModel::xscale()), Error);
    c.horizon.reset();
    CHECK(simulate(tasks, wcet_releases(tasks, 5), c, ProcessorModel::xscale()).trace.horizon == Time(500));
    CHECK(wcet_releases(tasks, 11).size() == 3);
}

TEST_CASE("simulation is deterministic") {
    const RandomInstance inst = random_instance(42);
    SimConfig c;
    c.processors = inst.processors;
    c.horizon = inst.horizon;
    const SimResult a = simulate(inst.tasks, inst.releases, c, ProcessorModel::xscale());
    const SimResult b = simulate(inst.tasks, inst.releases, c, ProcessorModel::xscale());
    CHECK(a.energy.total == b.energy.total);
    CHECK(testutil::boxes(a.trace.intervals) == testutil::boxes(b.trace.intervals));
}

TEST_CASE("both remaining-work models keep the invariants on random sets") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const RandomInstance inst = random_instance(seed);
        for (auto rem : {RemainingModel::Actual, RemainingModel::WorstCase}) {
            SimConfig c;
            c.processors = inst.processors;
            c.horizon = inst.horizon;
            c.remaining = rem;
            c.fail_fast = false;
            const SimResult r = simulate(inst.tasks, inst.releases, c, ProcessorModel::xscale());
            INFO("seed " << seed << " model " << to_string(rem));
            CHECK(r.trace.violations.empty());
        }
    }
}

TEST_CASE("worst-case remaining model on the five-task example") {
    const SimResult r = testutil::run_example(Policy::mora(), RemainingModel::WorstCase);
    CHECK(r.trace.violations.empty());
    CHECK(r.energy.total <= testutil::run_example(Policy::max()).energy.total);
    CHECK(parse_remaining_model("wcet") == RemainingModel::WorstCase);
    CHECK_THROWS_AS(parse_remaining_model("optimistic"), Error);
}
