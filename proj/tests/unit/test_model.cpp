#include <doctest.h>

#include "helpers.hpp"
#include "morasim/model.hpp"

using namespace morasim;
using testutil::R;

TEST_CASE("xscale table") {
    const ProcessorModel m = ProcessorModel::xscale();
    REQUIRE(m.levels().size() == 5);
    CHECK(m.levels()[0].speed == R("0.15"));
    CHECK(m.levels()[4].speed == 1);
    CHECK(m.power(R("0.6")) == 400);
    CHECK(m.idle_power() == 40);
    CHECK(m.f_max_mhz() == 1000);
    CHECK(m.min_speed() == R("3/20"));
    CHECK_FALSE(m.has_speed(R("0.5")));
    CHECK_THROWS_AS((void)m.power(R("0.5")), Error);
}

TEST_CASE("speed quantizer rounds up to the next table speed") {
    const ProcessorModel m = ProcessorModel::xscale();
    CHECK(quantize_speed(R("0.5"), m) == R("0.6"));
    CHECK(quantize_speed(R("0.6"), m) == R("0.6"));
    CHECK(quantize_speed(R("2/3"), m) == R("0.8"));
    CHECK(quantize_speed(R("0.01"), m) == R("0.15"));
    CHECK(quantize_speed(0, m) == R("0.15"));
    CHECK(quantize_speed(1, m) == 1);
    CHECK_THROWS_AS(quantize_speed(R("1.01"), m), Error);
}

TEST_CASE("energy of one unit equals the table power") {
    const ProcessorModel m = ProcessorModel::xscale();
    for (const auto& level : m.levels()) CHECK(energy(1, 1, level.speed, m) == level.power_mw);
    // e scales only the active part above idle
    CHECK(energy(R("0.5"), 2, 1, m) == 2 * (R("0.5") * (1600 - 40) + 40));
    CHECK(idle_energy(10, m) == 400);
    CHECK(energy(0, 5, R("0.4"), m) == 200);
    CHECK(energy(1, 0, 1, m) == 0);
    CHECK(wcet_at_speed(R("3.6"), R("0.6")) == 6);
    CHECK_THROWS(wcet_at_speed(1, 0));
}

TEST_CASE("processor model validation") {
    using L = SpeedLevel;
    CHECK_THROWS_AS(ProcessorModel("x", 1, {}, 0), Error);
    CHECK_THROWS_AS(ProcessorModel("x", 1, {L{1, R("0.5"), 10}}, 1), Error);  // last speed must be 1
    CHECK_THROWS_AS(ProcessorModel("x", 1, {L{1, R("0.5"), 10}, L{2, R("0.4"), 20}, L{3, 1, 30}}, 1), Error);
    CHECK_THROWS_AS(ProcessorModel("x", 1, {L{1, R("0.5"), 30}, L{2, 1, 20}}, 1), Error);
    CHECK_THROWS_AS(ProcessorModel("x", 1, {L{1, R("0.5"), 10}, L{2, 1, 20}}, 11), Error);
    CHECK_NOTHROW(ProcessorModel("x", 1, {L{1, R("0.5"), 10}, L{2, 1, 20}}, 10));
}

TEST_CASE("task validation and densities") {
    CHECK_NOTHROW(validate_task(testutil::task(1, "6", "14", "30")));
    CHECK_THROWS_AS(validate_task(testutil::task(1, "0", "14", "30")), Error);
    CHECK_THROWS_AS(validate_task(testutil::task(1, "15", "14", "30")), Error);
    CHECK_THROWS_AS(validate_task(testutil::task(1, "6", "31", "30")), Error);
    CHECK_THROWS_AS(validate_task(testutil::task(1, "6", "14", "30", "-1")), Error);
    const TaskSet dup{testutil::task(1, "1", "2", "2"), testutil::task(1, "1", "2", "2")};
    CHECK_THROWS_AS(validate_taskset(dup), Error);

    const auto tasks = testutil::example_tasks();
    const DensityStats s = density_stats(tasks);
    CHECK(s.max == R("1/2"));
    CHECK(s.sum == R("3/7") + R("2/5") + R("1/2") + R("2/17") + R("1/3"));
    CHECK(s.sum.to_double() == doctest::Approx(1.7795).epsilon(1e-4));
    CHECK(density_stats(tasks, R("0.4")).max == R("1.25"));
    CHECK(density_stats(TaskSet{}).sum == 0);
}

TEST_CASE("priority keys") {
    const Task a = testutil::task(1, "1", "10", "10");
    const Task b = testutil::task(2, "1", "5", "20");
    const Job ja = make_job(a, {{1, 1}, 0, 1}, 1);
    const Job jb = make_job(b, {{2, 1}, 6, 1}, 1);
    CHECK(ja.absolute_deadline() == 10);
    CHECK(jb.absolute_deadline() == 11);
    CHECK(priority_key(PriorityOrder::Edf, ja) < priority_key(PriorityOrder::Edf, jb));
    CHECK(priority_key(PriorityOrder::Dm, jb) < priority_key(PriorityOrder::Dm, ja));
    // ties fall back to the task id
    const Job jc = make_job(b, {{2, 1}, 5, 1}, 1);
    CHECK(priority_key(PriorityOrder::Edf, ja) < priority_key(PriorityOrder::Edf, jc));
    CHECK_THROWS_AS(make_job(a, {{1, 1}, 0, 2}, 1), Error);
    CHECK_THROWS_AS(make_job(a, {{1, 1}, 0, 0}, 1), Error);
    CHECK_THROWS_AS(make_job(a, {{2, 1}, 0, 1}, 1), Error);
    CHECK(parse_priority_order("dm") == PriorityOrder::Dm);
    CHECK_THROWS_AS(parse_priority_order("rm"), Error);
    CHECK(to_string(JobId{5, 1}) == "tau5,1");
}
