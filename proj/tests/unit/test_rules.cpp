#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "morasim/rules.hpp"

using namespace morasim;
using testutil::R;

namespace {

const ProcessorModel& xs() {
    static const ProcessorModel m = ProcessorModel::xscale();
    return m;
}

Rule2Candidate cand(int task, const char* deadline, const char* rem, const char* rem_off,
                    std::optional<Time> disp) {
    return {{task, 1}, {R(deadline), {task, 1}}, R(rem), R(rem_off), 1, 1, std::move(disp)};
}

}  // namespace

TEST_CASE("rule 1 stretches remaining work over the offline remainder") {
    CHECK(rule1_speed(R("0.8"), 2, 1, xs()) == R("0.4"));
    CHECK(rule1_speed(3, 3, 1, xs()) == 1);
    CHECK(rule1_speed(3, 6, 1, xs()) == R("0.6"));
    CHECK(rule1_speed(3, 6, R("0.8"), xs()) == R("0.4"));
    CHECK(rule1_speed(0, 0, 1, xs()) == R("0.15"));
    CHECK(rule1_speed(R("3.6"), 6, 1, xs()) == R("0.6"));
    CHECK(rule1_speed(R("2.5"), R("2.5"), R("0.8"), xs()) == R("0.8"));
    CHECK(rule1_speed(2, 3, 1, xs()) == R("0.8"));
    CHECK_THROWS_AS(rule1_speed(4, 3, 1, xs()), InvariantViolationError);
    CHECK_THROWS_AS(rule1_speed(1, 0, 1, xs()), InvariantViolationError);
    CHECK(earliness(5, 2) == 3);
}

TEST_CASE("rule 2 at t=2 of the five-task example picks tau5 at 0.6") {
    const std::vector<Rule2Candidate> c{cand(3, "16", "3", "8", Time(6)), cand(4, "17", "2", "2", Time(6)),
                                        cand(5, "18", "6", "6", Time(8))};
    const Rule2Decision d = evaluate_rule2(2, Time(6), c, xs());
    REQUIRE(d.evaluations.size() == 3);
    CHECK(d.evaluations[0].saving == 0);
    CHECK(d.evaluations[1].saving == 2350);
    CHECK(d.evaluations[2].saving == 5600);
    CHECK(d.evaluations[2].window == Time(4));
    CHECK(d.evaluations[1].reclaim_speed == R("0.4"));
    CHECK(d.evaluations[1].deferred_speed == 1);
    REQUIRE(d.selected.has_value());
    CHECK(*d.selected == JobId{5, 1});
    CHECK(d.speed == R("0.6"));
    CHECK(d.by_saving);
}

TEST_CASE("rule 2 falls back to the highest priority when nothing saves energy") {
    const std::vector<Rule2Candidate> c{cand(2, "9", "1", "4", Time(5)), cand(1, "8", "1", "4", Time(5))};
    const Rule2Decision d = evaluate_rule2(5, Time(5), c, xs());
    CHECK(d.evaluations[0].window == Time(0));
    CHECK(d.evaluations[1].saving == 0);
    REQUIRE(d.selected.has_value());
    CHECK(*d.selected == JobId{1, 1});
    CHECK_FALSE(d.by_saving);
    CHECK(d.speed == R("0.4"));
}

TEST_CASE("rule 2 skips candidates with no bound at all") {
    const std::vector<Rule2Candidate> c{cand(1, "8", "1", "4", std::nullopt)};
    const Rule2Decision d = evaluate_rule2(0, std::nullopt, c, xs());
    CHECK_FALSE(d.evaluations[0].window.has_value());
    CHECK_FALSE(d.selected.has_value());
    // a processor bound alone is enough
    CHECK(evaluate_rule2(0, Time(10), c, xs()).selected.has_value());
    CHECK(evaluate_rule2(0, std::nullopt, {}, xs()).evaluations.empty());
}

TEST_CASE("rule 2 rejects rem above rem_off") {
    const std::vector<Rule2Candidate> c{cand(1, "8", "5", "4", Time(3))};
    CHECK_THROWS_AS(evaluate_rule2(0, Time(3), c, xs()), InvariantViolationError);
}

TEST_CASE("reclaim speed never exceeds the deferred speed") {
    std::mt19937_64 rng(3);
    const Speed offline[] = {R("0.6"), R("0.8"), 1};
    for (int i = 0; i < 5000; ++i) {
        const Rational rem_off(1 + static_cast<std::int64_t>(rng() % 400), 20);
        const Rational rem = rem_off * Rational(1 + static_cast<std::int64_t>(rng() % 100), 100);
        const Time disp(static_cast<std::int64_t>(rng() % 200), 10);
        Rule2Candidate c{{1, 1}, {R("1"), {1, 1}}, rem, rem_off, offline[rng() % 3], 1, disp};
        const auto d = evaluate_rule2(0, std::nullopt, std::span(&c, 1), xs());
        const auto& ev = d.evaluations[0];
        CHECK(ev.reclaim_speed <= ev.deferred_speed);
        CHECK(xs().has_speed(ev.reclaim_speed));
        // deferred speed lets the job finish inside its offline remainder
        CHECK(rem / ev.deferred_speed <= rem_off / c.offline_speed);
    }
}
