#ifndef MORASIM_TESTS_HELPERS_HPP
#define MORASIM_TESTS_HELPERS_HPP

#include <doctest.h>

#include <ostream>
#include <string>
#include <vector>

#include "morasim/engine.hpp"

namespace morasim {

inline doctest::String toString(const Rational& r) { return r.str().c_str(); }
inline doctest::String toString(const JobId& id) { return to_string(id).c_str(); }

}  // namespace morasim

namespace testutil {

using morasim::Rational;

inline Rational R(const char* text) { return Rational::parse(text); }

inline morasim::Task task(int id, const char* c, const char* d, const char* t, const char* e = "1") {
    return {id, R(c), R(d), R(t), R(e)};
}

// The five-task example: (C, D, T) = (6,14,30) (6,15,35) (8,16,40) (2,17,45) (6,18,50).
inline morasim::TaskSet example_tasks() {
    return {task(1, "6", "14", "30"), task(2, "6", "15", "35"), task(3, "8", "16", "40"), task(4, "2", "17", "45"),
            task(5, "6", "18", "50")};
}

// First jobs only, actual times 3, 2, 3, 2, 6.
inline std::vector<morasim::JobRelease> example_releases() {
    return {{{1, 1}, 0, 3}, {{2, 1}, 0, 2}, {{3, 1}, 0, 3}, {{4, 1}, 0, 2}, {{5, 1}, 0, 6}};
}

inline morasim::SimResult run_example(morasim::Policy policy = morasim::Policy::mora(),
                                   morasim::RemainingModel rem = morasim::RemainingModel::Actual) {
    morasim::SimConfig config;
    config.policy = std::move(policy);
    config.processors = 2;
    config.horizon = Rational(20);
    config.remaining = rem;
    const auto tasks = example_tasks();
    return morasim::simulate(tasks, example_releases(), config, morasim::ProcessorModel::xscale());
}

struct Box {
    std::size_t proc;  // 1-based
    morasim::JobId job;
    Rational speed;
    Rational start;
    Rational end;
    bool operator==(const Box&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b) {
    return os << "P" << b.proc << " " << morasim::to_string(b.job) << " [" << b.start << "," << b.end << ")@" << b.speed;
}

inline std::ostream& operator<<(std::ostream& os, const std::vector<Box>& list) {
    os << "{";
    for (const auto& b : list) os << " " << b;
    return os << " }";
}

inline std::vector<Box> boxes(const std::vector<morasim::Interval>& intervals) {
    std::vector<Box> out;
    for (const auto& iv : morasim::merge_intervals(intervals))
        out.push_back({iv.proc + 1, iv.job, iv.speed, iv.start, iv.end});
    return out;
}

inline std::vector<Box> boxes_of(const std::vector<morasim::Interval>& intervals, const morasim::JobId& job) {
    std::vector<Box> out;
    for (const auto& b : boxes(intervals))
        if (b.job == job) out.push_back(b);
    return out;
}

}  // namespace testutil

#endif
