#ifndef MORASIM_TESTS_COMPARE_HPP
#define MORASIM_TESTS_COMPARE_HPP

#include <sstream>
#include <string>

#include "brute_force.hpp"
#include "instances.hpp"

namespace oracle {

struct Comparison {
    bool aligned = false;  // false: the oracle cannot judge this instance
    bool match = false;
    bool rule2_selected = false;
    std::string diff;
};

// Runs the engine and the tick oracle on one instance and compares merged
// intervals and total energy exactly.
inline Comparison compare(const Instance& inst, morasim::RemainingModel model = morasim::RemainingModel::Actual) {
    using namespace morasim;
    Comparison out;
    const Result o = run(inst.tasks, inst.releases, inst.processors, inst.horizon, model);
    if (!o.aligned) return out;
    out.aligned = true;
    SimConfig c;
    c.processors = inst.processors;
    c.horizon = inst.horizon;
    c.remaining = model;
    c.fail_fast = false;
    const SimResult r = simulate(inst.tasks, inst.releases, c, ProcessorModel::xscale());
    for (const auto& e : r.trace.events)
        if (e.kind == EventKind::Rule2 && e.job) out.rule2_selected = true;
    const auto merged = merge_intervals(r.trace.intervals);
    std::ostringstream diff;
    out.match = true;
    if (merged.size() != o.intervals.size()) {
        out.match = false;
        diff << merged.size() << " intervals vs " << o.intervals.size() << "; ";
    }
    for (std::size_t i = 0; i < std::min(merged.size(), o.intervals.size()); ++i) {
        const auto& a = merged[i];
        const auto& b = o.intervals[i];
        if (a.proc != b.proc || a.job != b.job || a.speed != b.speed || a.start != b.start || a.end != b.end) {
            out.match = false;
            diff << "#" << i << ": P" << a.proc + 1 << " " << to_string(a.job) << " [" << a.start << "," << a.end
                 << ")@" << a.speed << " vs P" << b.proc + 1 << " " << to_string(b.job) << " [" << b.start << ","
                 << b.end << ")@" << b.speed << "; ";
            break;
        }
    }
    for (const auto& job : r.trace.jobs) {
        const auto it = o.completion.find(job.id);
        const bool same = it == o.completion.end() ? !job.completion : job.completion == it->second;
        if (!same) {
            out.match = false;
            diff << "completion of " << to_string(job.id) << "; ";
            break;
        }
    }
    if (r.energy.total.to_big() != o.energy) {
        out.match = false;
        diff << "energy " << r.energy.total << " vs oracle";
    }
    out.diff = diff.str();
    return out;
}

}  // namespace oracle

#endif
