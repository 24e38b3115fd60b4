#include "morasim/trace.hpp"

#include <algorithm>
#include <array>

namespace morasim {

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 10> kEventNames{{
    {EventKind::Arrival, "arrival"},
    {EventKind::Completion, "completion"},
    {EventKind::OfflineDispatch, "offline-dispatch"},
    {EventKind::OfflinePreempt, "offline-preempt"},
    {EventKind::OfflineCompletion, "offline-completion"},
    {EventKind::Rule1, "rule1"},
    {EventKind::Rule2, "rule2"},
    {EventKind::IdleStart, "idle-start"},
    {EventKind::IdleEnd, "idle-end"},
    {EventKind::DeadlineCheck, "deadline-check"},
}};

}  // namespace

std::string to_string(EventKind kind) {
    for (const auto& [k, name] : kEventNames)
        if (k == kind) return name;
    return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
    for (const auto& [k, name] : kEventNames)
        if (text == name) return k;
    throw Error("unknown event kind '" + std::string(text) + "'");
}

std::string to_string(InvariantKind kind) {
    switch (kind) {
    case InvariantKind::RemainingWithinOffline: return "rem<=rem_off";
    case InvariantKind::OfflineRunningActualWaiting: return "mirror-dispatch";
    case InvariantKind::Rule2WhileOfflineRunning: return "rule2-exclusive";
    case InvariantKind::ProgressConservation: return "progress";
    case InvariantKind::DeadlineMiss: return "deadline";
    }
    return "unknown";
}

const JobOutcome* SimTrace::outcome(const JobId& id) const {
    for (const auto& j : jobs)
        if (j.id == id) return &j;
    return nullptr;
}

EnergyReport account_energy(const SimTrace& trace, std::span<const Task> tasks, const ProcessorModel& model) {
    std::vector<std::vector<const Interval*>> per_proc(trace.processors);
    for (const auto& iv : trace.intervals) {
        if (iv.proc >= trace.processors) throw Error("interval on unknown processor " + std::to_string(iv.proc));
        if (iv.end < iv.start) throw Error("interval of " + to_string(iv.job) + " ends before it starts");
        per_proc[iv.proc].push_back(&iv);
    }

    EnergyReport report;
    report.processors.resize(trace.processors);
    for (std::size_t p = 0; p < trace.processors; ++p) {
        auto& list = per_proc[p];
        std::sort(list.begin(), list.end(), [](const Interval* a, const Interval* b) { return a->start < b->start; });
        ProcessorEnergy& pe = report.processors[p];
        const Interval* prev = nullptr;
        for (const Interval* iv : list) {
            if (prev && iv->start < prev->end)
                throw Error("overlapping intervals on P" + std::to_string(p + 1) + " at " + iv->start.str());
            const Time length = iv->end - iv->start;
            pe.busy_time += length;
            pe.busy += energy(find_task(tasks, iv->job.task).energy_factor, length, iv->speed, model);
            prev = iv;
        }
        if (trace.horizon < pe.busy_time) throw Error("busy time exceeds the horizon on P" + std::to_string(p + 1));
        pe.idle = idle_energy(trace.horizon - pe.busy_time, model);
        pe.total = pe.busy + pe.idle;
        report.busy += pe.busy;
        report.idle += pe.idle;
    }
    report.total = report.busy + report.idle;
    return report;
}

Rational normalized_pct(const EnergyReport& report, const EnergyReport& reference) {
    if (reference.total.is_zero()) throw Error("reference energy is zero");
    return report.total * 100 / reference.total;
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
        if (a.proc != b.proc) return a.proc < b.proc;
        return a.start < b.start;
    });
    std::vector<Interval> out;
    for (auto& iv : intervals) {
        if (!out.empty()) {
            Interval& last = out.back();
            if (last.proc == iv.proc && last.job == iv.job && last.speed == iv.speed && last.end == iv.start) {
                last.end = iv.end;
                continue;
            }
        }
        out.push_back(std::move(iv));
    }
    return out;
}

}  // namespace morasim
