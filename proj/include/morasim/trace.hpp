#ifndef MORASIM_TRACE_HPP
#define MORASIM_TRACE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morasim/mirror.hpp"
#include "morasim/model.hpp"
#include "morasim/rules.hpp"

namespace morasim {

// A job executing on one processor at one speed over [start, end).
struct Interval {
    ProcId proc = 0;
    JobId job;
    Speed speed;
    Time start;
    Time end;
};

enum class EventKind {
    Arrival,
    Completion,
    OfflineDispatch,
    OfflinePreempt,
    OfflineCompletion,
    Rule1,
    Rule2,
    IdleStart,
    IdleEnd,
    DeadlineCheck,
};

std::string to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct TraceEvent {
    Time time;
    EventKind kind = EventKind::Arrival;
    std::optional<JobId> job;
    std::optional<ProcId> proc;
    std::optional<Speed> old_speed;
    std::optional<Speed> new_speed;
    std::optional<bool> deadline_met;            // DeadlineCheck only
    std::vector<Rule2Evaluation> candidates;     // Rule2 only
};

enum class InvariantKind {
    RemainingWithinOffline,    // rem <= rem_off
    OfflineRunningActualWaiting,
    Rule2WhileOfflineRunning,
    ProgressConservation,
    DeadlineMiss,
};

std::string to_string(InvariantKind kind);

struct Violation {
    InvariantKind kind;
    Time time;
    JobId job;
    std::string detail;
};

struct JobOutcome {
    JobId id;
    Time arrival;
    Time deadline;
    Work actual_exec;
    std::optional<Time> completion;
};

struct SimTrace {
    std::size_t processors = 0;
    Time horizon;
    std::string policy;
    std::vector<Interval> intervals;          // actual schedule
    std::vector<Interval> offline_intervals;  // mirrored offline schedule (MORA only)
    std::vector<TraceEvent> events;
    std::vector<JobOutcome> jobs;
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    [[nodiscard]] const JobOutcome* outcome(const JobId& id) const;
};

struct ProcessorEnergy {
    Time busy_time;
    Energy busy;
    Energy idle;
    Energy total;
};

struct EnergyReport {
    std::vector<ProcessorEnergy> processors;
    Energy busy;
    Energy idle;
    Energy total;
    std::optional<Rational> normalized_pct;  // vs. a MAX reference run
};

// Busy energy of every interval plus idle power over the gaps of [0, horizon].
// Throws Error on overlapping intervals on one processor.
EnergyReport account_energy(const SimTrace& trace, std::span<const Task> tasks, const ProcessorModel& model);

// 100 * report.total / reference.total.
Rational normalized_pct(const EnergyReport& report, const EnergyReport& reference);

// Joins back-to-back intervals with the same processor, job and speed and
// sorts by (proc, start). Useful to compare schedules that split intervals at
// different (behaviour-neutral) instants.
std::vector<Interval> merge_intervals(std::vector<Interval> intervals);

}  // namespace morasim

#endif  // MORASIM_TRACE_HPP
