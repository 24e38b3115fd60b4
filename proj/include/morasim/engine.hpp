#ifndef MORASIM_ENGINE_HPP
#define MORASIM_ENGINE_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "morasim/model.hpp"
#include "morasim/trace.hpp"

namespace morasim {

enum class PolicyKind { Max, Const, Mora };

// Supplies the offline speed of a job; called once per release.
using OfflineSpeedFn = std::function<Speed(const Task& task, std::int64_t job_index)>;

class Policy {
public:
    // Every job at speed 1, work-conserving global FJP.
    static Policy max();
    // Every job at one table speed, work-conserving global FJP.
    static Policy constant(Speed speed);
    // MORA with one offline speed for every job.
    static Policy mora(Speed offline_speed = 1);
    // MORA with per-task offline speeds; tasks not listed run offline at 1.
    static Policy mora(std::map<TaskId, Speed> per_task);
    // MORA with an arbitrary offline-speed provider.
    static Policy mora(OfflineSpeedFn provider, std::string label);

    [[nodiscard]] PolicyKind kind() const { return kind_; }
    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] Speed speed_for(const Task& task, std::int64_t job_index) const;
    // The per-task speed map when the policy has one (MAX and CONST map every task).
    [[nodiscard]] std::map<TaskId, Speed> task_speeds(std::span<const Task> tasks) const;

private:
    PolicyKind kind_ = PolicyKind::Max;
    std::string label_;
    OfflineSpeedFn speeds_;
};

// Which remaining work the reclaiming rules see. Actual uses the job's real
// remaining execution; WorstCase uses C minus the work done so far, i.e. the
// rules never learn a job's actual execution time before it completes.
enum class RemainingModel { Actual, WorstCase };

std::string to_string(RemainingModel model);
RemainingModel parse_remaining_model(std::string_view text);

// Test hooks that deliberately break the engine.
struct FaultInjection {
    bool skip_rule1_preemption = false;
};

struct SimConfig {
    Policy policy = Policy::mora();
    PriorityOrder priority = PriorityOrder::Edf;
    std::size_t processors = 1;
    std::optional<Time> horizon;  // default: 100 hyperperiods
    bool check_invariants = true;
    bool record_events = true;
    // Throw on the first deadline miss / invariant violation instead of
    // collecting them in the trace.
    bool fail_fast = true;
    RemainingModel remaining = RemainingModel::Actual;
    FaultInjection faults;
};

class DeadlineMissError : public Error {
public:
    DeadlineMissError(JobId job, Time deadline, const std::string& what)
        : Error(what), job_(job), deadline_(std::move(deadline)) {}
    [[nodiscard]] const JobId& job() const { return job_; }
    [[nodiscard]] const Time& deadline() const { return deadline_; }

private:
    JobId job_;
    Time deadline_;
};

struct SimResult {
    SimTrace trace;
    EnergyReport energy;
};

// Runs one deterministic simulation over [0, horizon]. Releases at or after
// the horizon are ignored; releases must reference tasks in `tasks` and
// respect the sporadic separation T.
//
// Equal-timestamp processing order: alpha-queue update, actual completions,
// Rule 1 for every offline dispatch of the instant (with preemption),
// arrivals (a job dispatched offline on arrival runs at its offline speed),
// then Rule 2 on processors that are about to idle.
SimResult simulate(std::span<const Task> tasks, std::span<const JobRelease> releases, const SimConfig& config,
                   const ProcessorModel& model);

// Periodic releases k*T (k = 0, 1, ...) below the horizon, all at their WCET.
std::vector<JobRelease> wcet_releases(std::span<const Task> tasks, const Time& horizon);

}  // namespace morasim

#endif  // MORASIM_ENGINE_HPP
