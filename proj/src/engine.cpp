#include "morasim/engine.hpp"

#include <algorithm>
#include <unordered_map>

#include "morasim/mirror.hpp"
#include "morasim/rules.hpp"
#include "morasim/workload.hpp"

namespace morasim {

Policy Policy::max() {
    Policy p;
    p.kind_ = PolicyKind::Max;
    p.label_ = "max";
    p.speeds_ = [](const Task&, std::int64_t) { return Speed(1); };
    return p;
}

Policy Policy::constant(Speed speed) {
    Policy p;
    p.kind_ = PolicyKind::Const;
    p.label_ = "const(" + speed.decimal(2) + ")";
    p.speeds_ = [speed](const Task&, std::int64_t) { return speed; };
    return p;
}

Policy Policy::mora(Speed offline_speed) {
    Policy p;
    p.kind_ = PolicyKind::Mora;
    p.label_ = offline_speed == 1 ? "mora" : "mora(s_off=" + offline_speed.decimal(2) + ")";
    p.speeds_ = [offline_speed](const Task&, std::int64_t) { return offline_speed; };
    return p;
}

Policy Policy::mora(std::map<TaskId, Speed> per_task) {
    Policy p;
    p.kind_ = PolicyKind::Mora;
    p.label_ = "mora(per-task)";
    p.speeds_ = [map = std::move(per_task)](const Task& task, std::int64_t) {
        auto it = map.find(task.id);
        return it == map.end() ? Speed(1) : it->second;
    };
    return p;
}

Policy Policy::mora(OfflineSpeedFn provider, std::string label) {
    Policy p;
    p.kind_ = PolicyKind::Mora;
    p.label_ = std::move(label);
    p.speeds_ = std::move(provider);
    return p;
}

Speed Policy::speed_for(const Task& task, std::int64_t job_index) const { return speeds_(task, job_index); }

std::map<TaskId, Speed> Policy::task_speeds(std::span<const Task> tasks) const {
    std::map<TaskId, Speed> out;
    for (const auto& t : tasks) out.emplace(t.id, speeds_(t, 1));
    return out;
}

std::string to_string(RemainingModel model) { return model == RemainingModel::Actual ? "actual" : "wcet"; }

RemainingModel parse_remaining_model(std::string_view text) {
    if (text == "actual") return RemainingModel::Actual;
    if (text == "wcet" || text == "worst-case") return RemainingModel::WorstCase;
    throw Error("unknown remaining-time model '" + std::string(text) + "' (expected actual or wcet)");
}

std::vector<JobRelease> wcet_releases(std::span<const Task> tasks, const Time& horizon) {
    std::vector<JobRelease> out;
    for (const auto& task : tasks) {
        std::int64_t index = 1;
        for (Time a = 0; a < horizon; a += task.period) out.push_back({{task.id, index++}, a, task.wcet});
    }
    return out;
}

namespace {

enum class SpeedRule { Arrival, Rule1, Rule2, Fixed };

struct JobState {
    Job job;
    PriorityKey priority;
    Work executed;
    Work traced;  // speed * length summed over closed intervals
    bool released = false;
    bool completed = false;
    bool miss_flagged = false;
    std::optional<ProcId> proc;
    Speed speed;
    SpeedRule last_rule = SpeedRule::Arrival;
    std::optional<Time> completion;
};

struct ProcState {
    std::optional<std::size_t> job;
    Time since;
    bool idle_logged = false;
};

// State and bookkeeping shared by both simulators.
class SimulatorBase {
public:
    SimulatorBase(std::span<const Task> tasks, std::span<const JobRelease> releases, const SimConfig& config,
                  const ProcessorModel& model)
        : tasks_(tasks), config_(config), model_(model), procs_(config.processors) {
        if (config.processors == 0) throw Error("at least one processor is required");
        validate_taskset(tasks);
        horizon_ = config.horizon ? *config.horizon : hyperperiod(tasks) * 100;
        if (tasks.empty() && !config.horizon) horizon_ = 0;
        if (horizon_.sign() < 0 || (horizon_.is_zero() && !tasks.empty()))
            throw Error("the horizon must be positive");

        std::vector<JobRelease> sorted(releases.begin(), releases.end());
        std::sort(sorted.begin(), sorted.end(), [](const JobRelease& a, const JobRelease& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.id < b.id;
        });
        std::unordered_map<TaskId, const JobRelease*> previous;
        for (const auto& r : sorted) {
            if (r.arrival.sign() < 0) throw Error(to_string(r.id) + ": negative arrival time");
            const Task& task = find_task(tasks, r.id.task);
            if (auto it = previous.find(task.id); it != previous.end()) {
                if (r.arrival < it->second->arrival + task.period)
                    throw Error(to_string(r.id) + ": arrives less than T after " + to_string(it->second->id));
                if (r.id.index <= it->second->id.index)
                    throw Error(to_string(r.id) + ": job indices must increase with arrival time");
            }
            previous[task.id] = &r;
            if (!(r.arrival < horizon_)) continue;
            const Speed s = config.policy.speed_for(task, r.id.index);
            if (!model.has_speed(s))
                throw Error(to_string(r.id) + ": speed " + s.str() + " is not a level of '" + model.name() + "'");
            JobState js;
            js.job = make_job(task, r, s);
            js.priority = priority_key(config.priority, js.job);
            js.speed = s;
            index_.emplace(r.id, jobs_.size());
            jobs_.push_back(std::move(js));
        }
        trace_.processors = config.processors;
        trace_.horizon = horizon_;
        trace_.policy = config.policy.label();
        if (jobs_.empty() && !tasks.empty()) trace_.warnings.emplace_back("the horizon covers no job release");
    }

protected:
    void log(TraceEvent ev) {
        if (config_.record_events) trace_.events.push_back(std::move(ev));
    }

    void log(const Time& t, EventKind kind, std::optional<JobId> job = std::nullopt,
             std::optional<ProcId> proc = std::nullopt) {
        if (!config_.record_events) return;
        TraceEvent ev;
        ev.time = t;
        ev.kind = kind;
        ev.job = job;
        ev.proc = proc;
        trace_.events.push_back(std::move(ev));
    }

    void violation(InvariantKind kind, const Time& t, const JobId& job, std::string detail) {
        if (config_.fail_fast) {
            const std::string what = to_string(kind) + " violated by " + to_string(job) + " at " + t.str() + ": " + detail;
            if (kind == InvariantKind::DeadlineMiss)
                throw DeadlineMissError(job, jobs_[index_.at(job)].job.absolute_deadline(), what);
            throw InvariantViolationError(what);
        }
        trace_.violations.push_back({kind, t, job, std::move(detail)});
    }

    void close_interval(ProcId p, const Time& t) {
        ProcState& ps = procs_[p];
        if (ps.job && ps.since < t) {
            JobState& js = jobs_[*ps.job];
            trace_.intervals.push_back({p, js.job.id, js.speed, ps.since, t});
            js.traced += js.speed * (t - ps.since);
        }
        ps.since = t;
    }

    void complete(std::size_t j, const Time& t) {
        JobState& js = jobs_[j];
        if (js.proc) {
            close_interval(*js.proc, t);
            procs_[*js.proc].job.reset();
            js.proc.reset();
        }
        js.completed = true;
        js.completion = t;
        active_.erase(std::find(active_.begin(), active_.end(), j));
        log(t, EventKind::Completion, js.job.id);
        if (js.traced != js.job.actual_exec)
            violation(InvariantKind::ProgressConservation, t, js.job.id,
                      "executed " + js.traced.str() + " of " + js.job.actual_exec.str());
        const bool met = t <= js.job.absolute_deadline();
        if (config_.record_events) {
            TraceEvent ev;
            ev.time = t;
            ev.kind = EventKind::DeadlineCheck;
            ev.job = js.job.id;
            ev.deadline_met = met;
            trace_.events.push_back(std::move(ev));
        }
        if (!met && !js.miss_flagged) {
            js.miss_flagged = true;
            violation(InvariantKind::DeadlineMiss, js.job.absolute_deadline(), js.job.id,
                      "completed at " + t.str());
        }
    }

    void check_deadlines(const Time& t) {
        for (std::size_t j : active_) {
            JobState& js = jobs_[j];
            if (!js.miss_flagged && js.job.absolute_deadline() <= t) {
                js.miss_flagged = true;
                if (config_.record_events) {
                    TraceEvent ev;
                    ev.time = js.job.absolute_deadline();
                    ev.kind = EventKind::DeadlineCheck;
                    ev.job = js.job.id;
                    ev.deadline_met = false;
                    trace_.events.push_back(std::move(ev));
                }
                violation(InvariantKind::DeadlineMiss, js.job.absolute_deadline(), js.job.id,
                          "still needs " + (js.job.actual_exec - js.executed).str() + " units");
            }
        }
    }

    [[nodiscard]] std::optional<Time> next_deadline(const Time& t) const {
        std::optional<Time> best;
        for (std::size_t j : active_) {
            const Time d = jobs_[j].job.absolute_deadline();
            if (t < d && (!best || d < *best)) best = d;
        }
        return best;
    }

    void log_idle_transitions(const Time& t) {
        for (ProcId p = 0; p < procs_.size(); ++p) {
            ProcState& ps = procs_[p];
            if (!ps.job && !ps.idle_logged) {
                ps.idle_logged = true;
                log(t, EventKind::IdleStart, std::nullopt, p);
            } else if (ps.job && ps.idle_logged) {
                ps.idle_logged = false;
                log(t, EventKind::IdleEnd, std::nullopt, p);
            }
        }
    }

    void finish() {
        for (ProcId p = 0; p < procs_.size(); ++p) close_interval(p, horizon_);
        trace_.jobs.reserve(jobs_.size());
        for (const auto& js : jobs_)
            trace_.jobs.push_back(
                {js.job.id, js.job.arrival, js.job.absolute_deadline(), js.job.actual_exec, js.completion});
    }

    std::span<const Task> tasks_;
    const SimConfig& config_;
    const ProcessorModel& model_;
    Time horizon_;
    std::vector<JobState> jobs_;  // sorted by (arrival, id)
    std::unordered_map<JobId, std::size_t> index_;
    std::vector<std::size_t> active_;  // released and not completed
    std::vector<ProcState> procs_;
    SimTrace trace_;
};

// Work-conserving global FJP at a fixed speed (MAX and CONST). The actual
// schedule is itself a priority list with m heads, so it reuses the
// alpha-queue machinery with the actual execution time as the budget.
class FixedSpeedSimulator : public SimulatorBase {
public:
    using SimulatorBase::SimulatorBase;

    SimTrace run() {
        AlphaQueue ready(config_.processors, config_.priority);
        std::size_t next = 0;
        Time t = 0;
        while (true) {
            Time until = horizon_;
            if (next < jobs_.size()) until = min(until, jobs_[next].job.arrival);
            if (auto e = ready.next_event_time()) until = min(until, *e);
            if (auto d = next_deadline(t)) until = min(until, *d);
            for (ProcId p = 0; p < procs_.size(); ++p)
                if (procs_[p].job) jobs_[*procs_[p].job].executed += jobs_[*procs_[p].job].speed * (until - t);
            t = until;

            apply(ready.advance(t));
            while (next < jobs_.size() && jobs_[next].job.arrival == t) {
                JobState& js = jobs_[next];
                js.released = true;
                js.last_rule = SpeedRule::Fixed;
                active_.push_back(next);
                log(t, EventKind::Arrival, js.job.id);
                Job budget = js.job;
                budget.wcet = js.job.actual_exec;
                apply(ready.insert(budget, t));
                ++next;
            }
            check_deadlines(t);
            log_idle_transitions(t);
            if (t == horizon_) break;
        }
        finish();
        return std::move(trace_);
    }

private:
    void apply(const std::vector<OfflineEvent>& events) {
        for (const auto& ev : events) {
            const std::size_t j = index_.at(ev.job);
            switch (ev.kind) {
            case OfflineEventKind::Completion:
                complete(j, ev.time);
                break;
            case OfflineEventKind::Preempt:
                close_interval(ev.proc, ev.time);
                procs_[ev.proc].job.reset();
                jobs_[j].proc.reset();
                break;
            case OfflineEventKind::Dispatch:
                close_interval(ev.proc, ev.time);
                procs_[ev.proc].job = j;
                procs_[ev.proc].since = ev.time;
                jobs_[j].proc = ev.proc;
                break;
            }
        }
    }
};

class MoraSimulator : public SimulatorBase {
public:
    MoraSimulator(std::span<const Task> tasks, std::span<const JobRelease> releases, const SimConfig& config,
                  const ProcessorModel& model)
        : SimulatorBase(tasks, releases, config, model), queue_(config.processors, config.priority),
          offline_open_(config.processors), about_to_idle_(config.processors, false) {}

    SimTrace run() {
        std::size_t next = 0;
        Time t = 0;
        while (true) {
            Time until = horizon_;
            if (next < jobs_.size()) until = min(until, jobs_[next].job.arrival);
            if (auto e = queue_.next_event_time()) until = min(until, *e);
            if (auto d = next_deadline(t)) until = min(until, *d);
            for (const auto& ps : procs_)
                if (ps.job) {
                    const JobState& js = jobs_[*ps.job];
                    until = min(until, t + (js.job.actual_exec - js.executed) / js.speed);
                }
            if (t < until) {
                for (const auto& ps : procs_)
                    if (ps.job) jobs_[*ps.job].executed += jobs_[*ps.job].speed * (until - t);
                t = until;
            }
            process_instant(t, next);
            if (t == horizon_) break;
        }
        for (ProcId p = 0; p < procs_.size(); ++p) close_offline(p, horizon_);
        finish();
        return std::move(trace_);
    }

private:
    [[nodiscard]] Work rem(const JobState& js) const {
        return config_.remaining == RemainingModel::Actual ? js.job.actual_exec - js.executed
                                                           : js.job.wcet - js.executed;
    }

    void process_instant(const Time& t, std::size_t& next) {
        std::fill(about_to_idle_.begin(), about_to_idle_.end(), false);

        record_offline(queue_.advance(t));

        for (ProcId p = 0; p < procs_.size(); ++p) {
            if (!procs_[p].job) continue;
            const std::size_t j = *procs_[p].job;
            if (jobs_[j].executed == jobs_[j].job.actual_exec) {
                complete(j, t);
                about_to_idle_[p] = true;
            }
        }

        // Rule 1 for every job the offline schedule dispatched at this instant.
        std::vector<std::pair<JobId, ProcId>> dispatched;
        for (const auto& e : queue_.entries())
            if (e.proc && e.dispatched_at == t) dispatched.emplace_back(e.job, *e.proc);
        for (const auto& [job, proc] : dispatched) apply_rule1(job, proc, t);

        // New jobs start at their offline speed; one that is dispatched
        // offline on arrival takes its offline processor right away.
        while (next < jobs_.size() && jobs_[next].job.arrival == t) {
            const std::size_t j = next++;
            JobState& js = jobs_[j];
            js.released = true;
            js.speed = js.job.offline_speed;
            js.last_rule = SpeedRule::Arrival;
            active_.push_back(j);
            log(t, EventKind::Arrival, js.job.id);
            const auto events = queue_.insert(js.job, t);
            record_offline(events);
            for (const auto& ev : events)
                if (ev.kind == OfflineEventKind::Dispatch && ev.job == js.job.id) {
                    if (const auto occupant = procs_[ev.proc].job) preempt(*occupant, t);
                    run_on(j, ev.proc, js.job.offline_speed, t);
                }
        }

        check_deadlines(t);

        std::optional<Projection> projection;
        for (ProcId p = 0; p < procs_.size(); ++p) {
            if (!about_to_idle_[p] || procs_[p].job) continue;
            if (!projection)
                projection = queue_.project([this](const JobId& id) { return jobs_[index_.at(id)].completed; });
            apply_rule2(p, t, *projection);
        }

        log_idle_transitions(t);
        if (config_.check_invariants) check_invariants(t);
    }

    void record_offline(const std::vector<OfflineEvent>& events) {
        for (const auto& ev : events) {
            switch (ev.kind) {
            case OfflineEventKind::Dispatch:
                close_offline(ev.proc, ev.time);
                offline_open_[ev.proc] = {index_.at(ev.job), ev.time};
                log(ev.time, EventKind::OfflineDispatch, ev.job, ev.proc);
                break;
            case OfflineEventKind::Preempt:
                close_offline(ev.proc, ev.time);
                log(ev.time, EventKind::OfflinePreempt, ev.job, ev.proc);
                break;
            case OfflineEventKind::Completion:
                close_offline(ev.proc, ev.time);
                log(ev.time, EventKind::OfflineCompletion, ev.job, ev.proc);
                break;
            }
        }
    }

    void close_offline(ProcId p, const Time& t) {
        auto& open = offline_open_[p];
        if (open && open->second < t) {
            const JobState& js = jobs_[open->first];
            trace_.offline_intervals.push_back({p, js.job.id, js.job.offline_speed, open->second, t});
        }
        open.reset();
    }

    void preempt(std::size_t j, const Time& t) {
        JobState& js = jobs_[j];
        const ProcId p = *js.proc;
        close_interval(p, t);
        procs_[p].job.reset();
        js.proc.reset();
    }

    void run_on(std::size_t j, ProcId p, const Speed& speed, const Time& t) {
        JobState& js = jobs_[j];
        ProcState& ps = procs_[p];
        if (ps.job == j && js.speed == speed) return;
        close_interval(p, t);
        ps.job = j;
        js.proc = p;
        js.speed = speed;
    }

    void apply_rule1(const JobId& id, ProcId p, const Time& t) {
        const std::size_t j = index_.at(id);
        JobState& js = jobs_[j];
        const auto occupant = procs_[p].job;
        if (js.completed) {
            // Nothing to run; the processor is free for reclaiming again.
            if (occupant) preempt(*occupant, t);
            about_to_idle_[p] = true;
            return;
        }
        if (occupant && *occupant != j) {
            if (config_.faults.skip_rule1_preemption) return;
            preempt(*occupant, t);
        }
        if (js.proc && *js.proc != p) {
            const ProcId from = *js.proc;
            preempt(j, t);
            about_to_idle_[from] = true;
        }
        const Work remaining = rem(js);
        const Work rem_off = *queue_.rem_off(id);
        Speed speed;
        if (rem_off < remaining) {
            violation(InvariantKind::RemainingWithinOffline, t, id,
                      "Rule 1 with rem " + remaining.str() + " > rem_off " + rem_off.str());
            speed = 1;
        } else {
            speed = rule1_speed(remaining, rem_off, js.job.offline_speed, model_);
        }
        const Speed before = js.speed;
        run_on(j, p, speed, t);
        js.last_rule = SpeedRule::Rule1;
        if (config_.record_events) {
            TraceEvent ev;
            ev.time = t;
            ev.kind = EventKind::Rule1;
            ev.job = id;
            ev.proc = p;
            ev.old_speed = before;
            ev.new_speed = speed;
            trace_.events.push_back(std::move(ev));
        }
    }

    void apply_rule2(ProcId p, const Time& t, const Projection& projection) {
        std::vector<Rule2Candidate> candidates;
        for (std::size_t j : active_) {
            const JobState& js = jobs_[j];
            if (js.proc) continue;
            const auto rem_off = queue_.rem_off(js.job.id);
            const Work remaining = rem(js);
            if (!rem_off || *rem_off < remaining) continue;  // reported by check_invariants
            candidates.push_back({js.job.id, js.priority, remaining, *rem_off, js.job.offline_speed,
                                  js.job.energy_factor, projection.disp(js.job.id)});
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const Rule2Candidate& a, const Rule2Candidate& b) { return a.priority < b.priority; });
        Rule2Decision decision = evaluate_rule2(t, projection.nextdisp(p), candidates, model_);
        if (decision.selected) {
            const std::size_t j = index_.at(*decision.selected);
            const Speed before = jobs_[j].speed;
            run_on(j, p, decision.speed, t);
            jobs_[j].last_rule = SpeedRule::Rule2;
            if (config_.record_events) {
                TraceEvent ev;
                ev.time = t;
                ev.kind = EventKind::Rule2;
                ev.job = *decision.selected;
                ev.proc = p;
                ev.old_speed = before;
                ev.new_speed = decision.speed;
                ev.candidates = std::move(decision.evaluations);
                trace_.events.push_back(std::move(ev));
            }
        } else if (config_.record_events) {
            TraceEvent ev;
            ev.time = t;
            ev.kind = EventKind::Rule2;
            ev.proc = p;
            ev.candidates = std::move(decision.evaluations);
            trace_.events.push_back(std::move(ev));
        }
    }

    void check_invariants(const Time& t) {
        for (std::size_t j : active_) {
            const JobState& js = jobs_[j];
            const Work rem_off = queue_.rem_off(js.job.id).value_or(Work(0));
            const Work remaining = rem(js);
            if (rem_off < remaining)
                violation(InvariantKind::RemainingWithinOffline, t, js.job.id,
                          "rem " + remaining.str() + " > rem_off " + rem_off.str());
        }
        for (const auto& e : queue_.entries()) {
            if (!e.proc) continue;
            const JobState& js = jobs_[index_.at(e.job)];
            if (js.completed) continue;
            if (!js.proc)
                violation(InvariantKind::OfflineRunningActualWaiting, t, e.job,
                          "running offline on P" + std::to_string(*e.proc + 1) + " but waiting");
            if (js.last_rule == SpeedRule::Rule2)
                violation(InvariantKind::Rule2WhileOfflineRunning, t, e.job,
                          "running offline with a Rule 2 speed");
        }
    }

    AlphaQueue queue_;
    std::vector<std::optional<std::pair<std::size_t, Time>>> offline_open_;
    std::vector<bool> about_to_idle_;
};

}  // namespace

SimResult simulate(std::span<const Task> tasks, std::span<const JobRelease> releases, const SimConfig& config,
                   const ProcessorModel& model) {
    SimResult result;
    if (config.policy.kind() == PolicyKind::Mora) {
        result.trace = MoraSimulator(tasks, releases, config, model).run();
    } else {
        result.trace = FixedSpeedSimulator(tasks, releases, config, model).run();
    }
    result.energy = account_energy(result.trace, tasks, model);
    if (config.policy.kind() == PolicyKind::Max) result.energy.normalized_pct = Rational(100);
    return result;
}

}  // namespace morasim
