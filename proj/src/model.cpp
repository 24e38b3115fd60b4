#include "morasim/model.hpp"

#include <algorithm>
#include <set>

namespace morasim {

ProcessorModel::ProcessorModel(std::string name, Rational f_max_mhz, std::vector<SpeedLevel> levels,
                               Power idle_power_mw)
    : name_(std::move(name)), f_max_(std::move(f_max_mhz)), levels_(std::move(levels)),
      idle_power_(std::move(idle_power_mw)) {
    if (levels_.empty()) throw Error("processor model '" + name_ + "' has no speed levels");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const auto& lvl = levels_[k];
        if (lvl.speed.sign() <= 0) throw Error("processor model '" + name_ + "': speeds must be positive");
        if (lvl.power_mw.sign() < 0) throw Error("processor model '" + name_ + "': negative power");
        if (k > 0 && !(levels_[k - 1].speed < lvl.speed))
            throw Error("processor model '" + name_ + "': speeds must be strictly increasing");
        if (k > 0 && !(levels_[k - 1].power_mw < lvl.power_mw))
            throw Error("processor model '" + name_ + "': run power must be strictly increasing");
    }
    if (levels_.back().speed != 1) throw Error("processor model '" + name_ + "': the last speed must be exactly 1");
    if (idle_power_.sign() < 0 || levels_.front().power_mw < idle_power_)
        throw Error("processor model '" + name_ + "': idle power must lie in [0, P(s_1)]");
}

ProcessorModel ProcessorModel::xscale() {
    return ProcessorModel("Intel XScale", 1000,
                          {
                              {150, Rational(3, 20), 80},
                              {400, Rational(2, 5), 170},
                              {600, Rational(3, 5), 400},
                              {800, Rational(4, 5), 900},
                              {1000, 1, 1600},
                          },
                          40);
}

bool ProcessorModel::has_speed(const Speed& s) const {
    return std::any_of(levels_.begin(), levels_.end(), [&](const SpeedLevel& l) { return l.speed == s; });
}

const Power& ProcessorModel::power(const Speed& s) const {
    for (const auto& l : levels_)
        if (l.speed == s) return l.power_mw;
    throw Error("speed " + s.str() + " is not a level of processor model '" + name_ + "'");
}

Speed quantize_speed(const Rational& s, const ProcessorModel& model) {
    if (s.sign() < 0) throw Error("negative speed " + s.str());
    for (const auto& l : model.levels())
        if (s <= l.speed) return l.speed;
    throw Error("unreachable speed " + s.str() + " (above the maximal speed)");
}

Energy energy(const Rational& energy_factor, const Time& duration, const Speed& s, const ProcessorModel& model) {
    if (duration.sign() < 0) throw Error("negative duration " + duration.str());
    const Power& run = model.power(s);
    return duration * (energy_factor * (run - model.idle_power()) + model.idle_power());
}

Energy idle_energy(const Time& duration, const ProcessorModel& model) {
    if (duration.sign() < 0) throw Error("negative duration " + duration.str());
    return duration * model.idle_power();
}

Time wcet_at_speed(const Work& work, const Speed& s) {
    if (s.sign() <= 0) throw Error("speed must be positive");
    return work / s;
}

void validate_task(const Task& task) {
    const std::string who = "task " + std::to_string(task.id);
    if (task.wcet.sign() <= 0) throw Error(who + ": WCET must be positive");
    if (task.deadline < task.wcet) throw Error(who + ": density C/D exceeds 1");
    if (task.period < task.deadline) throw Error(who + ": deadline must not exceed the period");
    if (task.energy_factor.sign() < 0) throw Error(who + ": energy factor must be non-negative");
}

void validate_taskset(std::span<const Task> tasks) {
    std::set<TaskId> ids;
    for (const auto& t : tasks) {
        validate_task(t);
        if (!ids.insert(t.id).second) throw Error("duplicate task id " + std::to_string(t.id));
    }
}

const Task& find_task(std::span<const Task> tasks, TaskId id) {
    for (const auto& t : tasks)
        if (t.id == id) return t;
    throw Error("unknown task id " + std::to_string(id));
}

Rational density(const Task& task) { return task.wcet / task.deadline; }

DensityStats density_stats(std::span<const Task> tasks, const Speed& speed) {
    DensityStats stats;
    for (const auto& t : tasks) {
        const Rational d = t.wcet / (speed * t.deadline);
        stats.sum += d;
        stats.max = max(stats.max, d);
    }
    return stats;
}

std::string to_string(const JobId& id) {
    return "tau" + std::to_string(id.task) + "," + std::to_string(id.index);
}

std::string to_string(PriorityOrder order) { return order == PriorityOrder::Edf ? "edf" : "dm"; }

PriorityOrder parse_priority_order(std::string_view text) {
    if (text == "edf" || text == "EDF") return PriorityOrder::Edf;
    if (text == "dm" || text == "DM") return PriorityOrder::Dm;
    throw Error("unknown priority order '" + std::string(text) + "' (expected edf or dm)");
}

Job make_job(const Task& task, const JobRelease& release, const Speed& offline_speed) {
    if (release.id.task != task.id) throw Error("release " + to_string(release.id) + " does not belong to task " +
                                                std::to_string(task.id));
    if (release.actual_exec.sign() <= 0 || task.wcet < release.actual_exec)
        throw Error(to_string(release.id) + ": actual execution " + release.actual_exec.str() +
                    " outside (0, C]");
    Job job;
    job.id = release.id;
    job.arrival = release.arrival;
    job.relative_deadline = task.deadline;
    job.wcet = task.wcet;
    job.actual_exec = release.actual_exec;
    job.offline_speed = offline_speed;
    job.energy_factor = task.energy_factor;
    return job;
}

PriorityKey priority_key(PriorityOrder order, const Job& job) {
    return {order == PriorityOrder::Edf ? job.absolute_deadline() : job.relative_deadline, job.id};
}

}  // namespace morasim
