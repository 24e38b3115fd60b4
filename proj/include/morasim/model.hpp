#ifndef MORASIM_MODEL_HPP
#define MORASIM_MODEL_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "morasim/rational.hpp"

namespace morasim {

// All quantities are exact. Time is in milliseconds, power in milliwatts,
// so energy comes out in microjoules. Work is measured in execution units
// at speed 1 (a processor at speed s completes s units per millisecond).
using Time = Rational;
using Work = Rational;
using Speed = Rational;
using Power = Rational;
using Energy = Rational;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpeedLevel {
    Rational frequency_mhz;  // metadata only
    Speed speed;
    Power power_mw;
};

// Discrete DVFS table shared by every processor of the platform.
//
// Invariants (checked on construction): speeds strictly increasing with the
// last one exactly 1, run power strictly increasing, idle power no larger
// than the power of the slowest level.
class ProcessorModel {
public:
    ProcessorModel(std::string name, Rational f_max_mhz, std::vector<SpeedLevel> levels, Power idle_power_mw);

    // Intel XScale: 150/400/600/800/1000 MHz, 80/170/400/900/1600 mW, 40 mW idle.
    static ProcessorModel xscale();

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Rational& f_max_mhz() const { return f_max_; }
    [[nodiscard]] std::span<const SpeedLevel> levels() const { return levels_; }
    [[nodiscard]] const Speed& min_speed() const { return levels_.front().speed; }
    [[nodiscard]] const Power& idle_power() const { return idle_power_; }

    [[nodiscard]] bool has_speed(const Speed& s) const;
    // Throws Error when s is not a table speed.
    [[nodiscard]] const Power& power(const Speed& s) const;

private:
    std::string name_;
    Rational f_max_;
    std::vector<SpeedLevel> levels_;
    Power idle_power_;
};

// Smallest table speed >= s. Throws Error("unreachable speed ...") when s > 1.
Speed quantize_speed(const Rational& s, const ProcessorModel& model);

// R * (e * (P(s) - P_idle) + P_idle).
Energy energy(const Rational& energy_factor, const Time& duration, const Speed& s, const ProcessorModel& model);
Energy idle_energy(const Time& duration, const ProcessorModel& model);

// Wall time needed to complete `work` units at speed s.
Time wcet_at_speed(const Work& work, const Speed& s);

using TaskId = int;

// Sporadic constrained-deadline task (C, D, T) with its energy factor e.
struct Task {
    TaskId id = 0;
    Work wcet;
    Time deadline;
    Time period;
    Rational energy_factor = 1;
};

using TaskSet = std::vector<Task>;

// Throws Error unless 0 < C <= D <= T and e >= 0.
void validate_task(const Task& task);
// validate_task on every member plus unique ids.
void validate_taskset(std::span<const Task> tasks);
const Task& find_task(std::span<const Task> tasks, TaskId id);

Rational density(const Task& task);

struct DensityStats {
    Rational sum;
    Rational max;
};
// Densities scaled by 1/speed; an empty set gives {0, 0}.
DensityStats density_stats(std::span<const Task> tasks, const Speed& speed = 1);

struct JobId {
    TaskId task = 0;
    std::int64_t index = 0;  // 1-based, as in tau_{i,1}

    friend auto operator<=>(const JobId&, const JobId&) = default;
};

std::string to_string(const JobId& id);

// One release of a job with the execution it will actually need.
struct JobRelease {
    JobId id;
    Time arrival;
    Work actual_exec;
};

enum class PriorityOrder { Edf, Dm };

std::string to_string(PriorityOrder order);
PriorityOrder parse_priority_order(std::string_view text);

// Fixed job-level priority key; a smaller key means a higher priority.
// EDF uses the absolute deadline, DM the relative one; ties fall back to
// the task id and then the job index.
struct PriorityKey {
    Time level;
    JobId job;

    friend std::strong_ordering operator<=>(const PriorityKey& a, const PriorityKey& b) {
        if (auto c = a.level <=> b.level; c != 0) return c;
        return a.job <=> b.job;
    }
    friend bool operator==(const PriorityKey&, const PriorityKey&) = default;
};

// Immutable description of a released job.
struct Job {
    JobId id;
    Time arrival;
    Time relative_deadline;
    Work wcet;
    Work actual_exec;
    Speed offline_speed = 1;
    Rational energy_factor = 1;

    [[nodiscard]] Time absolute_deadline() const { return arrival + relative_deadline; }
};

Job make_job(const Task& task, const JobRelease& release, const Speed& offline_speed);

PriorityKey priority_key(PriorityOrder order, const Job& job);

}  // namespace morasim

template <>
struct std::hash<morasim::JobId> {
    std::size_t operator()(const morasim::JobId& id) const noexcept {
        return std::hash<std::int64_t>{}(id.index * 1000003 + id.task);
    }
};

#endif  // MORASIM_MODEL_HPP
