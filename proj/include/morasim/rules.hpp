#ifndef MORASIM_RULES_HPP
#define MORASIM_RULES_HPP

#include <optional>
#include <span>
#include <vector>

#include "morasim/mirror.hpp"
#include "morasim/model.hpp"

namespace morasim {

// Raised when the engine reaches a state that the reclaiming rules rule out
// for feasible offline speeds (e.g. rem > rem_off). Always a bug or an
// infeasible configuration.
class InvariantViolationError : public Error {
public:
    using Error::Error;
};

// Speed for a job dispatched in the offline schedule:
// quantize(rem * s_off / rem_off). Stretches the remaining work so that the
// job would finish together with its offline twin if it ran its full WCET.
Speed rule1_speed(const Work& rem, const Work& rem_off, const Speed& offline_speed, const ProcessorModel& model);

// rem_off - rem: how far the actual schedule is ahead of the offline one.
Work earliness(const Work& rem_off, const Work& rem);

struct Rule2Candidate {
    JobId job;
    PriorityKey priority;
    Work rem;
    Work rem_off;
    Speed offline_speed;
    Rational energy_factor = 1;
    std::optional<Time> offline_dispatch;  // disp(job, t); nullopt = never
};

struct Rule2Evaluation {
    JobId job;
    std::optional<Time> window;  // L; nullopt when both bounds are infinite (skipped)
    Speed reclaim_speed;          // s'
    Speed deferred_speed;         // s''
    Energy saving;                // E(rem/s'', s'') - E(rem/s', s')
};

struct Rule2Decision {
    std::optional<JobId> selected;  // nullopt: the processor goes idle
    Speed speed;                    // s' of the selected job
    bool by_saving = false;         // false when the highest-priority fallback picked the job
    std::vector<Rule2Evaluation> evaluations;
};

// Rule 2 for a processor about to idle at t.
//
// For every waiting candidate: L = min(nextdisp, disp) - t,
// s' = quantize(rem*s_off / (rem_off + L*s_off)), s'' = quantize(rem*s_off / rem_off),
// saving = E(rem/s'', s'') - E(rem/s', s'). The candidate with the largest
// positive saving wins (ties: higher priority); with no positive saving the
// highest-priority candidate runs instead. Either way it runs at its s'.
Rule2Decision evaluate_rule2(const Time& t, const std::optional<Time>& next_dispatch_on_proc,
                             std::span<const Rule2Candidate> candidates, const ProcessorModel& model);

}  // namespace morasim

#endif  // MORASIM_RULES_HPP
