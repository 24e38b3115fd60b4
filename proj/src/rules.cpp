#include "morasim/rules.hpp"

namespace morasim {

Speed rule1_speed(const Work& rem, const Work& rem_off, const Speed& offline_speed, const ProcessorModel& model) {
    if (rem_off.sign() <= 0) {
        if (rem.sign() > 0)
            throw InvariantViolationError("Rule 1 with rem = " + rem.str() + " but no offline work left");
        return quantize_speed(0, model);
    }
    if (rem_off < rem)
        throw InvariantViolationError("Rule 1 with rem = " + rem.str() + " > rem_off = " + rem_off.str());
    return quantize_speed(rem * offline_speed / rem_off, model);
}

Work earliness(const Work& rem_off, const Work& rem) { return rem_off - rem; }

Rule2Decision evaluate_rule2(const Time& t, const std::optional<Time>& next_dispatch_on_proc,
                             std::span<const Rule2Candidate> candidates, const ProcessorModel& model) {
    Rule2Decision decision;
    const Rule2Candidate* best = nullptr;
    const Rule2Evaluation* best_eval = nullptr;
    const Rule2Candidate* top = nullptr;
    const Rule2Evaluation* top_eval = nullptr;

    decision.evaluations.reserve(candidates.size());
    for (const auto& c : candidates) {
        Rule2Evaluation ev{c.job, std::nullopt, {}, {}, {}};
        std::optional<Time> bound = next_dispatch_on_proc;
        if (c.offline_dispatch) bound = bound ? min(*bound, *c.offline_dispatch) : c.offline_dispatch;
        if (!bound) {
            decision.evaluations.push_back(std::move(ev));
            continue;
        }
        if (c.rem_off.sign() <= 0 || c.rem_off < c.rem)
            throw InvariantViolationError("Rule 2 candidate " + to_string(c.job) + " has rem = " + c.rem.str() +
                                          ", rem_off = " + c.rem_off.str());
        ev.window = max(*bound - t, 0);
        const Rational stretched = c.rem * c.offline_speed;
        ev.reclaim_speed = quantize_speed(stretched / (c.rem_off + *ev.window * c.offline_speed), model);
        ev.deferred_speed = quantize_speed(stretched / c.rem_off, model);
        ev.saving = energy(c.energy_factor, c.rem / ev.deferred_speed, ev.deferred_speed, model) -
                    energy(c.energy_factor, c.rem / ev.reclaim_speed, ev.reclaim_speed, model);
        decision.evaluations.push_back(std::move(ev));
        const auto& stored = decision.evaluations.back();

        if (stored.saving.sign() > 0 &&
            (!best || best_eval->saving < stored.saving ||
             (best_eval->saving == stored.saving && c.priority < best->priority))) {
            best = &c;
            best_eval = &stored;
        }
        if (!top || c.priority < top->priority) {
            top = &c;
            top_eval = &stored;
        }
    }
    // evaluations never reallocates after reserve(), so the pointers above stay valid
    if (best) {
        decision.selected = best->job;
        decision.speed = best_eval->reclaim_speed;
        decision.by_saving = true;
    } else if (top) {
        decision.selected = top->job;
        decision.speed = top_eval->reclaim_speed;
    }
    return decision;
}

}  // namespace morasim
