#ifndef MORASIM_MIRROR_HPP
#define MORASIM_MIRROR_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "morasim/model.hpp"

namespace morasim {

using ProcId = std::size_t;  // 0-based; P1 is 0

// One active job of the offline schedule.
struct AlphaEntry {
    JobId job;
    PriorityKey priority;
    Work rem_off;  // worst-case remaining work at speed 1
    Speed offline_speed;
    std::optional<ProcId> proc;  // set while among the m heads
    Time dispatched_at;          // instant proc was last assigned
};

enum class OfflineEventKind { Dispatch, Preempt, Completion };

struct OfflineEvent {
    OfflineEventKind kind;
    Time time;
    JobId job;
    ProcId proc;
};

// Forward projection of the offline schedule restricted to the jobs active
// at `at`. std::nullopt stands for "never" (infinity).
struct Projection {
    Time at;
    std::vector<std::pair<JobId, Time>> dispatch;     // first instant >= at holding a processor
    std::vector<std::optional<Time>> next_dispatch;   // per processor, strictly after `at`

    [[nodiscard]] std::optional<Time> disp(const JobId& job) const;
    [[nodiscard]] std::optional<Time> nextdisp(ProcId proc) const;
};

// The alpha-queue: a run-time mirror of the offline schedule.
//
// Entries are kept sorted by decreasing priority and the first m of them are
// the jobs the offline schedule is running, each on a distinct processor.
// Their rem_off fields shrink at their offline speeds; an entry is removed the
// instant it reaches zero and the highest-priority waiting entry takes over the
// freed processor. Decrements are lazy: nothing changes between calls, and
// advance() replays elapsed time piecewise, so one call over [a, c] equals two
// calls over [a, b] and [b, c] as long as no job is inserted in between.
//
// Offline processor assignment: a newly dispatched job takes the processor
// freed by a completion (simultaneous completions are handled in priority
// order), or the processor of the head it displaces, or the lowest-index idle
// processor.
class AlphaQueue {
public:
    AlphaQueue(std::size_t processors, PriorityOrder order);

    // Inserts a newly released job with rem_off = C. Advances to t first if
    // needed. Throws Error on duplicates or when t is in the past.
    std::vector<OfflineEvent> insert(const Job& job, const Time& t);

    // Replays the offline schedule up to t, returning completions and the
    // dispatches they trigger in chronological order. Throws Error if t is
    // before the last update.
    std::vector<OfflineEvent> advance(const Time& t);

    // Instant of the next offline completion, if any job is running offline.
    [[nodiscard]] std::optional<Time> next_event_time() const;

    // Simulates the current contents forward with no further arrivals.
    // nextdisp ignores dispatches of jobs for which `completed` returns true.
    [[nodiscard]] Projection project(const std::function<bool(const JobId&)>& completed = {}) const;

    [[nodiscard]] std::optional<Work> rem_off(const JobId& job) const;
    [[nodiscard]] const AlphaEntry* find(const JobId& job) const;

    [[nodiscard]] std::span<const AlphaEntry> entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] const Time& last_update() const { return last_update_; }
    [[nodiscard]] std::size_t processors() const { return processors_; }
    [[nodiscard]] PriorityOrder order() const { return order_; }

private:
    [[nodiscard]] std::size_t heads() const;

    std::size_t processors_;
    PriorityOrder order_;
    std::vector<AlphaEntry> entries_;
    Time last_update_;
};

}  // namespace morasim

#endif  // MORASIM_MIRROR_HPP
