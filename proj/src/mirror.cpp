#include "morasim/mirror.hpp"

#include <algorithm>

namespace morasim {

std::optional<Time> Projection::disp(const JobId& job) const {
    for (const auto& [id, when] : dispatch)
        if (id == job) return when;
    return std::nullopt;
}

std::optional<Time> Projection::nextdisp(ProcId proc) const {
    if (proc >= next_dispatch.size()) return std::nullopt;
    return next_dispatch[proc];
}

AlphaQueue::AlphaQueue(std::size_t processors, PriorityOrder order) : processors_(processors), order_(order) {
    if (processors == 0) throw Error("the alpha-queue needs at least one processor");
}

std::size_t AlphaQueue::heads() const { return std::min(processors_, entries_.size()); }

std::vector<OfflineEvent> AlphaQueue::insert(const Job& job, const Time& t) {
    if (t < last_update_) throw Error("alpha-queue insert at " + t.str() + " before last update " + last_update_.str());
    if (job.offline_speed.sign() <= 0 || 1 < job.offline_speed)
        throw Error(to_string(job.id) + ": offline speed must lie in (0, 1]");
    std::vector<OfflineEvent> events;
    if (last_update_ < t) events = advance(t);
    if (find(job.id) != nullptr) throw Error("job " + to_string(job.id) + " is already in the alpha-queue");

    AlphaEntry entry{job.id, priority_key(order_, job), job.wcet, job.offline_speed, std::nullopt, t};
    const std::size_t heads_before = heads();
    auto it = std::upper_bound(entries_.begin(), entries_.end(), entry.priority,
                               [](const PriorityKey& key, const AlphaEntry& e) { return key < e.priority; });
    const auto pos = static_cast<std::size_t>(it - entries_.begin());
    entries_.insert(it, std::move(entry));
    if (pos >= processors_) return events;

    ProcId proc = 0;
    if (heads_before < processors_) {
        std::vector<bool> used(processors_, false);
        for (const auto& e : entries_)
            if (e.proc) used[*e.proc] = true;
        while (used[proc]) ++proc;
    } else {
        AlphaEntry& displaced = entries_[processors_];
        proc = *displaced.proc;
        displaced.proc.reset();
        events.push_back({OfflineEventKind::Preempt, t, displaced.job, proc});
    }
    entries_[pos].proc = proc;
    entries_[pos].dispatched_at = t;
    events.push_back({OfflineEventKind::Dispatch, t, entries_[pos].job, proc});
    return events;
}

std::vector<OfflineEvent> AlphaQueue::advance(const Time& t) {
    if (t < last_update_) throw Error("alpha-queue cannot move back from " + last_update_.str() + " to " + t.str());
    std::vector<OfflineEvent> events;
    while (true) {
        const std::size_t h = heads();
        if (h == 0) break;
        Time first = entries_[0].rem_off / entries_[0].offline_speed;
        for (std::size_t i = 1; i < h; ++i) first = min(first, entries_[i].rem_off / entries_[i].offline_speed);
        const Time completion = last_update_ + first;
        if (t < completion) break;

        for (std::size_t i = 0; i < h; ++i) entries_[i].rem_off -= entries_[i].offline_speed * first;
        last_update_ = completion;

        std::vector<ProcId> freed;
        for (std::size_t i = 0; i < h; ++i) {
            if (entries_[i].rem_off.is_zero()) {
                freed.push_back(*entries_[i].proc);
                events.push_back({OfflineEventKind::Completion, completion, entries_[i].job, *entries_[i].proc});
            }
        }
        entries_.erase(std::remove_if(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(h),
                                      [](const AlphaEntry& e) { return e.rem_off.is_zero(); }),
                       entries_.begin() + static_cast<std::ptrdiff_t>(h));
        std::size_t next = 0;
        for (std::size_t i = 0; i < heads(); ++i) {
            if (!entries_[i].proc) {
                entries_[i].proc = freed[next++];
                entries_[i].dispatched_at = completion;
                events.push_back({OfflineEventKind::Dispatch, completion, entries_[i].job, *entries_[i].proc});
            }
        }
    }
    const std::size_t h = heads();
    if (last_update_ < t) {
        const Time elapsed = t - last_update_;
        for (std::size_t i = 0; i < h; ++i) entries_[i].rem_off -= entries_[i].offline_speed * elapsed;
        last_update_ = t;
    }
    return events;
}

std::optional<Time> AlphaQueue::next_event_time() const {
    const std::size_t h = heads();
    if (h == 0) return std::nullopt;
    Time first = entries_[0].rem_off / entries_[0].offline_speed;
    for (std::size_t i = 1; i < h; ++i) first = min(first, entries_[i].rem_off / entries_[i].offline_speed);
    return last_update_ + first;
}

Projection AlphaQueue::project(const std::function<bool(const JobId&)>& completed) const {
    struct Pending {
        JobId job;
        Work rem;
        Speed speed;
        std::optional<ProcId> proc;
        Time finish;
    };
    Projection out;
    out.at = last_update_;
    out.next_dispatch.assign(processors_, std::nullopt);

    std::vector<Pending> pending;
    pending.reserve(entries_.size());
    for (const auto& e : entries_) pending.push_back({e.job, e.rem_off, e.offline_speed, e.proc, {}});
    for (std::size_t i = 0; i < std::min(processors_, pending.size()); ++i) {
        pending[i].finish = out.at + pending[i].rem / pending[i].speed;
        out.dispatch.emplace_back(pending[i].job, out.at);
    }

    while (!pending.empty()) {
        const std::size_t h = std::min(processors_, pending.size());
        Time now = pending[0].finish;
        for (std::size_t i = 1; i < h; ++i) now = min(now, pending[i].finish);

        std::vector<ProcId> freed;
        for (std::size_t i = 0; i < h; ++i)
            if (pending[i].finish == now) freed.push_back(*pending[i].proc);
        pending.erase(std::remove_if(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(h),
                                     [&](const Pending& p) { return p.proc && p.finish == now; }),
                      pending.begin() + static_cast<std::ptrdiff_t>(h));

        std::size_t next = 0;
        for (std::size_t i = 0; i < std::min(processors_, pending.size()); ++i) {
            auto& p = pending[i];
            if (p.proc) continue;
            p.proc = freed[next++];
            p.finish = now + p.rem / p.speed;
            out.dispatch.emplace_back(p.job, now);
            auto& slot = out.next_dispatch[*p.proc];
            if (!slot && (!completed || !completed(p.job))) slot = now;
        }
    }
    return out;
}

std::optional<Work> AlphaQueue::rem_off(const JobId& job) const {
    if (const auto* e = find(job)) return e->rem_off;
    return std::nullopt;
}

const AlphaEntry* AlphaQueue::find(const JobId& job) const {
    for (const auto& e : entries_)
        if (e.job == job) return &e;
    return nullptr;
}

}  // namespace morasim
