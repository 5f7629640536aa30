#include "susched/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <ostream>

namespace susched {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Extra gap before release j of the given task under the sporadic model.
Tick sporadic_gap(const ReleaseModel& rel, const TaskSpec& task, std::int64_t j) {
    const Tick cap = rel.max_gap < 0 ? task.period : rel.max_gap;
    if (cap == 0)
        return 0;
    const std::uint64_t h = splitmix64(rel.seed ^ splitmix64(
        (static_cast<std::uint64_t>(task.id) << 32) ^ static_cast<std::uint64_t>(j)));
    return static_cast<Tick>(h % static_cast<std::uint64_t>(cap + 1));
}

}  // namespace

ReleaseModel ReleaseModel::synchronous() {
    return {};
}

ReleaseModel ReleaseModel::with_offsets(std::vector<Tick> offsets) {
    ReleaseModel m;
    m.kind = Kind::PeriodicWithOffsets;
    m.offsets = std::move(offsets);
    return m;
}

ReleaseModel ReleaseModel::sporadic(std::uint64_t seed, Tick max_gap) {
    ReleaseModel m;
    m.kind = Kind::SporadicSeeded;
    m.seed = seed;
    m.max_gap = max_gap;
    return m;
}

Tick job_release(const ReleaseModel& rel, const TaskSpec& task, std::int64_t j) {
    if (j < 1)
        throw std::out_of_range("job_release: job indices start at 1");
    switch (rel.kind) {
        case ReleaseModel::Kind::SynchronousPeriodic:
            return (j - 1) * task.period;
        case ReleaseModel::Kind::PeriodicWithOffsets: {
            const Tick off = static_cast<std::size_t>(task.id) < rel.offsets.size()
                                 ? rel.offsets[task.id]
                                 : 0;
            return off + (j - 1) * task.period;
        }
        case ReleaseModel::Kind::SporadicSeeded: {
            Tick r = 0;
            for (std::int64_t k = 1; k <= j; ++k)
                r += (k > 1 ? task.period : 0) + sporadic_gap(rel, task, k);
            return r;
        }
    }
    return 0;
}

Tick JobTrace::computed_before(Tick t) const {
    Tick sum = 0;
    for (const auto& seg : compute)
        sum += std::max<Tick>(0, std::min(seg.end, t) - seg.begin);
    return sum;
}

Tick JobTrace::suspended_before(Tick t) const {
    Tick sum = 0;
    for (const auto& seg : suspend)
        sum += std::max<Tick>(0, std::min(seg.end, t) - seg.begin);
    return sum;
}

const JobTrace* Trace::find_job(int task, std::int64_t index) const {
    for (const auto& j : jobs)
        if (j.task == task && j.index == index)
            return &j;
    return nullptr;
}

std::vector<std::size_t> gedf_pick(std::span<const PickEntry> jobs, int m) {
    std::vector<std::size_t> avail;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].comp_available)
            avail.push_back(i);
    std::sort(avail.begin(), avail.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = std::tuple(jobs[a].deadline, jobs[a].task, jobs[a].job, a);
        const auto kb = std::tuple(jobs[b].deadline, jobs[b].task, jobs[b].job, b);
        return ka < kb;
    });
    if (avail.size() > static_cast<std::size_t>(m))
        avail.resize(m);
    return avail;
}

RwPick gedf_rw_pick(std::span<const PickEntry> jobs, int m) {
    RwPick out;
    out.compute = gedf_pick(jobs, m);
    std::vector<bool> chosen(jobs.size(), false);
    for (std::size_t i : out.compute)
        chosen[i] = true;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (chosen[i] || !jobs[i].has_suspension)
            continue;
        // comp-preempted, or done computing with suspension left over
        out.suspend.push_back(i);
    }
    return out;
}

namespace {

struct ActiveJob {
    std::size_t trace_idx = 0;
    int task = 0;
    std::int64_t index = 0;
    Tick deadline = 0;
    bool flexible = false;
    // Ordered jobs step through their phase program.
    std::vector<std::pair<PhaseKind, Tick>> phases;
    std::size_t pos = 0;
    Tick phase_left = 0;
    // Flexible jobs hold pools.
    Tick compute_left = 0;
    Tick suspend_left = 0;
    int proc = -1;
};

std::vector<std::pair<PhaseKind, Tick>> ordered_phases(const TaskSpec& t) {
    std::vector<std::pair<PhaseKind, Tick>> out;
    auto add = [&](PhaseKind k, Tick len) {
        if (len > 0)
            out.emplace_back(k, len);
    };
    if (t.kind == TaskKind::ReadWrite) {
        add(PhaseKind::Suspend, t.read);
        add(PhaseKind::Compute, t.compute);
        add(PhaseKind::Suspend, t.write);
    } else {
        add(PhaseKind::Compute, t.compute1);
        add(PhaseKind::Suspend, t.write);
        add(PhaseKind::Compute, t.compute2);
    }
    return out;
}

class Engine {
  public:
    Engine(std::vector<TaskSpec> specs, bool transformed, Scheduler sched,
           const ReleaseModel& rel, Tick horizon)
        : transformed_(transformed), sched_(sched), rel_(rel) {
        trace_.task_specs = std::move(specs);
        trace_.scheduler = sched;
        trace_.transformed = transformed;
        trace_.release = rel;
        trace_.horizon = horizon;
    }

    Trace run(int processors) {
        trace_.processors = processors;
        const Tick horizon = trace_.horizon;
        if (horizon < 1)
            throw SimulationError(SimErrorCode::HorizonTooSmall,
                                  "simulation horizon must be >= 1 tick");
        const std::size_t n = trace_.task_specs.size();
        next_index_.assign(n, 1);
        next_release_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            next_release_[i] = job_release(rel_, trace_.task_specs[i], 1);

        Tick t = 0;
        while (t < horizon) {
            release_jobs_at(t);
            if (active_.empty()) {
                const Tick nr = earliest_release();
                if (nr >= horizon)
                    break;
                t = nr;
                continue;
            }
            const Tick step = decide_and_bound(t, horizon);
            advance(t, step);
            t += step;
        }
        finalize_misses(horizon);
        return std::move(trace_);
    }

  private:
    Tick earliest_release() const {
        Tick nr = std::numeric_limits<Tick>::max();
        for (Tick r : next_release_)
            nr = std::min(nr, r);
        return nr;
    }

    void release_jobs_at(Tick t) {
        for (std::size_t i = 0; i < next_release_.size(); ++i) {
            if (next_release_[i] == t) {
                spawn(static_cast<int>(i), next_index_[i], t);
                next_index_[i] += 1;
                next_release_[i] = next_release(i, next_index_[i], t);
            }
        }
    }

    Tick next_release(std::size_t task, std::int64_t j, Tick prev) const {
        const TaskSpec& spec = trace_.task_specs[task];
        if (rel_.kind == ReleaseModel::Kind::SporadicSeeded)
            return prev + spec.period + sporadic_gap(rel_, spec, j);
        return job_release(rel_, spec, j);
    }

    void spawn(int task, std::int64_t index, Tick t) {
        const TaskSpec& spec = trace_.task_specs[task];
        JobTrace jt;
        jt.task = task;
        jt.index = index;
        jt.release = t;
        jt.deadline = t + spec.period;

        ActiveJob aj;
        aj.task = task;
        aj.index = index;
        aj.deadline = jt.deadline;
        aj.flexible = transformed_;
        if (transformed_) {
            aj.compute_left = spec.compute;
            aj.suspend_left = index == 1 ? spec.read : spec.write + spec.read;
        } else {
            aj.phases = ordered_phases(spec);
            aj.phase_left = aj.phases.empty() ? 0 : aj.phases.front().second;
        }
        jt.compute_total = transformed_ ? aj.compute_left : spec.total_compute();
        jt.suspend_total = transformed_ ? aj.suspend_left : spec.total_suspend();

        aj.trace_idx = trace_.jobs.size();
        trace_.jobs.push_back(jt);
        if ((transformed_ && aj.compute_left == 0 && aj.suspend_left == 0) ||
            (!transformed_ && aj.phases.empty())) {
            trace_.jobs.back().completion = t;  // degenerate empty job
            return;
        }
        active_.push_back(std::move(aj));
    }

    bool comp_available(const ActiveJob& aj) const {
        if (aj.flexible)
            return aj.compute_left > 0;
        return aj.pos < aj.phases.size() && aj.phases[aj.pos].first == PhaseKind::Compute;
    }

    bool in_ordered_suspension(const ActiveJob& aj) const {
        return !aj.flexible && aj.pos < aj.phases.size() &&
               aj.phases[aj.pos].first == PhaseKind::Suspend;
    }

    /// Recomputes the scheduling decision at time t and returns how long it
    /// stays valid: until the next release, the exhaustion of any running
    /// compute phase or in-flight suspension, or the horizon.
    Tick decide_and_bound(Tick t, Tick horizon) {
        chosen_.clear();
        suspending_.clear();

        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < active_.size(); ++i)
            if (comp_available(active_[i]))
                candidates.push_back(i);
        std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            const ActiveJob& ja = active_[a];
            const ActiveJob& jb = active_[b];
            return std::tuple(ja.deadline, ja.task, ja.index) <
                   std::tuple(jb.deadline, jb.task, jb.index);
        });
        if (candidates.size() > static_cast<std::size_t>(trace_.processors))
            candidates.resize(trace_.processors);
        chosen_ = candidates;

        std::vector<bool> computing(active_.size(), false);
        for (std::size_t i : chosen_)
            computing[i] = true;

        for (std::size_t i = 0; i < active_.size(); ++i) {
            const ActiveJob& aj = active_[i];
            if (computing[i])
                continue;
            if (!aj.flexible) {
                // Ordered suspensions are I/O in flight: they always progress.
                if (in_ordered_suspension(aj))
                    suspending_.push_back(i);
            } else if (aj.compute_left == 0 && aj.suspend_left > 0) {
                suspending_.push_back(i);
            } else if (sched_ == Scheduler::GEDF_RW && aj.compute_left > 0 &&
                       aj.suspend_left > 0) {
                // comp-preempted under GEDF-R/W: suspend instead of idling
                suspending_.push_back(i);
            }
        }

        Tick step = horizon - t;
        const Tick nr = earliest_release();
        if (nr > t)
            step = std::min(step, nr - t);
        for (std::size_t i : chosen_) {
            const ActiveJob& aj = active_[i];
            step = std::min(step, aj.flexible ? aj.compute_left : aj.phase_left);
        }
        for (std::size_t i : suspending_) {
            const ActiveJob& aj = active_[i];
            step = std::min(step, aj.flexible ? aj.suspend_left : aj.phase_left);
        }
        assert(step >= 1);
        return step;
    }

    void assign_processors() {
        std::vector<bool> used(trace_.processors, false);
        std::vector<bool> computing(active_.size(), false);
        for (std::size_t i : chosen_)
            computing[i] = true;
        for (std::size_t i = 0; i < active_.size(); ++i)
            if (!computing[i])
                active_[i].proc = -1;
        for (std::size_t i : chosen_)
            if (active_[i].proc >= 0)
                used[active_[i].proc] = true;
        for (std::size_t i : chosen_) {
            if (active_[i].proc >= 0)
                continue;
            for (int p = 0; p < trace_.processors; ++p) {
                if (!used[p]) {
                    used[p] = true;
                    active_[i].proc = p;
                    break;
                }
            }
        }
    }

    void advance(Tick t, Tick step) {
        assign_processors();
        for (std::size_t i : chosen_) {
            ActiveJob& aj = active_[i];
            JobTrace& jt = trace_.jobs[aj.trace_idx];
            if (!jt.compute.empty() && jt.compute.back().end == t &&
                jt.compute.back().processor == aj.proc)
                jt.compute.back().end = t + step;
            else
                jt.compute.push_back({t, t + step, aj.proc});
            if (aj.flexible)
                aj.compute_left -= step;
            else
                aj.phase_left -= step;
        }
        for (std::size_t i : suspending_) {
            ActiveJob& aj = active_[i];
            JobTrace& jt = trace_.jobs[aj.trace_idx];
            if (!jt.suspend.empty() && jt.suspend.back().end == t)
                jt.suspend.back().end = t + step;
            else
                jt.suspend.push_back({t, t + step});
            if (aj.flexible)
                aj.suspend_left -= step;
            else
                aj.phase_left -= step;
        }
        // Phase transitions and completions at t + step.
        for (std::size_t i = active_.size(); i-- > 0;) {
            ActiveJob& aj = active_[i];
            bool done = false;
            if (aj.flexible) {
                done = aj.compute_left == 0 && aj.suspend_left == 0;
            } else if (aj.pos < aj.phases.size() && aj.phase_left == 0) {
                aj.pos += 1;
                aj.phase_left = aj.pos < aj.phases.size() ? aj.phases[aj.pos].second : 0;
                done = aj.pos == aj.phases.size();
            }
            if (done) {
                trace_.jobs[aj.trace_idx].completion = t + step;
                active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
    }

    void finalize_misses(Tick horizon) {
        for (const auto& jt : trace_.jobs) {
            const bool missed = jt.completion ? *jt.completion > jt.deadline
                                              : jt.deadline <= horizon;
            if (missed)
                trace_.misses.push_back({jt.task, jt.index, jt.deadline});
        }
        std::sort(trace_.misses.begin(), trace_.misses.end(),
                  [](const MissRecord& a, const MissRecord& b) {
                      return std::tuple(a.deadline, a.task, a.job) <
                             std::tuple(b.deadline, b.task, b.job);
                  });
    }

    bool transformed_;
    Scheduler sched_;
    ReleaseModel rel_;
    Trace trace_;
    std::vector<ActiveJob> active_;
    std::vector<std::int64_t> next_index_;
    std::vector<Tick> next_release_;
    std::vector<std::size_t> chosen_;
    std::vector<std::size_t> suspending_;
};

}  // namespace

Trace simulate(const TaskSystem& s, Scheduler sched, const ReleaseModel& rel, Tick horizon) {
    if (sched == Scheduler::GEDF_RW)
        throw SimulationError(
            SimErrorCode::IncompatibleScheduler,
            "GEDF-R/W needs the flexible suspension pattern; transform the system first");
    Engine eng(s.tasks, /*transformed=*/false, sched, rel, horizon);
    return eng.run(s.processors);
}

Trace simulate(const TransformedSystem& s, Scheduler sched, const ReleaseModel& rel,
               Tick horizon) {
    std::vector<TaskSpec> specs;
    specs.reserve(s.tasks.size());
    for (const auto& t : s.tasks)
        specs.push_back(t.base);
    Engine eng(std::move(specs), /*transformed=*/true, sched, rel, horizon);
    return eng.run(s.processors);
}

JobFlags job_flags_at(const Trace& tr, const JobTrace& job, Tick t) {
    JobFlags f;
    if (t < job.release || (job.completion && *job.completion <= t))
        return f;
    f.pending = true;
    f.comp_pending = job.computed_before(t) < job.compute_total;
    f.sus_pending = job.suspended_before(t) < job.suspend_total;
    bool suspending_now = false;
    for (const auto& seg : job.suspend)
        suspending_now |= seg.begin <= t && t < seg.end;
    f.comp_available = f.comp_pending && (tr.transformed || !suspending_now);
    return f;
}

std::vector<ResponseRecord> response_times(const Trace& tr) {
    std::vector<ResponseRecord> out;
    out.reserve(tr.jobs.size());
    for (const auto& j : tr.jobs) {
        ResponseRecord r;
        r.task = j.task;
        r.job = j.index;
        r.release = j.release;
        r.completion = j.completion;
        if (j.completion)
            r.response = *j.completion - j.release;
        out.push_back(r);
    }
    return out;
}

std::optional<MissRecord> first_deadline_miss(const Trace& tr) {
    if (tr.misses.empty())
        return std::nullopt;
    return tr.misses.front();
}

void write_trace_csv(const Trace& tr, std::ostream& out) {
    struct Row {
        Tick tick;
        int order;  // release < compute < suspend < complete < miss
        int task;
        std::int64_t job;
        int proc;  // -1: none
        std::string detail;
    };
    std::vector<Row> rows;
    for (const auto& j : tr.jobs) {
        rows.push_back({j.release, 0, j.task, j.index, -1, ""});
        for (const auto& seg : j.compute)
            for (Tick t = seg.begin; t < seg.end; ++t)
                rows.push_back({t, 1, j.task, j.index, seg.processor, ""});
        for (const auto& seg : j.suspend)
            for (Tick t = seg.begin; t < seg.end; ++t)
                rows.push_back({t, 2, j.task, j.index, -1, ""});
        if (j.completion)
            rows.push_back({*j.completion, 3, j.task, j.index, -1,
                            "response=" + std::to_string(*j.completion - j.release)});
    }
    for (const auto& m : tr.misses)
        rows.push_back({m.deadline, 4, m.task, m.job, -1,
                        "deadline=" + std::to_string(m.deadline)});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tuple(a.tick, a.order, a.task, a.job, a.proc) <
               std::tuple(b.tick, b.order, b.task, b.job, b.proc);
    });

    static const char* names[] = {"release", "compute", "suspend", "complete", "miss"};
    out << "# schema: susched-trace-v1\n";
    out << "event,tick,processor,task,job,detail\n";
    for (const auto& r : rows) {
        out << names[r.order] << ',' << r.tick << ',';
        if (r.proc >= 0)
            out << r.proc;
        out << ',' << r.task << ',' << r.job << ',' << r.detail << '\n';
    }
}

}  // namespace susched
