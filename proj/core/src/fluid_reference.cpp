#include "susched/fluid_reference.hpp"

#include <algorithm>
#include <map>

namespace susched {

namespace {

Rational rate_allocation(const Rational& rate, Tick release, Tick deadline, Tick t1, Tick t2) {
    const Tick lo = std::max(t1, release);
    const Tick hi = std::min(t2, deadline);
    if (hi <= lo)
        return 0;
    return rate * Rational(static_cast<long>(hi - lo));
}

const JobTrace& job_or_throw(const Trace& tr, int task, std::int64_t job) {
    const JobTrace* j = tr.find_job(task, job);
    if (!j)
        throw std::out_of_range("no job " + std::to_string(job) + " of task " +
                                std::to_string(task) + " in trace");
    return *j;
}

Rational job_lag_impl(const Trace& tr, const JobTrace& j, Tick t) {
    const Rational u = derived_params(tr.task_specs[j.task]).utilization;
    return rate_allocation(u, j.release, j.deadline, 0, t) -
           Rational(static_cast<long>(j.computed_before(t)));
}

Rational job_slag_impl(const Trace& tr, const JobTrace& j, Tick t) {
    const Rational v = derived_params(tr.task_specs[j.task]).suspension_ratio;
    return rate_allocation(v, j.release, j.deadline, 0, t) -
           Rational(static_cast<long>(j.suspended_before(t)));
}

}  // namespace

Rational ps_allocation(const TaskSpec& task, std::int64_t job, Tick t1, Tick t2,
                       const ReleaseModel& rel) {
    if (t1 > t2)
        throw std::invalid_argument("ps_allocation: t1 > t2");
    const Tick r = job_release(rel, task, job);
    return rate_allocation(derived_params(task).utilization, r, r + task.period, t1, t2);
}

Rational sps_allocation(const TaskSpec& task, std::int64_t job, Tick t1, Tick t2,
                        const ReleaseModel& rel) {
    if (t1 > t2)
        throw std::invalid_argument("sps_allocation: t1 > t2");
    const Tick r = job_release(rel, task, job);
    return rate_allocation(derived_params(task).suspension_ratio, r, r + task.period, t1, t2);
}

Rational job_lag(const Trace& tr, int task, std::int64_t job, Tick t) {
    return job_lag_impl(tr, job_or_throw(tr, task, job), t);
}

Rational job_slag(const Trace& tr, int task, std::int64_t job, Tick t) {
    return job_slag_impl(tr, job_or_throw(tr, task, job), t);
}

Rational task_lag(const Trace& tr, int task, Tick t) {
    Rational sum = 0;
    for (const auto& j : tr.jobs)
        if (j.task == task)
            sum += job_lag_impl(tr, j, t);
    return sum;
}

Rational system_lag(const Trace& tr, Tick t) {
    Rational sum = 0;
    for (const auto& j : tr.jobs)
        sum += job_lag_impl(tr, j, t);
    return sum;
}

LagRecord job_lag_record(const Trace& tr, int task, std::int64_t job, Tick t) {
    const JobTrace& j = job_or_throw(tr, task, job);
    LagRecord rec;
    rec.task = task;
    rec.job = job;
    rec.t = t;
    rec.lag = job_lag_impl(tr, j, t);
    rec.slag = job_slag_impl(tr, j, t);
    return rec;
}

std::vector<std::pair<Tick, Tick>> busy_intervals(const Trace& tr) {
    std::map<Tick, int> delta;
    for (const auto& j : tr.jobs) {
        for (const auto& seg : j.compute) {
            delta[seg.begin] += 1;
            delta[seg.end] -= 1;
        }
    }
    std::vector<std::pair<Tick, Tick>> out;
    int level = 0;
    Tick busy_from = 0;
    bool busy = false;
    for (auto it = delta.begin(); it != delta.end(); ++it) {
        const Tick t = it->first;
        level += it->second;
        const bool now_busy = level >= tr.processors;
        if (now_busy && !busy) {
            busy_from = t;
            busy = true;
        } else if (!now_busy && busy) {
            out.emplace_back(busy_from, t);
            busy = false;
        }
    }
    return out;
}

std::vector<BusyLagViolation> check_busy_interval_lag(const Trace& tr) {
    const auto busy = busy_intervals(tr);
    if (busy.empty())
        return {};

    // One sweep: LAG(t) is the integral of the fluid service rate (sum of U_i
    // over jobs whose window covers t) minus the number of computing jobs.
    // Both rates are piecewise constant, so LAG is evaluated at every busy
    // endpoint in O((jobs + segments) log) instead of a fresh O(jobs) scan
    // per endpoint.
    std::map<Tick, Rational> rate_delta;
    std::map<Tick, Tick> work_delta;
    for (const auto& j : tr.jobs) {
        const Rational u = derived_params(tr.task_specs[j.task]).utilization;
        if (u != 0 && j.deadline > j.release) {
            rate_delta[j.release] += u;
            rate_delta[j.deadline] -= u;
        }
        for (const auto& seg : j.compute) {
            work_delta[seg.begin] += 1;
            work_delta[seg.end] -= 1;
        }
    }
    std::map<Tick, Rational> lag_at;
    for (const auto& [b, e] : busy) {
        lag_at[b] = 0;
        lag_at[e] = 0;
    }

    Rational lag = 0;
    Rational rate = 0;
    Tick work_rate = 0;
    Tick prev = 0;
    auto ri = rate_delta.begin();
    auto wi = work_delta.begin();
    auto qi = lag_at.begin();
    while (qi != lag_at.end()) {
        Tick next = qi->first;
        if (ri != rate_delta.end())
            next = std::min(next, ri->first);
        if (wi != work_delta.end())
            next = std::min(next, wi->first);
        lag += (rate - Rational(static_cast<long>(work_rate))) *
               Rational(static_cast<long>(next - prev));
        prev = next;
        while (ri != rate_delta.end() && ri->first == next)
            rate += (ri++)->second;
        while (wi != work_delta.end() && wi->first == next)
            work_rate += (wi++)->second;
        while (qi != lag_at.end() && qi->first == next)
            (qi++)->second = lag;
    }

    std::vector<BusyLagViolation> out;
    for (const auto& [b, e] : busy) {
        const Rational& lb = lag_at.at(b);
        const Rational& le = lag_at.at(e);
        if (le > lb)
            out.push_back({b, e, lb, le});
    }
    return out;
}

std::vector<SuspendRatioViolation> check_suspend_compute_ratio(const Trace& tr) {
    if (tr.transformed || tr.scheduler != Scheduler::GEDF)
        throw std::invalid_argument("check_suspend_compute_ratio applies to GEDF traces of ordered systems");
    for (const auto& spec : tr.task_specs)
        if (spec.kind != TaskKind::WriteOnly)
            throw std::invalid_argument("check_suspend_compute_ratio applies to write-only systems");

    std::vector<SuspendRatioViolation> out;
    for (const auto& j : tr.jobs) {
        const TaskSpec& spec = tr.task_specs[j.task];
        const __int128 w = spec.write;
        const __int128 c1 = spec.compute1;
        // Ordered phases never overlap, so the merged segment list is the
        // job's timeline. The ratio peaks at the end of a suspension run and
        // right after the first tick of a compute run; checking there covers
        // every tick.
        struct Ev {
            Tick begin, end;
            bool compute;
        };
        std::vector<Ev> evs;
        for (const auto& seg : j.compute)
            evs.push_back({seg.begin, seg.end, true});
        for (const auto& seg : j.suspend)
            evs.push_back({seg.begin, seg.end, false});
        std::sort(evs.begin(), evs.end(),
                  [](const Ev& a, const Ev& b) { return a.begin < b.begin; });
        Tick computed = 0;
        Tick suspended = 0;
        for (const auto& ev : evs) {
            if (ev.compute) {
                if (__int128(suspended) * c1 > w * __int128(computed + 1))
                    out.push_back({j.task, j.index, ev.begin + 1, suspended, computed + 1});
                computed += ev.end - ev.begin;
            } else {
                suspended += ev.end - ev.begin;
                const bool bad = computed == 0
                                     ? suspended > 0
                                     : __int128(suspended) * c1 > w * __int128(computed);
                if (bad)
                    out.push_back({j.task, j.index, ev.end, suspended, computed});
            }
        }
    }
    return out;
}

std::vector<MissLagViolation> check_miss_compute_debt(const Trace& tr) {
    if (!tr.transformed || tr.scheduler != Scheduler::GEDF_RW)
        throw std::invalid_argument("check_miss_compute_debt applies to GEDF-R/W traces");
    std::vector<MissLagViolation> out;
    for (const auto& m : tr.misses) {
        const JobTrace& j = job_or_throw(tr, m.task, m.job);
        const Rational lag = job_lag_impl(tr, j, m.deadline);
        if (lag <= 0)
            out.push_back({m, lag});
    }
    return out;
}

}  // namespace susched
