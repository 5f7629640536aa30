#pragma once

// Straight-line per-tick reimplementation of both schedulers, kept
// deliberately dumb: one decision per tick, no event skipping. The unit tests
// hold the production engine to tick-for-tick agreement with this oracle.

#include "susched/io_placement.hpp"
#include "susched/simulator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace refsim {

using susched::Scheduler;
using susched::Tick;

using JobKey = std::pair<int, std::int64_t>;  // (task, 1-based job index)

struct RefResult {
    std::vector<std::set<JobKey>> computing;   // per tick
    std::vector<std::set<JobKey>> suspending;  // per tick
    std::map<JobKey, Tick> release;
    std::map<JobKey, Tick> completion;
    std::set<JobKey> missed;
};

struct RefJob {
    JobKey key;
    Tick deadline = 0;
    bool flexible = false;
    std::vector<std::pair<susched::PhaseKind, Tick>> program;  // ordered jobs
    std::size_t pos = 0;
    Tick compute_left = 0, suspend_left = 0;  // flexible jobs

    bool done() const {
        return flexible ? compute_left == 0 && suspend_left == 0 : pos == program.size();
    }
    bool comp_available() const {
        if (flexible)
            return compute_left > 0;
        return pos < program.size() && program[pos].first == susched::PhaseKind::Compute;
    }
    bool in_suspension() const {
        return !flexible && pos < program.size() &&
               program[pos].first == susched::PhaseKind::Suspend;
    }
};

inline RefResult reference_simulate(const std::vector<susched::TaskSpec>& specs, int m,
                                    bool flexible, Scheduler sched,
                                    const susched::ReleaseModel& rel, Tick horizon) {
    RefResult res;
    res.computing.resize(static_cast<std::size_t>(horizon));
    res.suspending.resize(static_cast<std::size_t>(horizon));
    std::vector<std::int64_t> next_job(specs.size(), 1);
    std::vector<RefJob> jobs;

    for (Tick t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
            while (susched::job_release(rel, specs[i], next_job[i]) == t) {
                RefJob j;
                j.key = {static_cast<int>(i), next_job[i]};
                j.deadline = t + specs[i].period;
                j.flexible = flexible;
                if (flexible) {
                    j.compute_left = specs[i].compute;
                    j.suspend_left = next_job[i] == 1 ? specs[i].read
                                                      : specs[i].write + specs[i].read;
                } else {
                    if (specs[i].kind == susched::TaskKind::ReadWrite) {
                        if (specs[i].read) j.program.emplace_back(susched::PhaseKind::Suspend, specs[i].read);
                        if (specs[i].compute) j.program.emplace_back(susched::PhaseKind::Compute, specs[i].compute);
                        if (specs[i].write) j.program.emplace_back(susched::PhaseKind::Suspend, specs[i].write);
                    } else {
                        if (specs[i].compute1) j.program.emplace_back(susched::PhaseKind::Compute, specs[i].compute1);
                        if (specs[i].write) j.program.emplace_back(susched::PhaseKind::Suspend, specs[i].write);
                        if (specs[i].compute2) j.program.emplace_back(susched::PhaseKind::Compute, specs[i].compute2);
                    }
                }
                res.release[j.key] = t;
                if (j.done())
                    res.completion[j.key] = t;
                else
                    jobs.push_back(std::move(j));
                next_job[i] += 1;
            }
        }

        std::vector<std::size_t> avail;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            if (jobs[i].comp_available())
                avail.push_back(i);
        std::sort(avail.begin(), avail.end(), [&](std::size_t a, std::size_t b) {
            return std::tuple(jobs[a].deadline, jobs[a].key) <
                   std::tuple(jobs[b].deadline, jobs[b].key);
        });
        if (avail.size() > static_cast<std::size_t>(m))
            avail.resize(static_cast<std::size_t>(m));
        std::set<std::size_t> chosen(avail.begin(), avail.end());

        for (std::size_t i = 0; i < jobs.size(); ++i) {
            RefJob& j = jobs[i];
            if (chosen.count(i)) {
                res.computing[static_cast<std::size_t>(t)].insert(j.key);
                if (j.flexible)
                    j.compute_left -= 1;
                else
                    j.program[j.pos].second -= 1;
            } else if (j.in_suspension()) {
                res.suspending[static_cast<std::size_t>(t)].insert(j.key);
                j.program[j.pos].second -= 1;
            } else if (j.flexible && j.suspend_left > 0 &&
                       (j.compute_left == 0 || sched == Scheduler::GEDF_RW)) {
                res.suspending[static_cast<std::size_t>(t)].insert(j.key);
                j.suspend_left -= 1;
            }
        }

        for (std::size_t i = jobs.size(); i-- > 0;) {
            RefJob& j = jobs[i];
            if (!j.flexible && j.pos < j.program.size() && j.program[j.pos].second == 0)
                j.pos += 1;
            if (j.done()) {
                res.completion[j.key] = t + 1;
                jobs.erase(jobs.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
    }

    for (const auto& [key, rel_t] : res.release) {
        const Tick deadline = rel_t + specs[static_cast<std::size_t>(key.first)].period;
        const auto it = res.completion.find(key);
        if (it == res.completion.end() ? deadline <= horizon : it->second > deadline)
            res.missed.insert(key);
    }
    return res;
}

inline RefResult reference_simulate(const susched::TaskSystem& s, Scheduler sched,
                                    const susched::ReleaseModel& rel, Tick horizon) {
    return reference_simulate(s.tasks, s.processors, false, sched, rel, horizon);
}

inline RefResult reference_simulate(const susched::TransformedSystem& s, Scheduler sched,
                                    const susched::ReleaseModel& rel, Tick horizon) {
    std::vector<susched::TaskSpec> specs;
    for (const auto& t : s.tasks)
        specs.push_back(t.base);
    return reference_simulate(specs, s.processors, true, sched, rel, horizon);
}

/// Expands a production trace into per-tick sets comparable with RefResult.
inline RefResult expand(const susched::Trace& tr) {
    RefResult res;
    res.computing.resize(static_cast<std::size_t>(tr.horizon));
    res.suspending.resize(static_cast<std::size_t>(tr.horizon));
    for (const auto& j : tr.jobs) {
        res.release[{j.task, j.index}] = j.release;
        if (j.completion)
            res.completion[{j.task, j.index}] = *j.completion;
        for (const auto& seg : j.compute)
            for (Tick t = seg.begin; t < seg.end; ++t)
                res.computing[static_cast<std::size_t>(t)].insert({j.task, j.index});
        for (const auto& seg : j.suspend)
            for (Tick t = seg.begin; t < seg.end; ++t)
                res.suspending[static_cast<std::size_t>(t)].insert({j.task, j.index});
    }
    for (const auto& m : tr.misses)
        res.missed.insert({m.task, m.job});
    return res;
}

}  // namespace refsim
