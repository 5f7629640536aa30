#pragma once

#include "susched/simulator.hpp"

namespace susched {

/// Fluid compute allocation of one job: the processor-share schedule serves
/// each job at rate U_i across its whole window [release, deadline), so the
/// job finishes its computation exactly at the deadline. Returns the amount
/// served in [t1, t2), an exact rational.
Rational ps_allocation(const TaskSpec& task, std::int64_t job, Tick t1, Tick t2,
                       const ReleaseModel& rel);

/// Fluid suspension allocation at rate V_i; the suspension counterpart of the
/// processor-share schedule.
Rational sps_allocation(const TaskSpec& task, std::int64_t job, Tick t1, Tick t2,
                        const ReleaseModel& rel);

// Fluid-minus-actual differences over [0, t), computed against a trace.
// Compute ticks in the trace count as integers; the fluid side is rational.
Rational job_lag(const Trace& tr, int task, std::int64_t job, Tick t);
Rational job_slag(const Trace& tr, int task, std::int64_t job, Tick t);
Rational task_lag(const Trace& tr, int task, Tick t);
Rational system_lag(const Trace& tr, Tick t);

struct LagRecord {
    int task = -1;           // -1: whole system
    std::int64_t job = -1;   // -1: whole task
    Tick t = 0;
    Rational lag;
    std::optional<Rational> slag;  // jobs only
};

LagRecord job_lag_record(const Trace& tr, int task, std::int64_t job, Tick t);

/// Maximal intervals in which all m processors compute in every tick.
std::vector<std::pair<Tick, Tick>> busy_intervals(const Trace& tr);

struct BusyLagViolation {
    Tick begin = 0, end = 0;
    Rational lag_begin, lag_end;
};

/// System LAG may never rise across a busy interval (given U_sum <= m).
/// Returns every maximal busy interval that violates this.
std::vector<BusyLagViolation> check_busy_interval_lag(const Trace& tr);

struct SuspendRatioViolation {
    int task = 0;
    std::int64_t job = 0;
    Tick t = 0;
    Tick suspended = 0;
    Tick computed = 0;
};

/// Write-only GEDF traces: at any time, a job's finished suspension over its
/// finished computation stays within W_i / C_{i,1}; before any computation
/// there is no suspension. Throws std::invalid_argument on other traces.
std::vector<SuspendRatioViolation> check_suspend_compute_ratio(const Trace& tr);

struct MissLagViolation {
    MissRecord miss;
    Rational lag;
};

/// GEDF-R/W traces: a job that misses its deadline must still owe
/// computation there (job lag > 0). Throws std::invalid_argument on other
/// traces.
std::vector<MissLagViolation> check_miss_compute_debt(const Trace& tr);

}  // namespace susched
