#pragma once

#include "susched/io_placement.hpp"
#include "susched/task_model.hpp"

#include <iosfwd>
#include <span>

namespace susched {

/// When jobs arrive. Consecutive releases of a task are always separated by
/// at least its period; the sporadic model adds a seeded extra gap of up to
/// max_gap ticks before each release (max_gap < 0 means "one period").
struct ReleaseModel {
    enum class Kind { SynchronousPeriodic, PeriodicWithOffsets, SporadicSeeded };
    Kind kind = Kind::SynchronousPeriodic;
    std::vector<Tick> offsets;  // one per task id
    std::uint64_t seed = 0;
    Tick max_gap = -1;

    static ReleaseModel synchronous();
    static ReleaseModel with_offsets(std::vector<Tick> offsets);
    static ReleaseModel sporadic(std::uint64_t seed, Tick max_gap = -1);
};

/// Release time of job j (1-based) of the given task. Pure: the sporadic
/// gaps are a function of (seed, task id, j), so simulator and analysis agree.
Tick job_release(const ReleaseModel& rel, const TaskSpec& task, std::int64_t j);

enum class Scheduler { GEDF, GEDF_RW };

struct ComputeSeg {
    Tick begin = 0, end = 0;
    int processor = 0;
};
struct SuspendSeg {
    Tick begin = 0, end = 0;
};

/// Everything the trace records about one job. Segments are sorted, disjoint
/// and half-open; completion is empty when the job was still unfinished at the
/// horizon.
struct JobTrace {
    int task = 0;
    std::int64_t index = 0;  // 1-based
    Tick release = 0;
    Tick deadline = 0;
    Tick compute_total = 0;  // ticks the job had to compute
    Tick suspend_total = 0;
    std::optional<Tick> completion;
    std::vector<ComputeSeg> compute;
    std::vector<SuspendSeg> suspend;

    Tick computed_before(Tick t) const;
    Tick suspended_before(Tick t) const;
};

struct MissRecord {
    int task = 0;
    std::int64_t job = 0;
    Tick deadline = 0;
};

/// Full record of one simulation run. Immutable once produced.
struct Trace {
    int processors = 1;
    Tick horizon = 0;
    Scheduler scheduler = Scheduler::GEDF;
    bool transformed = false;
    ReleaseModel release;
    std::vector<TaskSpec> task_specs;  // base specs, indexed by task id
    std::vector<JobTrace> jobs;        // ordered by (release, task, index)
    std::vector<MissRecord> misses;    // ordered by (deadline, task)

    const JobTrace* find_job(int task, std::int64_t index) const;
};

enum class SimErrorCode { HorizonTooSmall, IncompatibleScheduler };

class SimulationError : public std::runtime_error {
  public:
    SimulationError(SimErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    SimErrorCode code() const { return code_; }

  private:
    SimErrorCode code_;
};

/// Runs the scheduler tick by tick over [0, horizon). GEDF accepts original
/// and transformed systems; GEDF-R/W needs the flexible suspension pattern and
/// rejects ordered-phase systems with IncompatibleScheduler.
///
/// Under GEDF a transformed job never suspends voluntarily: while it still
/// owes computation it is comp-available, and when preempted it idles. Only
/// GEDF-R/W turns preemption into suspension progress. Ordered-phase
/// suspensions are I/O in flight and advance every tick regardless of the
/// scheduler.
Trace simulate(const TaskSystem& s, Scheduler sched, const ReleaseModel& rel, Tick horizon);
Trace simulate(const TransformedSystem& s, Scheduler sched, const ReleaseModel& rel,
               Tick horizon);

/// One job as seen by the per-tick selection policies.
struct PickEntry {
    Tick deadline = 0;
    int task = 0;
    std::int64_t job = 0;
    bool comp_available = false;  // read as comp-pending by gedf_rw_pick
    bool has_suspension = false;
};

/// The <= m comp-available entries with lexicographically smallest
/// (deadline, task, job). Returns indices into the input span, in that order.
std::vector<std::size_t> gedf_pick(std::span<const PickEntry> jobs, int m);

struct RwPick {
    std::vector<std::size_t> compute;
    std::vector<std::size_t> suspend;
};

/// GEDF-R/W: the <= m comp-pending entries by the same order compute; every
/// comp-preempted entry with suspension left suspends, as does every entry
/// that finished computation but still has suspension.
RwPick gedf_rw_pick(std::span<const PickEntry> jobs, int m);

/// Job status at one tick, reconstructed from a trace. A job is pending until
/// its last phase finishes, comp-pending until its computation finishes and
/// sus-pending until its suspensions finish. It is comp-available when it
/// could compute right now: for ordered phases that excludes ticks spent in a
/// suspension, for the flexible pattern it coincides with comp-pending.
struct JobFlags {
    bool pending = false;
    bool comp_pending = false;
    bool sus_pending = false;
    bool comp_available = false;
};

JobFlags job_flags_at(const Trace& tr, const JobTrace& job, Tick t);

struct ResponseRecord {
    int task = 0;
    std::int64_t job = 0;
    Tick release = 0;
    std::optional<Tick> completion;  // empty: still running at the horizon
    std::optional<Tick> response;
};

std::vector<ResponseRecord> response_times(const Trace& tr);

/// Earliest miss by deadline tick, ties broken towards the lower task index.
std::optional<MissRecord> first_deadline_miss(const Trace& tr);

/// Tick-level CSV: a schema comment, a header, then one row per event and per
/// (tick, processor, job) compute assignment / (tick, job) suspension.
void write_trace_csv(const Trace& tr, std::ostream& out);

}  // namespace susched
