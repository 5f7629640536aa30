#pragma once

#include "susched/task_model.hpp"

namespace susched {

enum class PhaseKind { Compute, Suspend };
enum class OriginPhase { Read, Compute, Write };

/// Where a (possibly reassigned) phase came from in the source system.
struct PhaseOrigin {
    int task = 0;
    std::int64_t job = 0;  // 1-based job index in the source system
    OriginPhase phase = OriginPhase::Compute;
    friend bool operator==(const PhaseOrigin&, const PhaseOrigin&) = default;
};

struct PhaseItem {
    PhaseKind kind = PhaseKind::Compute;
    Tick length = 0;
    PhaseOrigin origin;
    friend bool operator==(const PhaseItem&, const PhaseItem&) = default;
};

/// Phases of one job. For transformed jobs the list is a pool, not a program:
/// suspend items may run at any point of the job's window relative to its
/// compute item (they carry no data dependency on it). Suspend items drain in
/// list order when several are pending. Zero-length phases are omitted.
using PhaseList = std::vector<PhaseItem>;

/// A read-write task rewritten so that job j carries the write of job j-1,
/// its own compute, and the read of job j+1. A pre-fetch job (index 0) does
/// the first read during a warm-up window before tick 0, and an epilogue job
/// (index last+1) carries the final write. Totals per steady job are
/// unchanged, so U and V are preserved exactly.
struct TransformedTask {
    TaskSpec base;
    PhaseList prefetch;       // job 0: {suspend R}, read of job 1
    PhaseList first_job;      // job 1: {compute C, suspend R}, read of job 2
    PhaseList steady_phases;  // job j >= 2: {suspend W, compute C, suspend R},
                              // materialized for j = 2
    PhaseList epilogue;       // job last+1: {suspend W}, write of job last
};

struct TransformedSystem {
    std::vector<TransformedTask> tasks;
    int processors = 1;
    std::string tick_unit = "tick";
};

/// Pre: every task is read-write and valid. Throws WrongTaskKindError
/// (declared in sched_tests.hpp) otherwise.
TransformedSystem transform(const TaskSystem& s);

/// Phase list of transformed job j when the task runs jobs 1..last_job:
/// j = 0 yields the prefetch, j = 1 the first job, 2 <= j <= last_job the
/// steady pattern (with origins rewritten for j), and j = last_job + 1 the
/// epilogue. Throws std::out_of_range for any other j.
PhaseList job_phases(const TransformedTask& t, std::int64_t j, std::int64_t last_job);

TransformedSystem parse_transformed_system(const std::string& text);
std::string serialize_transformed_system(const TransformedSystem& s);
TransformedSystem load_transformed_system(const std::string& path);
void store_transformed_system(const TransformedSystem& s, const std::string& path);

/// True when the document at `text` carries a transformed system (used by the
/// CLI to pick the right loader).
bool looks_transformed(const std::string& text);

}  // namespace susched
