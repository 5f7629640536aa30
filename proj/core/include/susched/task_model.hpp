#pragma once

#include "susched/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace susched {

enum class TaskKind { WriteOnly, ReadWrite };

/// One sporadic suspending task.
///
/// A read-write task runs read / compute / write per job, where the read and
/// write are suspensions (the job occupies no processor while they are in
/// flight). A write-only task runs compute1 / write / compute2. Phase lengths
/// and the period are integer ticks; the deadline of every job is implicit
/// (release + period).
struct TaskSpec {
    int id = 0;
    TaskKind kind = TaskKind::ReadWrite;
    Tick period = 1;

    // ReadWrite phases.
    Tick read = 0;
    Tick compute = 0;
    // WriteOnly phases (the write field is shared by both kinds).
    Tick compute1 = 0;
    Tick compute2 = 0;
    Tick write = 0;

    static TaskSpec read_write(int id, Tick read, Tick compute, Tick write, Tick period);
    static TaskSpec write_only(int id, Tick compute1, Tick write, Tick compute2, Tick period);

    Tick total_compute() const;
    Tick total_suspend() const;
};

enum class ValidationCode {
    NonPositivePeriod,
    NegativePhase,
    UtilizationOverflow,  // U_i + V_i > 1
    ZeroFirstCompute,     // write-only task with compute1 == 0
    NonPositiveProcessors,
    EmptySystem,
    BadTaskId,            // ids must equal list position
};

struct ValidationError {
    ValidationCode code;
    int task_id = -1;
    std::string message;
};

/// Checks one task against the model constraints. Returns the first violated
/// constraint, or nullopt when the task is well formed.
std::optional<ValidationError> validate_task(const TaskSpec& t);

/// Exact per-task ratios. delta is only defined for write-only tasks.
struct DerivedParams {
    Rational utilization;      // U_i
    Rational suspension_ratio; // V_i
    Rational z;                // U_i + V_i
    std::optional<Rational> delta; // W_i / C_{i,1}
};

/// Pre: validate_task(t) passed.
DerivedParams derived_params(const TaskSpec& t);

/// A task set plus the processor count of the platform.
struct TaskSystem {
    std::vector<TaskSpec> tasks;
    int processors = 1;
    std::string tick_unit = "tick";  // informational only

    Rational u_sum() const;
    Rational v_sum() const;
    Rational u_max() const;
    Rational z_max() const;
};

std::optional<ValidationError> validate_system(const TaskSystem& s);

enum class ParseCode { Syntax, Validation, DuplicateId };

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ParseCode code() const { return code_; }

  private:
    ParseCode code_;
};

/// Reads a task-system document (see serialize_task_system for the format).
/// All invariants are validated on load; validation failures surface as
/// ParseError with code Validation.
TaskSystem parse_task_system(const std::string& text);

/// Canonical serialization: JSON with tasks ordered by id and keys ordered
/// alphabetically, two-space indent, trailing newline. parse ∘ serialize is
/// the identity on valid systems, byte for byte.
std::string serialize_task_system(const TaskSystem& s);

TaskSystem load_task_system(const std::string& path);
void store_task_system(const TaskSystem& s, const std::string& path);

/// Least common multiple of all periods. Throws std::overflow_error when the
/// result does not fit a Tick.
Tick hyperperiod(const TaskSystem& s);

}  // namespace susched
