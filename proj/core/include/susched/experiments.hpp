#pragma once

#include "susched/sched_tests.hpp"
#include "susched/simulator.hpp"

#include <iosfwd>
#include <random>

namespace susched {

/// Seeded generator with portable bounded draws (the raw mt19937_64 stream is
/// specified; the draws below avoid the implementation-defined standard
/// distributions, so identical seeds give identical systems everywhere).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    /// Uniform in [0, n), n >= 1. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t int_in(std::int64_t lo, std::int64_t hi);

    /// Uniform over the grid {k / kGrid} covering [lo, hi]; both bounds must
    /// be exact grid points.
    Rational rational_in(const Rational& lo, const Rational& hi);

    static constexpr std::int64_t kGrid = 1'000'000;

  private:
    std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

enum class UtilDist { Light, Medium, Heavy };    // [0.001,0.05] [0.05,0.1] [0.1,0.3]
enum class SuspDist { Short, Long };             // [0.005,0.1] [0.1,0.3]

Rational util_lo(UtilDist d);
Rational util_hi(UtilDist d);
Rational susp_lo(SuspDist d);
Rational susp_hi(SuspDist d);

struct GenConfig {
    int m = 4;
    UtilDist util = UtilDist::Light;
    SuspDist susp = SuspDist::Short;
    Rational alpha = ratio(9, 10);    // C_{i,1} / C_i, one of 0.9 / 0.5 / 0.2
    int write_lo = 5, write_hi = 50;  // writing-phase length range, microseconds
    Rational cap;                     // target total utilization, <= m
    int systems_per_cap = 1000;
    std::uint64_t seed = 0;
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

/// One generated write-only task; every parameter is an exact rational
/// (generated systems need not have integral phases).
struct GeneratedTask {
    Rational w;     // writing phase, microseconds
    Rational u, v;  // utilization and suspension ratio
    Rational t;     // period = w / v
    Rational c, c1, c2;
    Rational delta;
};

struct GeneratedSystem {
    std::vector<GeneratedTask> tasks;
    int m = 1;
    Rational u_sum;
};

std::vector<TaskParams> params_of(const GeneratedSystem& s);

/// Draws write-only tasks (W uniform over [write_lo, write_hi] microseconds,
/// V and U uniform over the configured ranges, T = W/V, C = U*T, C1 = alpha*C)
/// until the running utilization exceeds cap, then shrinks the last task so
/// that U_sum equals cap exactly. Throws GenerationError when cap is below the
/// utilization floor of the configured distribution.
GeneratedSystem generate_task_system(const GenConfig& cfg, Rng& rng);

struct QuantizeResult {
    std::optional<TaskSystem> system;  // empty: hyperperiod above the cap
    BigInt scale;                      // ticks per microsecond
    BigInt hyperperiod;                // in scaled ticks
};

/// Scales every phase and period by the common denominator so the system
/// becomes integral. Systems whose scaled hyperperiod exceeds max_hyperperiod
/// are not materialized (the caller counts them as skipped).
QuantizeResult quantize(const GeneratedSystem& s, Tick max_hyperperiod);

struct CurvePoint {
    Rational cap;
    int samples = 0;
    std::vector<std::pair<SchedTest, int>> accepted;

    Rational fraction(SchedTest t) const;
};

/// Evaluates the given tests over systems_per_cap fresh systems per cap.
/// Deterministic for a fixed seed: trial k at cap index i draws from
/// mix_seed(seed, i, k) regardless of evaluation order.
std::vector<CurvePoint> run_schedulability_experiment(const GenConfig& base,
                                                      const std::vector<Rational>& caps,
                                                      const std::vector<SchedTest>& tests);

/// 0.1-step utilization cap grid 0.1, 0.2, ..., m.
std::vector<Rational> default_cap_grid(int m);

void write_curves_csv(const std::vector<CurvePoint>& points,
                      const std::vector<SchedTest>& tests, std::ostream& out);

// ---------------------------------------------------------------------------
// Structured fuzzing: integer-tick systems with smooth periods, so that
// hyperperiods stay small and quantization is the identity. These feed the
// test-soundness and trace-invariant fuzz suites.

/// Write-only system with n in [min_tasks, max_tasks], periods drawn from a
/// divisor-closed pool (hyperperiod <= 5040).
TaskSystem fuzz_write_only_system(Rng& rng, int m, int min_tasks, int max_tasks);

/// Read-write analogue. With overloaded set, per-task utilizations are drawn
/// so that U_sum usually exceeds m and deadline misses are likely.
TaskSystem fuzz_read_write_system(Rng& rng, int m, int min_tasks, int max_tasks,
                                  bool overloaded = false);

// ---------------------------------------------------------------------------
// Simulated case studies: two read-write matrix pipelines on one processor,
// and three on two processors. Phases in 1 ms ticks.

enum class CaseStudy { Uni2Tasks, Duo3Tasks };

TaskSystem case_study_system(CaseStudy c);

struct CaseStudyResult {
    Trace trace;
    std::vector<ResponseRecord> responses;  // first jobs_per_task jobs per task
};

CaseStudyResult run_case_study(CaseStudy c, Scheduler sched, std::int64_t jobs_per_task = 400);

void write_responses_csv(const std::vector<ResponseRecord>& responses,
                         const std::vector<TaskSpec>& specs, std::ostream& out);

}  // namespace susched
