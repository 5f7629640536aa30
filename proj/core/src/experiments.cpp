#include "susched/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace susched {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

std::int64_t Rng::int_in(std::int64_t lo, std::int64_t hi) {
    if (lo > hi)
        throw std::invalid_argument("Rng::int_in: empty range");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

Rational Rng::rational_in(const Rational& lo, const Rational& hi) {
    const Rational lo_k = lo * kGrid;
    const Rational hi_k = hi * kGrid;
    if (lo_k.get_den() != 1 || hi_k.get_den() != 1)
        throw std::invalid_argument("rational_in: bounds are not grid points");
    const std::int64_t k = int_in(lo_k.get_num().get_si(), hi_k.get_num().get_si());
    return ratio(k, kGrid);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto smix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return smix(seed ^ smix(a ^ smix(b)));
}

Rational util_lo(UtilDist d) {
    switch (d) {
        case UtilDist::Light: return ratio(1, 1000);
        case UtilDist::Medium: return ratio(5, 100);
        case UtilDist::Heavy: return ratio(1, 10);
    }
    return 0;
}

Rational util_hi(UtilDist d) {
    switch (d) {
        case UtilDist::Light: return ratio(5, 100);
        case UtilDist::Medium: return ratio(1, 10);
        case UtilDist::Heavy: return ratio(3, 10);
    }
    return 0;
}

Rational susp_lo(SuspDist d) {
    return d == SuspDist::Short ? ratio(5, 1000) : ratio(1, 10);
}

Rational susp_hi(SuspDist d) {
    return d == SuspDist::Short ? ratio(1, 10) : ratio(3, 10);
}

std::vector<TaskParams> params_of(const GeneratedSystem& s) {
    std::vector<TaskParams> out;
    out.reserve(s.tasks.size());
    for (const auto& t : s.tasks)
        out.push_back({t.u, t.v, t.delta});
    return out;
}

GeneratedSystem generate_task_system(const GenConfig& cfg, Rng& rng) {
    if (cfg.cap <= 0 || cfg.cap < util_lo(cfg.util))
        throw GenerationError("utilization cap " + to_string(cfg.cap) +
                              " is below the per-task utilization floor");
    if (cfg.cap > cfg.m)
        throw GenerationError("utilization cap exceeds the processor count");

    GeneratedSystem sys;
    sys.m = cfg.m;
    sys.u_sum = 0;
    while (sys.u_sum < cfg.cap) {
        GeneratedTask t;
        t.w = Rational(static_cast<long>(rng.int_in(cfg.write_lo, cfg.write_hi)));
        t.v = rng.rational_in(susp_lo(cfg.susp), susp_hi(cfg.susp));
        t.u = rng.rational_in(util_lo(cfg.util), util_hi(cfg.util));
        if (sys.u_sum + t.u > cfg.cap)
            t.u = cfg.cap - sys.u_sum;  // shrink the last task to land on cap
        t.t = t.w / t.v;
        t.c = t.u * t.t;
        t.c1 = cfg.alpha * t.c;
        t.c2 = t.c - t.c1;
        t.delta = t.w / t.c1;
        sys.u_sum += t.u;
        sys.tasks.push_back(std::move(t));
    }
    return sys;
}

namespace {

BigInt scaled_int(const Rational& q, const BigInt& scale) {
    Rational v = q * Rational(scale);
    v.canonicalize();
    if (v.get_den() != 1)
        throw std::logic_error("quantize: scale is not a common denominator");
    return v.get_num();
}

}  // namespace

QuantizeResult quantize(const GeneratedSystem& s, Tick max_hyperperiod) {
    QuantizeResult res;
    res.scale = 1;
    for (const auto& t : s.tasks) {
        res.scale = lcm(res.scale, t.t.get_den());
        res.scale = lcm(res.scale, t.c1.get_den());
        res.scale = lcm(res.scale, t.c2.get_den());
        res.scale = lcm(res.scale, t.w.get_den());
    }
    res.hyperperiod = 1;
    for (const auto& t : s.tasks)
        res.hyperperiod = lcm(res.hyperperiod, scaled_int(t.t, res.scale));
    if (res.hyperperiod > BigInt(static_cast<long>(max_hyperperiod)))
        return res;

    TaskSystem sys;
    sys.processors = s.m;
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        const auto& t = s.tasks[i];
        sys.tasks.push_back(TaskSpec::write_only(
            static_cast<int>(i), to_tick(scaled_int(t.c1, res.scale)),
            to_tick(scaled_int(t.w, res.scale)), to_tick(scaled_int(t.c2, res.scale)),
            to_tick(scaled_int(t.t, res.scale))));
    }
    res.system = std::move(sys);
    return res;
}

Rational CurvePoint::fraction(SchedTest t) const {
    for (const auto& [test, count] : accepted)
        if (test == t)
            return samples == 0 ? Rational(0) : ratio(count, samples);
    return 0;
}

namespace {

CurvePoint run_one_cap(const GenConfig& base, const Rational& cap, std::size_t cap_index,
                       const std::vector<SchedTest>& tests) {
    CurvePoint pt;
    pt.cap = cap;
    pt.samples = base.systems_per_cap;
    for (SchedTest t : tests)
        pt.accepted.emplace_back(t, 0);
    for (int trial = 0; trial < base.systems_per_cap; ++trial) {
        Rng rng(mix_seed(base.seed, cap_index, static_cast<std::uint64_t>(trial)));
        GenConfig cfg = base;
        cfg.cap = cap;
        const GeneratedSystem sys = generate_task_system(cfg, rng);
        const std::vector<TaskParams> params = params_of(sys);
        for (auto& [test, count] : pt.accepted) {
            TestVerdict v;
            switch (test) {
                case SchedTest::Density: v = density_test(params, sys.m); break;
                case SchedTest::SuspObliviousDensity:
                    v = susp_oblivious_density_test(params, sys.m);
                    break;
                case SchedTest::WriteOnlyGEDF: v = write_only_test(params, sys.m); break;
                case SchedTest::ReadWritePlacement:
                    v = rw_placement_test(params, sys.m);
                    break;
            }
            if (v.passed)
                count += 1;
        }
    }
    return pt;
}

}  // namespace

std::vector<CurvePoint> run_schedulability_experiment(const GenConfig& base,
                                                      const std::vector<Rational>& caps,
                                                      const std::vector<SchedTest>& tests) {
    // Caps are independent work items and every trial is seeded by
    // (seed, cap index, trial), so parallel evaluation reproduces the
    // sequential result exactly.
    std::vector<CurvePoint> out(caps.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t ci; (ci = next.fetch_add(1)) < caps.size();)
            out[ci] = run_one_cap(base, caps[ci], ci, tests);
    };
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), caps.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < workers; ++i)
        pool.emplace_back(work);
    work();
    for (auto& th : pool)
        th.join();
    return out;
}

std::vector<Rational> default_cap_grid(int m) {
    std::vector<Rational> caps;
    for (int k = 1; k <= 10 * m; ++k)
        caps.push_back(ratio(k, 10));
    return caps;
}

void write_curves_csv(const std::vector<CurvePoint>& points,
                      const std::vector<SchedTest>& tests, std::ostream& out) {
    out << "# schema: susched-curves-v1\n";
    out << "cap,test,accepted,samples,fraction\n";
    for (const auto& pt : points) {
        for (SchedTest t : tests) {
            int count = 0;
            for (const auto& [test, c] : pt.accepted)
                if (test == t)
                    count = c;
            std::ostringstream frac;
            frac << std::fixed << std::setprecision(6)
                 << (pt.samples ? static_cast<double>(count) / pt.samples : 0.0);
            out << to_double(pt.cap) << ',' << test_name(t) << ',' << count << ','
                << pt.samples << ',' << frac.str() << '\n';
        }
    }
}

namespace {

// Divisors of 5040 in [5, 63]: any subset has an lcm of at most 5040, which
// keeps 2x-hyperperiod simulations cheap.
constexpr std::array<Tick, 25> kPeriodPool = {5,  6,  7,  8,  9,  10, 12, 14, 15,
                                              16, 18, 20, 21, 24, 28, 30, 35, 36,
                                              40, 42, 45, 48, 56, 60, 63};

Tick pool_period(Rng& rng) {
    return kPeriodPool[static_cast<std::size_t>(rng.below(kPeriodPool.size()))];
}

}  // namespace

TaskSystem fuzz_write_only_system(Rng& rng, int m, int min_tasks, int max_tasks) {
    TaskSystem sys;
    sys.processors = m;
    const int n = static_cast<int>(rng.int_in(min_tasks, max_tasks));
    // Per-system load factor: smaller divisors push the drawn systems towards
    // (and past) the acceptance threshold, so the accepted ones probe it.
    const Tick f = rng.int_in(3, 8);
    for (int i = 0; i < n; ++i) {
        const Tick t = pool_period(rng);
        const Tick c1 = rng.int_in(1, std::max<Tick>(1, t / f));
        const Tick c2 = rng.int_in(0, std::max<Tick>(0, t / f));
        const Tick w = rng.int_in(0, std::max<Tick>(0, std::min(t / f, t - c1 - c2)));
        sys.tasks.push_back(TaskSpec::write_only(i, c1, w, c2, t));
    }
    return sys;
}

TaskSystem fuzz_read_write_system(Rng& rng, int m, int min_tasks, int max_tasks,
                                  bool overloaded) {
    TaskSystem sys;
    sys.processors = m;
    const int n = static_cast<int>(rng.int_in(min_tasks, max_tasks));
    const Tick f = rng.int_in(2, 6);
    for (int i = 0; i < n; ++i) {
        const Tick t = pool_period(rng);
        Tick c;
        if (overloaded)
            c = rng.int_in(std::max<Tick>(1, t / 3), std::max<Tick>(1, (2 * t) / 3));
        else
            c = rng.int_in(1, std::max<Tick>(1, t / f));
        const Tick r = rng.int_in(0, std::max<Tick>(0, (t - c) / 2));
        const Tick w = rng.int_in(0, std::max<Tick>(0, t - c - r));
        sys.tasks.push_back(TaskSpec::read_write(i, r, c, w, t));
    }
    return sys;
}

TaskSystem case_study_system(CaseStudy c) {
    // Matrix pipelines in 1 ms ticks: reads and writes move 500x500 matrices
    // (up to 100 ms each), each multiplication takes up to 200 ms.
    const TaskSpec pipeline_a = TaskSpec::read_write(0, 300, 400, 100, 950);
    const TaskSpec pipeline_b = TaskSpec::read_write(1, 300, 600, 200, 1250);
    TaskSystem sys;
    sys.tick_unit = "ms";
    if (c == CaseStudy::Uni2Tasks) {
        sys.processors = 1;
        sys.tasks = {pipeline_a, pipeline_b};
    } else {
        sys.processors = 2;
        TaskSpec third = pipeline_a;
        third.id = 2;
        sys.tasks = {pipeline_a, pipeline_b, third};
    }
    return sys;
}

CaseStudyResult run_case_study(CaseStudy c, Scheduler sched, std::int64_t jobs_per_task) {
    const TaskSystem sys = case_study_system(c);
    Tick max_period = 0;
    for (const auto& t : sys.tasks)
        max_period = std::max(max_period, t.period);
    const Tick horizon = (jobs_per_task + 2) * max_period;

    CaseStudyResult res;
    if (sched == Scheduler::GEDF_RW)
        res.trace = simulate(transform(sys), sched, ReleaseModel::synchronous(), horizon);
    else
        res.trace = simulate(sys, sched, ReleaseModel::synchronous(), horizon);
    for (const auto& r : response_times(res.trace))
        if (r.job <= jobs_per_task)
            res.responses.push_back(r);
    std::sort(res.responses.begin(), res.responses.end(),
              [](const ResponseRecord& a, const ResponseRecord& b) {
                  return std::tuple(a.task, a.job) < std::tuple(b.task, b.job);
              });
    return res;
}

void write_responses_csv(const std::vector<ResponseRecord>& responses,
                         const std::vector<TaskSpec>& specs, std::ostream& out) {
    out << "# schema: susched-responses-v1\n";
    out << "task,job,release,completion,response,met\n";
    for (const auto& r : responses) {
        out << r.task << ',' << r.job << ',' << r.release << ',';
        if (r.completion)
            out << *r.completion;
        out << ',';
        if (r.response)
            out << *r.response;
        out << ',';
        if (r.completion) {
            const Tick deadline = r.release + specs[r.task].period;
            out << (*r.completion <= deadline ? 1 : 0);
        }
        out << '\n';
    }
}

}  // namespace susched
