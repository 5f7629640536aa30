#include "susched/experiments.hpp"
#include "susched/fluid_reference.hpp"
#include "susched/io_placement.hpp"
#include "susched/sched_tests.hpp"
#include "susched/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace susched;

namespace {

TaskSystem intro_pair() {
    TaskSystem s;
    s.processors = 1;
    s.tasks = {TaskSpec::read_write(0, 5, 5, 5, 15), TaskSpec::read_write(1, 5, 5, 5, 15)};
    return s;
}

void BM_SimulateOrderedPair(benchmark::State& state) {
    const TaskSystem s = intro_pair();
    const Tick horizon = state.range(0);
    for (auto _ : state) {
        Trace tr = simulate(s, Scheduler::GEDF, ReleaseModel::synchronous(), horizon);
        benchmark::DoNotOptimize(tr.misses.size());
    }
    state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_SimulateOrderedPair)->Arg(15000)->Arg(150000);

void BM_SimulateCaseStudyFlexible(benchmark::State& state) {
    const TransformedSystem ts = transform(case_study_system(CaseStudy::Uni2Tasks));
    const Tick horizon = state.range(0);
    for (auto _ : state) {
        Trace tr = simulate(ts, Scheduler::GEDF_RW, ReleaseModel::synchronous(), horizon);
        benchmark::DoNotOptimize(tr.jobs.size());
    }
    state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_SimulateCaseStudyFlexible)->Arg(47500)->Arg(475000);

void BM_GenerateSystem(benchmark::State& state) {
    GenConfig cfg;
    cfg.m = 4;
    cfg.util = UtilDist::Light;
    cfg.susp = SuspDist::Short;
    cfg.alpha = ratio(9, 10);
    cfg.cap = ratio(30, 10);
    Rng rng(1);
    for (auto _ : state) {
        GeneratedSystem sys = generate_task_system(cfg, rng);
        benchmark::DoNotOptimize(sys.tasks.size());
    }
}
BENCHMARK(BM_GenerateSystem);

void BM_WriteOnlyTest(benchmark::State& state) {
    GenConfig cfg;
    cfg.m = 4;
    cfg.util = UtilDist::Light;
    cfg.susp = SuspDist::Short;
    cfg.alpha = ratio(9, 10);
    cfg.cap = ratio(30, 10);
    Rng rng(2);
    const GeneratedSystem sys = generate_task_system(cfg, rng);
    const std::vector<TaskParams> params = params_of(sys);
    for (auto _ : state) {
        TestVerdict v = write_only_test(params, sys.m);
        benchmark::DoNotOptimize(v.passed);
    }
    state.SetLabel(std::to_string(sys.tasks.size()) + " tasks");
}
BENCHMARK(BM_WriteOnlyTest);

void BM_BusyIntervalLagCheck(benchmark::State& state) {
    Rng rng(3);
    const TaskSystem s = fuzz_write_only_system(rng, 4, 8, 12);
    const Trace tr =
        simulate(s, Scheduler::GEDF, ReleaseModel::synchronous(), 2 * hyperperiod(s));
    for (auto _ : state) {
        auto violations = check_busy_interval_lag(tr);
        benchmark::DoNotOptimize(violations.size());
    }
    state.SetLabel(std::to_string(tr.jobs.size()) + " jobs");
}
BENCHMARK(BM_BusyIntervalLagCheck);

}  // namespace

BENCHMARK_MAIN();
