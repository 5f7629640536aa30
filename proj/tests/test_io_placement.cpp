#include "susched/io_placement.hpp"
#include "susched/sched_tests.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace susched;

namespace {

TaskSystem intro_pair() {
    TaskSystem s;
    s.processors = 1;
    s.tasks = {TaskSpec::read_write(0, 5, 5, 5, 15), TaskSpec::read_write(1, 5, 5, 5, 15)};
    return s;
}

Tick total(const PhaseList& l, PhaseKind k) {
    Tick sum = 0;
    for (const auto& p : l)
        if (p.kind == k)
            sum += p.length;
    return sum;
}

TaskSystem random_read_write(std::mt19937& gen, int max_tasks) {
    TaskSystem s;
    s.processors = 1 + gen() % 4;
    const int n = 1 + gen() % max_tasks;
    for (int i = 0; i < n; ++i) {
        const Tick period = 1 + gen() % 120;
        const Tick c = gen() % (period + 1);
        const Tick r = gen() % (period - c + 1);
        const Tick w = gen() % (period - c - r + 1);
        s.tasks.push_back(TaskSpec::read_write(i, r, c, w, period));
    }
    return s;
}

}  // namespace

TEST_CASE("transform reassigns the introductory pair's phases") {
    const TransformedSystem ts = transform(intro_pair());
    REQUIRE(ts.tasks.size() == 2);
    const TransformedTask& t = ts.tasks[0];

    REQUIRE(t.prefetch.size() == 1);
    CHECK(t.prefetch[0].kind == PhaseKind::Suspend);
    CHECK(t.prefetch[0].length == 5);
    CHECK(t.prefetch[0].origin == PhaseOrigin{0, 1, OriginPhase::Read});

    REQUIRE(t.first_job.size() == 2);
    CHECK(t.first_job[0].kind == PhaseKind::Compute);
    CHECK(t.first_job[1].origin == PhaseOrigin{0, 2, OriginPhase::Read});

    // Steady job, materialized for j = 2: write of 1, compute of 2, read of 3.
    REQUIRE(t.steady_phases.size() == 3);
    CHECK(t.steady_phases[0].kind == PhaseKind::Suspend);
    CHECK(t.steady_phases[0].origin == PhaseOrigin{0, 1, OriginPhase::Write});
    CHECK(t.steady_phases[1].kind == PhaseKind::Compute);
    CHECK(t.steady_phases[1].origin == PhaseOrigin{0, 2, OriginPhase::Compute});
    CHECK(t.steady_phases[2].origin == PhaseOrigin{0, 3, OriginPhase::Read});
    CHECK(total(t.steady_phases, PhaseKind::Suspend) == 10);
    CHECK(total(t.steady_phases, PhaseKind::Compute) == 5);

    REQUIRE(t.epilogue.size() == 1);
    CHECK(t.epilogue[0].kind == PhaseKind::Suspend);
}

TEST_CASE("transform without suspensions is the identity on phase content") {
    TaskSystem s;
    s.processors = 1;
    s.tasks = {TaskSpec::read_write(0, 0, 7, 0, 10)};
    const TransformedSystem ts = transform(s);
    CHECK(ts.tasks[0].prefetch.empty());
    CHECK(ts.tasks[0].epilogue.empty());
    REQUIRE(ts.tasks[0].steady_phases.size() == 1);
    CHECK(ts.tasks[0].steady_phases[0].kind == PhaseKind::Compute);
    CHECK(ts.tasks[0].steady_phases[0].length == 7);
}

TEST_CASE("transform rejects write-only tasks") {
    TaskSystem s;
    s.processors = 1;
    s.tasks = {TaskSpec::write_only(0, 1, 1, 1, 10)};
    CHECK_THROWS_AS(transform(s), WrongTaskKindError);
}

TEST_CASE("transform preserves U and V exactly") {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 60; ++trial) {
        const TaskSystem s = random_read_write(gen, 5);
        const TransformedSystem ts = transform(s);
        for (std::size_t i = 0; i < s.tasks.size(); ++i) {
            const DerivedParams d = derived_params(s.tasks[i]);
            const auto& steady = ts.tasks[i].steady_phases;
            CHECK(ratio(total(steady, PhaseKind::Compute), s.tasks[i].period) ==
                  d.utilization);
            CHECK(ratio(total(steady, PhaseKind::Suspend), s.tasks[i].period) ==
                  d.suspension_ratio);
        }
    }
}

TEST_CASE("job_phases enumerates prefetch, first, steady, epilogue") {
    const TransformedSystem ts = transform(intro_pair());
    const TransformedTask& t = ts.tasks[1];

    const PhaseList j0 = job_phases(t, 0, 10);
    REQUIRE(j0.size() == 1);
    CHECK(j0[0].origin == PhaseOrigin{1, 1, OriginPhase::Read});

    const PhaseList j1 = job_phases(t, 1, 10);
    REQUIRE(j1.size() == 2);
    CHECK(j1[0].kind == PhaseKind::Compute);
    CHECK(j1[1].origin == PhaseOrigin{1, 2, OriginPhase::Read});

    const PhaseList j5 = job_phases(t, 5, 10);
    REQUIRE(j5.size() == 3);
    CHECK(j5[0].origin == PhaseOrigin{1, 4, OriginPhase::Write});
    CHECK(j5[1].origin == PhaseOrigin{1, 5, OriginPhase::Compute});
    CHECK(j5[2].origin == PhaseOrigin{1, 6, OriginPhase::Read});
    CHECK(total(j5, PhaseKind::Suspend) == 10);
    CHECK(total(j5, PhaseKind::Compute) == 5);

    const PhaseList epi = job_phases(t, 11, 10);
    REQUIRE(epi.size() == 1);
    CHECK(epi[0].origin == PhaseOrigin{1, 10, OriginPhase::Write});

    CHECK_THROWS_AS(job_phases(t, 12, 10), std::out_of_range);
    CHECK_THROWS_AS(job_phases(t, -1, 10), std::out_of_range);
}

TEST_CASE("every original phase appears exactly once across a finite horizon") {
    // Jobs 0..J+1 of a transformed task jointly carry the read, compute and
    // write of original jobs 1..J, each exactly once, plus the read of job
    // J+1 which job J pre-fetches for a successor that never runs.
    std::mt19937 gen(37);
    for (int trial = 0; trial < 40; ++trial) {
        const TaskSystem s = random_read_write(gen, 3);
        const TransformedSystem ts = transform(s);
        const std::int64_t last = 1 + gen() % 8;
        for (std::size_t i = 0; i < ts.tasks.size(); ++i) {
            const TaskSpec& spec = s.tasks[i];
            std::map<std::pair<std::int64_t, OriginPhase>, Tick> seen;
            for (std::int64_t j = 0; j <= last + 1; ++j)
                for (const auto& p : job_phases(ts.tasks[i], j, last))
                    seen[{p.origin.job, p.origin.phase}] += p.length;

            std::map<std::pair<std::int64_t, OriginPhase>, Tick> expected;
            for (std::int64_t j = 1; j <= last; ++j) {
                if (spec.read > 0)
                    expected[{j, OriginPhase::Read}] = spec.read;
                if (spec.compute > 0)
                    expected[{j, OriginPhase::Compute}] = spec.compute;
                if (spec.write > 0)
                    expected[{j, OriginPhase::Write}] = spec.write;
            }
            if (spec.read > 0)
                expected[{last + 1, OriginPhase::Read}] = spec.read;
            CHECK(seen == expected);
        }
    }
}

TEST_CASE("transformed systems round-trip through their file format") {
    const TransformedSystem ts = transform(intro_pair());
    const std::string text = serialize_transformed_system(ts);
    CHECK(looks_transformed(text));
    const TransformedSystem back = parse_transformed_system(text);
    CHECK(back.tasks.size() == 2);
    CHECK(back.tasks[0].steady_phases == ts.tasks[0].steady_phases);
    CHECK(serialize_transformed_system(back) == text);

    CHECK(!looks_transformed(serialize_task_system(intro_pair())));
    CHECK_THROWS_AS(parse_transformed_system(serialize_task_system(intro_pair())),
                    ParseError);
}
