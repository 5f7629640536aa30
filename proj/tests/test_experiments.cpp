#include "susched/experiments.hpp"
#include "susched/fluid_reference.hpp"
#include "susched/io_placement.hpp"

#include <doctest.h>

#include <sstream>

using namespace susched;

namespace {

GenConfig light_short(Rational cap, std::uint64_t seed) {
    GenConfig cfg;
    cfg.m = 4;
    cfg.util = UtilDist::Light;
    cfg.susp = SuspDist::Short;
    cfg.alpha = ratio(9, 10);
    cfg.cap = cap;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("generated systems land exactly on the utilization cap") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Rational cap = ratio(1 + trial % 35, 10);
        const GeneratedSystem sys = generate_task_system(light_short(cap, 1), rng);
        CHECK(sys.u_sum == cap);
        Rational check = 0;
        for (const auto& t : sys.tasks) {
            check += t.u;
            CHECK(t.u + t.v <= 1);
            CHECK(t.c1 + t.c2 == t.c);
            CHECK(t.c == t.u * t.t);
            CHECK(t.delta == t.w / t.c1);
        }
        CHECK(check == cap);
    }
}

TEST_CASE("a cap at the utilization floor yields a single shrunk task") {
    Rng rng(2);
    const GeneratedSystem sys = generate_task_system(light_short(ratio(1, 1000), 2), rng);
    CHECK(sys.tasks.size() == 1);
    CHECK(sys.u_sum == ratio(1, 1000));
}

TEST_CASE("caps below the floor or above the platform are rejected") {
    Rng rng(3);
    CHECK_THROWS_AS(generate_task_system(light_short(ratio(1, 2000), 3), rng),
                    GenerationError);
    CHECK_THROWS_AS(generate_task_system(light_short(ratio(9, 2), 3), rng),
                    GenerationError);
}

TEST_CASE("empirical means match the configured uniform midpoints") {
    Rng rng(4);
    Rational u_acc = 0, v_acc = 0, w_acc = 0;
    long u_n = 0, vw_n = 0;
    while (vw_n < 10000) {
        const GeneratedSystem sys = generate_task_system(light_short(ratio(7, 2), 4), rng);
        for (std::size_t i = 0; i < sys.tasks.size(); ++i) {
            const auto& t = sys.tasks[i];
            v_acc += t.v;
            w_acc += t.w;
            vw_n += 1;
            if (i + 1 < sys.tasks.size()) {  // the last task's U is capped, not drawn
                u_acc += t.u;
                u_n += 1;
            }
        }
    }
    const double u_mean = to_double(u_acc) / static_cast<double>(u_n);
    const double v_mean = to_double(v_acc) / static_cast<double>(vw_n);
    const double w_mean = to_double(w_acc) / static_cast<double>(vw_n);
    CHECK(u_mean == doctest::Approx((0.001 + 0.05) / 2).epsilon(0.05));
    CHECK(v_mean == doctest::Approx((0.005 + 0.1) / 2).epsilon(0.05));
    CHECK(w_mean == doctest::Approx((5.0 + 50.0) / 2).epsilon(0.05));
}

TEST_CASE("delta shrinks as alpha grows, draw for draw") {
    GenConfig a = light_short(ratio(3, 2), 5);
    GenConfig b = a;
    b.alpha = ratio(1, 5);
    Rng ra(5), rb(5);
    const GeneratedSystem sa = generate_task_system(a, ra);
    const GeneratedSystem sb = generate_task_system(b, rb);
    REQUIRE(sa.tasks.size() == sb.tasks.size());
    for (std::size_t i = 0; i < sa.tasks.size(); ++i) {
        CHECK(sa.tasks[i].u == sb.tasks[i].u);
        CHECK(sa.tasks[i].delta < sb.tasks[i].delta);
    }
}

TEST_CASE("quantize scales rational systems onto an integer grid") {
    SUBCASE("hand-built system with small denominators") {
        GeneratedSystem sys;
        sys.m = 2;
        GeneratedTask t;
        t.w = 2;
        t.v = ratio(1, 4);   // T = 8
        t.u = ratio(1, 2);   // C = 4
        t.t = t.w / t.v;
        t.c = t.u * t.t;
        t.c1 = ratio(1, 2) * t.c;  // 2
        t.c2 = t.c - t.c1;
        t.delta = t.w / t.c1;
        sys.tasks = {t};
        sys.u_sum = t.u;
        const QuantizeResult q = quantize(sys, 1000000);
        REQUIRE(q.system);
        CHECK(q.scale == 1);
        CHECK(q.hyperperiod == 8);
        const DerivedParams d = derived_params(q.system->tasks[0]);
        CHECK(d.utilization == t.u);
        CHECK(d.suspension_ratio == t.v);
        CHECK(*d.delta == t.delta);
    }
    SUBCASE("fractional phases pick up a common scale") {
        GeneratedSystem sys;
        sys.m = 1;
        GeneratedTask t;
        t.w = 3;
        t.v = ratio(3, 10);  // T = 10
        t.u = ratio(1, 4);   // C = 5/2
        t.t = t.w / t.v;
        t.c = t.u * t.t;
        t.c1 = ratio(9, 10) * t.c;  // 9/4
        t.c2 = t.c - t.c1;          // 1/4
        t.delta = t.w / t.c1;
        sys.tasks = {t};
        sys.u_sum = t.u;
        const QuantizeResult q = quantize(sys, 1000000);
        REQUIRE(q.system);
        CHECK(q.scale == 4);
        CHECK(q.system->tasks[0].period == 40);
        CHECK(q.system->tasks[0].compute1 == 9);
        CHECK(q.system->tasks[0].compute2 == 1);
        CHECK(q.system->tasks[0].write == 12);
        CHECK(derived_params(q.system->tasks[0]).utilization == t.u);
    }
    SUBCASE("systems over the hyperperiod cap are skipped but measured") {
        Rng rng(6);
        const GeneratedSystem sys =
            generate_task_system(light_short(ratio(1, 2), 6), rng);
        const QuantizeResult q = quantize(sys, 1000);
        CHECK(!q.system);
        CHECK(q.hyperperiod > 1000);
    }
}

TEST_CASE("experiment runs are reproducible byte for byte") {
    GenConfig cfg = light_short(0, 42);
    cfg.systems_per_cap = 40;
    const std::vector<Rational> caps = {ratio(1, 2), ratio(3, 2)};
    const std::vector<SchedTest> tests = {SchedTest::WriteOnlyGEDF,
                                          SchedTest::SuspObliviousDensity};
    std::ostringstream a, b;
    write_curves_csv(run_schedulability_experiment(cfg, caps, tests), tests, a);
    write_curves_csv(run_schedulability_experiment(cfg, caps, tests), tests, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("# schema: susched-curves-v1", 0) == 0);

    // Different seeds draw different systems.
    Rng r42(mix_seed(42, 0, 0)), r43(mix_seed(43, 0, 0));
    const GeneratedSystem s42 = generate_task_system(light_short(ratio(1, 2), 0), r42);
    const GeneratedSystem s43 = generate_task_system(light_short(ratio(1, 2), 0), r43);
    CHECK(s42.tasks[0].u != s43.tasks[0].u);
}

TEST_CASE("every cap far below the suspension-aware bound is accepted") {
    GenConfig cfg = light_short(0, 7);
    cfg.systems_per_cap = 30;
    const std::vector<SchedTest> tests = {SchedTest::WriteOnlyGEDF};
    const auto points =
        run_schedulability_experiment(cfg, {ratio(1, 2), ratio(1, 1)}, tests);
    for (const auto& pt : points)
        CHECK(pt.fraction(SchedTest::WriteOnlyGEDF) == 1);
}

TEST_CASE("structured fuzz systems are valid and have small hyperperiods") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const TaskSystem wo = fuzz_write_only_system(rng, 2, 2, 8);
        CHECK(!validate_system(wo));
        CHECK(hyperperiod(wo) <= 5040);
        const TaskSystem rw = fuzz_read_write_system(rng, 4, 2, 8);
        CHECK(!validate_system(rw));
        CHECK(hyperperiod(rw) <= 5040);
        const TaskSystem over = fuzz_read_write_system(rng, 2, 5, 8, true);
        CHECK(!validate_system(over));
    }
}

TEST_CASE("case-study systems carry the measured pipeline parameters") {
    const TaskSystem uni = case_study_system(CaseStudy::Uni2Tasks);
    CHECK(uni.processors == 1);
    REQUIRE(uni.tasks.size() == 2);
    CHECK(uni.u_sum() == ratio(400, 950) + ratio(600, 1250));
    CHECK(uni.tasks[0].period == 950);
    CHECK(uni.tasks[1].period == 1250);

    const TaskSystem duo = case_study_system(CaseStudy::Duo3Tasks);
    CHECK(duo.processors == 2);
    REQUIRE(duo.tasks.size() == 3);
    CHECK(duo.tasks[2].period == duo.tasks[0].period);
}

TEST_CASE("a short case-study run stays within deadlines under GEDF-R/W") {
    const CaseStudyResult res = run_case_study(CaseStudy::Uni2Tasks, Scheduler::GEDF_RW, 12);
    CHECK(res.trace.misses.empty());
    REQUIRE(res.responses.size() == 24);
    for (const auto& r : res.responses) {
        REQUIRE(r.response);
        CHECK(*r.response <= res.trace.task_specs[r.task].period);
    }
    std::ostringstream out;
    write_responses_csv(res.responses, res.trace.task_specs, out);
    CHECK(out.str().find("# schema: susched-responses-v1") == 0);
}
