// Command-line front end: schedulability analysis, the flexible I/O placement
// transform, trace-producing simulation, schedulability-curve experiments and
// the simulated case studies.

#include "susched/experiments.hpp"
#include "susched/fluid_reference.hpp"
#include "susched/io_placement.hpp"
#include "susched/sched_tests.hpp"
#include "susched/simulator.hpp"
#include "susched/task_model.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace susched;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInternal = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseCode::Syntax, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    return out;
}

void print_verdict(const TestVerdict& v) {
    std::cout << test_name(v.test_name) << ": " << (v.passed ? "PASS" : "FAIL")
              << "  margin=" << to_string(v.margin);
    if (v.failed_condition)
        std::cout << "  (" << *v.failed_condition << ")";
    std::cout << "\n";
}

int cmd_analyze(const std::string& path, const std::vector<std::string>& tests) {
    const TaskSystem sys = load_task_system(path);
    std::vector<std::string> selected = tests;
    if (selected.empty()) {
        selected = {"density", "oblivious"};
        const bool all_wo = std::all_of(sys.tasks.begin(), sys.tasks.end(), [](auto& t) {
            return t.kind == TaskKind::WriteOnly;
        });
        const bool all_rw = std::all_of(sys.tasks.begin(), sys.tasks.end(), [](auto& t) {
            return t.kind == TaskKind::ReadWrite;
        });
        if (all_wo)
            selected.push_back("writeonly");
        if (all_rw)
            selected.push_back("rw");
    }
    std::cout << "system: n=" << sys.tasks.size() << " m=" << sys.processors
              << " U_sum=" << to_string(sys.u_sum()) << " V_sum=" << to_string(sys.v_sum())
              << "\n";
    for (const auto& name : selected) {
        TestVerdict v;
        if (name == "density")
            v = density_test(sys);
        else if (name == "oblivious")
            v = susp_oblivious_density_test(sys);
        else if (name == "writeonly")
            v = write_only_test(sys);
        else if (name == "rw")
            v = rw_placement_test(sys);
        else
            throw std::invalid_argument("unknown test '" + name +
                                        "' (density, oblivious, writeonly, rw)");
        print_verdict(v);
    }
    return kExitOk;
}

int cmd_transform(const std::string& path, const std::string& out_path) {
    const TaskSystem sys = load_task_system(path);
    store_transformed_system(transform(sys), out_path);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

ReleaseModel parse_release(const std::string& text) {
    if (text == "sync")
        return ReleaseModel::synchronous();
    if (text.rfind("offsets:", 0) == 0) {
        std::vector<Tick> offs;
        std::stringstream ss(text.substr(8));
        std::string item;
        while (std::getline(ss, item, ','))
            offs.push_back(std::stoll(item));
        return ReleaseModel::with_offsets(std::move(offs));
    }
    if (text.rfind("sporadic:", 0) == 0) {
        std::stringstream ss(text.substr(9));
        std::string item;
        std::vector<std::string> parts;
        while (std::getline(ss, item, ','))
            parts.push_back(item);
        if (parts.empty())
            throw std::invalid_argument("sporadic release needs a seed");
        const std::uint64_t seed = std::stoull(parts[0]);
        const Tick gap = parts.size() > 1 ? std::stoll(parts[1]) : -1;
        return ReleaseModel::sporadic(seed, gap);
    }
    throw std::invalid_argument("release model must be sync, offsets:o0,o1,... or "
                                "sporadic:SEED[,MAXGAP]");
}

int check_lemmas(const Trace& tr) {
    int violations = 0;
    if (!tr.transformed && tr.scheduler == Scheduler::GEDF &&
        std::all_of(tr.task_specs.begin(), tr.task_specs.end(),
                    [](auto& t) { return t.kind == TaskKind::WriteOnly; })) {
        const auto v2 = check_suspend_compute_ratio(tr);
        for (const auto& v : v2)
            std::cout << "suspend-ratio violation: task " << v.task << " job " << v.job
                      << " at t=" << v.t << " (S*=" << v.suspended << ", C*=" << v.computed
                      << ")\n";
        std::cout << "suspend-ratio check: " << v2.size() << " violation(s)\n";
        violations += static_cast<int>(v2.size());
    }
    Rational u_sum = 0;
    for (const auto& t : tr.task_specs)
        u_sum += derived_params(t).utilization;
    if (u_sum <= tr.processors) {
        const auto v1 = check_busy_interval_lag(tr);
        for (const auto& v : v1)
            std::cout << "busy-interval LAG rise: [" << v.begin << "," << v.end
                      << ") LAG " << to_string(v.lag_begin) << " -> " << to_string(v.lag_end)
                      << "\n";
        std::cout << "busy-interval LAG check: " << v1.size() << " violation(s) over "
                  << busy_intervals(tr).size() << " busy interval(s)\n";
        violations += static_cast<int>(v1.size());
    } else {
        std::cout << "busy-interval LAG check: skipped (U_sum > m)\n";
    }
    if (tr.transformed && tr.scheduler == Scheduler::GEDF_RW) {
        const auto v4 = check_miss_compute_debt(tr);
        for (const auto& v : v4)
            std::cout << "miss without compute debt: task " << v.miss.task << " job "
                      << v.miss.job << " at d=" << v.miss.deadline
                      << " lag=" << to_string(v.lag) << "\n";
        std::cout << "miss-lag check: " << v4.size() << " violation(s) over "
                  << tr.misses.size() << " miss(es)\n";
        violations += static_cast<int>(v4.size());
    }
    return violations;
}

int cmd_simulate(const std::string& path, const std::string& sched_name,
                 Tick horizon, const std::string& release, bool lemmas,
                 const std::string& out_path) {
    const ReleaseModel rel = parse_release(release);
    const Scheduler sched = sched_name == "gedf-rw" ? Scheduler::GEDF_RW : Scheduler::GEDF;
    const std::string text = slurp(path);

    Trace tr;
    if (looks_transformed(text)) {
        tr = simulate(parse_transformed_system(text), sched, rel, horizon);
    } else {
        if (sched == Scheduler::GEDF_RW)
            throw SimulationError(SimErrorCode::IncompatibleScheduler,
                                  "gedf-rw needs a transformed system (run `susched "
                                  "transform` first)");
        tr = simulate(parse_task_system(text), sched, rel, horizon);
    }

    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_trace_csv(tr, out);
    }
    std::cout << "jobs released: " << tr.jobs.size() << ", deadline misses: "
              << tr.misses.size() << "\n";
    if (const auto miss = first_deadline_miss(tr))
        std::cout << "first miss: task " << miss->task << " job " << miss->job
                  << " at t=" << miss->deadline << "\n";
    int violations = 0;
    if (lemmas)
        violations = check_lemmas(tr);
    return violations == 0 ? kExitOk : kExitValidation;
}

int cmd_experiment(double alpha, const std::string& util, const std::string& susp, int m,
                   int per_cap, std::uint64_t seed, const std::string& out_path) {
    GenConfig cfg;
    cfg.m = m;
    cfg.systems_per_cap = per_cap;
    cfg.seed = seed;
    if (alpha == 0.9)
        cfg.alpha = ratio(9, 10);
    else if (alpha == 0.5)
        cfg.alpha = ratio(1, 2);
    else if (alpha == 0.2)
        cfg.alpha = ratio(1, 5);
    else
        throw std::invalid_argument("--alpha must be 0.9, 0.5 or 0.2");
    if (util == "light")
        cfg.util = UtilDist::Light;
    else if (util == "medium")
        cfg.util = UtilDist::Medium;
    else if (util == "heavy")
        cfg.util = UtilDist::Heavy;
    else
        throw std::invalid_argument("--util must be light, medium or heavy");
    if (susp == "short")
        cfg.susp = SuspDist::Short;
    else if (susp == "long")
        cfg.susp = SuspDist::Long;
    else
        throw std::invalid_argument("--susp must be short or long");

    const std::vector<SchedTest> tests = {SchedTest::WriteOnlyGEDF,
                                          SchedTest::SuspObliviousDensity};
    const auto points = run_schedulability_experiment(cfg, default_cap_grid(m), tests);
    auto out = open_out(out_path);
    write_curves_csv(points, tests, out);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_casestudy(const std::string& which, const std::string& sched_name,
                  const std::string& out_path, std::int64_t jobs) {
    const CaseStudy cs = which == "duo3" ? CaseStudy::Duo3Tasks : CaseStudy::Uni2Tasks;
    const Scheduler sched = sched_name == "gedf-rw" ? Scheduler::GEDF_RW : Scheduler::GEDF;
    const CaseStudyResult res = run_case_study(cs, sched, jobs);
    auto out = open_out(out_path);
    write_responses_csv(res.responses, res.trace.task_specs, out);
    std::cout << "wrote " << out_path << " (" << res.responses.size() << " jobs, "
              << res.trace.misses.size() << " misses in the full trace)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis and simulation of suspending sporadic task systems under "
                 "global EDF schedulers"};
    app.require_subcommand(1);

    std::string file, out_path, sched_name = "gedf", release = "sync";
    std::vector<std::string> tests;
    Tick horizon = 0;
    bool lemmas = false;

    auto* analyze = app.add_subcommand("analyze", "Run schedulability tests on a system");
    analyze->add_option("file", file, "task-system file")->required();
    analyze->add_option("--tests", tests, "density,oblivious,writeonly,rw")->delimiter(',');

    auto* tf = app.add_subcommand("transform", "Apply the flexible I/O placement");
    tf->add_option("file", file, "task-system file (read-write tasks)")->required();
    tf->add_option("-o,--out", out_path, "output file")->required();

    auto* sim = app.add_subcommand("simulate", "Simulate and emit a trace CSV");
    sim->add_option("file", file, "task-system or transformed-system file")->required();
    sim->add_option("--sched", sched_name, "gedf | gedf-rw")
        ->check(CLI::IsMember({"gedf", "gedf-rw"}));
    sim->add_option("--horizon", horizon, "ticks to simulate")->required();
    sim->add_option("--release", release, "sync | offsets:o0,o1,... | sporadic:SEED[,GAP]");
    sim->add_flag("--check-lemmas", lemmas, "verify trace invariants");
    sim->add_option("-o,--out", out_path, "trace CSV path");

    double alpha = 0.9;
    std::string util = "light", susp = "short";
    int m = 4, per_cap = 1000;
    std::uint64_t seed = 0;
    auto* exp = app.add_subcommand("experiment", "Schedulability-curve experiment");
    exp->add_option("--alpha", alpha, "0.9 | 0.5 | 0.2");
    exp->add_option("--util", util, "light | medium | heavy");
    exp->add_option("--susp", susp, "short | long");
    exp->add_option("--m", m, "processor count");
    exp->add_option("--per-cap", per_cap, "systems per utilization cap");
    exp->add_option("--seed", seed, "generator seed");
    exp->add_option("-o,--out", out_path, "curves CSV path")->required();

    std::string which = "uni2";
    std::int64_t jobs = 400;
    auto* cs = app.add_subcommand("casestudy", "Simulated matrix-pipeline case study");
    cs->add_option("--case", which, "uni2 | duo3")->check(CLI::IsMember({"uni2", "duo3"}));
    cs->add_option("--sched", sched_name, "gedf | gedf-rw")
        ->check(CLI::IsMember({"gedf", "gedf-rw"}));
    cs->add_option("--jobs", jobs, "jobs per task to report");
    cs->add_option("-o,--out", out_path, "responses CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed())
            return cmd_analyze(file, tests);
        if (tf->parsed())
            return cmd_transform(file, out_path);
        if (sim->parsed())
            return cmd_simulate(file, sched_name, horizon, release, lemmas, out_path);
        if (exp->parsed())
            return cmd_experiment(alpha, util, susp, m, per_cap, seed, out_path);
        if (cs->parsed())
            return cmd_casestudy(which, sched_name, out_path, jobs);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const WrongTaskKindError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
