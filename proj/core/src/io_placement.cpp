#include "susched/io_placement.hpp"
#include "susched/sched_tests.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace susched {

using nlohmann::json;

namespace {

void push_nonzero(PhaseList& list, PhaseKind kind, Tick len, PhaseOrigin origin) {
    if (len > 0)
        list.push_back({kind, len, origin});
}

PhaseList phases_for(const TaskSpec& t, std::int64_t j) {
    PhaseList out;
    const int id = t.id;
    if (j == 0) {
        push_nonzero(out, PhaseKind::Suspend, t.read, {id, 1, OriginPhase::Read});
    } else if (j == 1) {
        push_nonzero(out, PhaseKind::Compute, t.compute, {id, 1, OriginPhase::Compute});
        push_nonzero(out, PhaseKind::Suspend, t.read, {id, 2, OriginPhase::Read});
    } else {
        push_nonzero(out, PhaseKind::Suspend, t.write, {id, j - 1, OriginPhase::Write});
        push_nonzero(out, PhaseKind::Compute, t.compute, {id, j, OriginPhase::Compute});
        push_nonzero(out, PhaseKind::Suspend, t.read, {id, j + 1, OriginPhase::Read});
    }
    return out;
}

PhaseList epilogue_for(const TaskSpec& t, std::int64_t last_job) {
    PhaseList out;
    push_nonzero(out, PhaseKind::Suspend, t.write, {t.id, last_job, OriginPhase::Write});
    return out;
}

}  // namespace

TransformedSystem transform(const TaskSystem& s) {
    TransformedSystem out;
    out.processors = s.processors;
    out.tick_unit = s.tick_unit;
    for (const auto& t : s.tasks) {
        if (t.kind != TaskKind::ReadWrite)
            throw WrongTaskKindError("transform: task " + std::to_string(t.id) +
                                     " is not read-write");
        TransformedTask tt;
        tt.base = t;
        tt.prefetch = phases_for(t, 0);
        tt.first_job = phases_for(t, 1);
        tt.steady_phases = phases_for(t, 2);
        tt.epilogue = epilogue_for(t, 2);
        out.tasks.push_back(std::move(tt));
    }
    return out;
}

PhaseList job_phases(const TransformedTask& t, std::int64_t j, std::int64_t last_job) {
    if (j < 0 || j > last_job + 1)
        throw std::out_of_range("job_phases: job index " + std::to_string(j) +
                                " outside 0.." + std::to_string(last_job + 1));
    if (j == last_job + 1)
        return epilogue_for(t.base, last_job);
    return phases_for(t.base, j);
}

namespace {

json phase_list_json(const PhaseList& list) {
    json arr = json::array();
    for (const auto& p : list) {
        json pj;
        pj["kind"] = p.kind == PhaseKind::Compute ? "compute" : "suspend";
        pj["len"] = p.length;
        pj["origin_job"] = p.origin.job;
        pj["origin_phase"] = p.origin.phase == OriginPhase::Read      ? "read"
                             : p.origin.phase == OriginPhase::Compute ? "compute"
                                                                      : "write";
        arr.push_back(pj);
    }
    return arr;
}

TaskSystem base_system(const TransformedSystem& s) {
    TaskSystem base;
    base.processors = s.processors;
    base.tick_unit = s.tick_unit;
    for (const auto& t : s.tasks)
        base.tasks.push_back(t.base);
    return base;
}

}  // namespace

std::string serialize_transformed_system(const TransformedSystem& s) {
    json doc = json::parse(serialize_task_system(base_system(s)));
    doc["transformed"] = true;
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        json tmpl;
        tmpl["prefetch"] = phase_list_json(s.tasks[i].prefetch);
        tmpl["first"] = phase_list_json(s.tasks[i].first_job);
        tmpl["steady"] = phase_list_json(s.tasks[i].steady_phases);
        tmpl["epilogue"] = phase_list_json(s.tasks[i].epilogue);
        doc["tasks"][i]["templates"] = tmpl;
    }
    return doc.dump(2) + "\n";
}

TransformedSystem parse_transformed_system(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(ParseCode::Syntax, e.what());
    }
    if (!doc.is_object() || !doc.value("transformed", false))
        throw ParseError(ParseCode::Syntax, "document is not a transformed system");
    json plain = doc;
    plain.erase("transformed");
    for (auto& tj : plain["tasks"])
        tj.erase("templates");
    // The templates are derived data; rebuilding them from the base tasks both
    // validates the document and keeps a single source of truth.
    return transform(parse_task_system(plain.dump()));
}

TransformedSystem load_transformed_system(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseCode::Syntax, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_transformed_system(buf.str());
}

void store_transformed_system(const TransformedSystem& s, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << serialize_transformed_system(s);
}

bool looks_transformed(const std::string& text) {
    try {
        json doc = json::parse(text);
        return doc.is_object() && doc.value("transformed", false);
    } catch (const json::parse_error&) {
        return false;
    }
}

}  // namespace susched
