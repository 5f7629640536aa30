#include "susched/task_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace susched {

using nlohmann::json;

TaskSpec TaskSpec::read_write(int id, Tick read, Tick compute, Tick write, Tick period) {
    TaskSpec t;
    t.id = id;
    t.kind = TaskKind::ReadWrite;
    t.read = read;
    t.compute = compute;
    t.write = write;
    t.period = period;
    return t;
}

TaskSpec TaskSpec::write_only(int id, Tick compute1, Tick write, Tick compute2, Tick period) {
    TaskSpec t;
    t.id = id;
    t.kind = TaskKind::WriteOnly;
    t.compute1 = compute1;
    t.write = write;
    t.compute2 = compute2;
    t.period = period;
    return t;
}

Tick TaskSpec::total_compute() const {
    return kind == TaskKind::ReadWrite ? compute : compute1 + compute2;
}

Tick TaskSpec::total_suspend() const {
    return kind == TaskKind::ReadWrite ? read + write : write;
}

std::optional<ValidationError> validate_task(const TaskSpec& t) {
    auto fail = [&](ValidationCode code, const std::string& msg) {
        return ValidationError{code, t.id, "task " + std::to_string(t.id) + ": " + msg};
    };
    if (t.period < 1)
        return fail(ValidationCode::NonPositivePeriod, "period must be >= 1");
    const Tick phases[] = {t.read, t.compute, t.compute1, t.compute2, t.write};
    for (Tick p : phases)
        if (p < 0)
            return fail(ValidationCode::NegativePhase, "phase lengths must be >= 0");
    if (t.kind == TaskKind::WriteOnly && t.compute1 == 0)
        return fail(ValidationCode::ZeroFirstCompute,
                    "write-only task needs a non-empty first computing phase");
    const Rational load = ratio(t.total_compute() + t.total_suspend(), t.period);
    if (load > 1)
        return fail(ValidationCode::UtilizationOverflow,
                    "U + V = " + to_string(load) + " exceeds 1");
    return std::nullopt;
}

DerivedParams derived_params(const TaskSpec& t) {
    DerivedParams d;
    d.utilization = ratio(t.total_compute(), t.period);
    d.suspension_ratio = ratio(t.total_suspend(), t.period);
    d.z = d.utilization + d.suspension_ratio;
    if (t.kind == TaskKind::WriteOnly)
        d.delta = ratio(t.write, t.compute1);
    return d;
}

Rational TaskSystem::u_sum() const {
    Rational s = 0;
    for (const auto& t : tasks)
        s += derived_params(t).utilization;
    return s;
}

Rational TaskSystem::v_sum() const {
    Rational s = 0;
    for (const auto& t : tasks)
        s += derived_params(t).suspension_ratio;
    return s;
}

Rational TaskSystem::u_max() const {
    Rational mx = 0;
    for (const auto& t : tasks)
        mx = std::max(mx, derived_params(t).utilization);
    return mx;
}

Rational TaskSystem::z_max() const {
    Rational mx = 0;
    for (const auto& t : tasks)
        mx = std::max(mx, derived_params(t).z);
    return mx;
}

std::optional<ValidationError> validate_system(const TaskSystem& s) {
    if (s.processors < 1)
        return ValidationError{ValidationCode::NonPositiveProcessors, -1,
                               "processor count must be >= 1"};
    if (s.tasks.empty())
        return ValidationError{ValidationCode::EmptySystem, -1,
                               "a task system needs at least one task"};
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        if (s.tasks[i].id != static_cast<int>(i))
            return ValidationError{ValidationCode::BadTaskId, s.tasks[i].id,
                                   "task ids must equal their list position"};
        if (auto err = validate_task(s.tasks[i]))
            return err;
    }
    return std::nullopt;
}

namespace {

json phases_json(const TaskSpec& t) {
    json p;
    if (t.kind == TaskKind::ReadWrite) {
        p["R"] = t.read;
        p["C"] = t.compute;
        p["W"] = t.write;
    } else {
        p["C1"] = t.compute1;
        p["W"] = t.write;
        p["C2"] = t.compute2;
    }
    return p;
}

Tick tick_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ParseError(ParseCode::Syntax,
                         std::string("missing or non-integer field '") + key + "'");
    return j[key].get<Tick>();
}

TaskSpec task_from_json(const json& j) {
    if (!j.is_object())
        throw ParseError(ParseCode::Syntax, "task entry is not an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError(ParseCode::Syntax, "task entry lacks a 'kind' string");
    const std::string kind = j["kind"].get<std::string>();
    const int id = static_cast<int>(tick_field(j, "id"));
    const Tick period = tick_field(j, "T");
    if (!j.contains("phases") || !j["phases"].is_object())
        throw ParseError(ParseCode::Syntax, "task entry lacks a 'phases' object");
    const json& p = j["phases"];
    if (kind == "read_write")
        return TaskSpec::read_write(id, tick_field(p, "R"), tick_field(p, "C"),
                                    tick_field(p, "W"), period);
    if (kind == "write_only")
        return TaskSpec::write_only(id, tick_field(p, "C1"), tick_field(p, "W"),
                                    tick_field(p, "C2"), period);
    throw ParseError(ParseCode::Syntax, "unknown task kind '" + kind + "'");
}

}  // namespace

TaskSystem parse_task_system(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(ParseCode::Syntax, e.what());
    }
    if (!doc.is_object())
        throw ParseError(ParseCode::Syntax, "top-level document must be an object");
    TaskSystem s;
    s.processors = static_cast<int>(tick_field(doc, "m"));
    if (doc.contains("tick_unit")) {
        if (!doc["tick_unit"].is_string())
            throw ParseError(ParseCode::Syntax, "'tick_unit' must be a string");
        s.tick_unit = doc["tick_unit"].get<std::string>();
    }
    if (!doc.contains("tasks") || !doc["tasks"].is_array())
        throw ParseError(ParseCode::Syntax, "'tasks' must be an array");
    for (const auto& tj : doc["tasks"])
        s.tasks.push_back(task_from_json(tj));

    std::vector<int> ids;
    for (const auto& t : s.tasks)
        ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw ParseError(ParseCode::DuplicateId, "duplicate task id");
    std::sort(s.tasks.begin(), s.tasks.end(),
              [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });

    if (auto err = validate_system(s))
        throw ParseError(ParseCode::Validation, err->message);
    return s;
}

std::string serialize_task_system(const TaskSystem& s) {
    json doc;
    doc["m"] = s.processors;
    doc["tick_unit"] = s.tick_unit;
    doc["tasks"] = json::array();
    std::vector<TaskSpec> ordered = s.tasks;
    std::sort(ordered.begin(), ordered.end(),
              [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });
    for (const auto& t : ordered) {
        json tj;
        tj["id"] = t.id;
        tj["kind"] = t.kind == TaskKind::ReadWrite ? "read_write" : "write_only";
        tj["T"] = t.period;
        tj["phases"] = phases_json(t);
        doc["tasks"].push_back(tj);
    }
    return doc.dump(2) + "\n";
}

TaskSystem load_task_system(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseCode::Syntax, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_task_system(buf.str());
}

void store_task_system(const TaskSystem& s, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << serialize_task_system(s);
}

Tick hyperperiod(const TaskSystem& s) {
    BigInt h = 1;
    for (const auto& t : s.tasks)
        h = lcm(h, BigInt(static_cast<long>(t.period)));
    return to_tick(h);
}

}  // namespace susched
