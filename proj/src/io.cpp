#include "morasim/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace morasim {

using nlohmann::json;

namespace {

// A JSON node plus the path that led to it, for error messages.
struct Node {
    const json& value;
    std::string source;
    std::string path;

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError(source + ": " + (path.empty() ? "<root>" : path) + ": " + what);
    }

    Node operator[](std::size_t i) const { return {value[i], source, path + "[" + std::to_string(i) + "]"}; }

    [[nodiscard]] bool has(const char* key) const { return value.contains(key) && !value.at(key).is_null(); }

    Node at(const char* key) const {
        if (!value.is_object()) fail("expected an object");
        if (!value.contains(key)) fail(std::string("missing field '") + key + "'");
        return {value.at(key), source, path.empty() ? key : path + "." + key};
    }

    const json& array() const {
        if (!value.is_array()) fail("expected an array");
        return value;
    }

    Rational rational() const {
        try {
            if (value.is_string()) return Rational::parse(value.get<std::string>());
            if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
            if (value.is_number()) return Rational::parse(value.dump());
        } catch (const std::exception& e) {
            fail(e.what());
        }
        fail("expected a number or a decimal string, got " + value.dump());
    }

    std::int64_t integer() const {
        if (value.is_number_integer()) return value.get<std::int64_t>();
        if (value.is_string()) {
            try {
                Rational r = Rational::parse(value.get<std::string>());
                if (r.is_integer() && !r.is_big()) return r.numerator().convert_to<std::int64_t>();
            } catch (const std::exception&) {
            }
        }
        fail("expected an integer, got " + value.dump());
    }

    std::string string() const {
        if (!value.is_string()) fail("expected a string, got " + value.dump());
        return value.get<std::string>();
    }
};

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
    }
}

std::string str(const Rational& r) { return r.str(); }

json job_fields(const JobId& id) { return {{"task", id.task}, {"job", id.index}}; }

JobId read_job(const Node& n) { return {static_cast<TaskId>(n.at("task").integer()), n.at("job").integer()}; }

json interval_json(const Interval& iv) {
    return {{"proc", iv.proc + 1}, {"task", iv.job.task}, {"job", iv.job.index}, {"speed", str(iv.speed)},
            {"start", str(iv.start)}, {"end", str(iv.end)}};
}

ProcId read_proc(const Node& n, std::size_t processors) {
    const std::int64_t p = n.integer();
    if (p < 1 || static_cast<std::size_t>(p) > processors)
        n.fail("processor " + std::to_string(p) + " outside 1.." + std::to_string(processors));
    return static_cast<ProcId>(p - 1);
}

Interval read_interval(const Node& n, std::size_t processors) {
    Interval iv;
    iv.proc = read_proc(n.at("proc"), processors);
    iv.job = read_job(n);
    iv.speed = n.at("speed").rational();
    iv.start = n.at("start").rational();
    iv.end = n.at("end").rational();
    if (iv.end < iv.start) n.fail("interval ends before it starts");
    return iv;
}

InvariantKind parse_invariant(const Node& n) {
    const std::string s = n.string();
    for (auto k : {InvariantKind::RemainingWithinOffline, InvariantKind::OfflineRunningActualWaiting,
                   InvariantKind::Rule2WhileOfflineRunning, InvariantKind::ProgressConservation,
                   InvariantKind::DeadlineMiss})
        if (to_string(k) == s) return k;
    n.fail("unknown invariant '" + s + "'");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path.string() + ": cannot write file");
    out << content;
    if (!out) throw Error(path.string() + ": write failed");
}

ProcessorModel parse_model(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    Node root{doc, source, ""};
    std::string name = root.has("name") ? root.at("name").string() : "custom";
    std::vector<SpeedLevel> levels;
    Node list = root.at("levels");
    for (std::size_t i = 0; i < list.array().size(); ++i) {
        Node l = list[i];
        SpeedLevel level;
        level.frequency_mhz = l.has("freq") ? l.at("freq").rational() : Rational(0);
        level.speed = l.at("speed").rational();
        level.power_mw = l.at("power_mw").rational();
        levels.push_back(std::move(level));
    }
    const Rational f_max = root.has("f_max") ? root.at("f_max").rational() : Rational(0);
    const Power idle = root.at("idle_power_mw").rational();
    try {
        return {std::move(name), f_max, std::move(levels), idle};
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(source + ": " + e.what());
    }
}

ProcessorModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }

std::string model_to_json(const ProcessorModel& model) {
    json levels = json::array();
    for (const auto& l : model.levels())
        levels.push_back({{"freq", str(l.frequency_mhz)}, {"speed", str(l.speed)}, {"power_mw", str(l.power_mw)}});
    json doc = {{"name", model.name()},
                {"f_max", str(model.f_max_mhz())},
                {"levels", levels},
                {"idle_power_mw", str(model.idle_power())}};
    return doc.dump(2) + "\n";
}

TaskSet parse_taskset(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    Node root{doc, source, ""};
    TaskSet tasks;
    for (std::size_t i = 0; i < root.array().size(); ++i) {
        Node n = root[i];
        Task t;
        t.id = static_cast<TaskId>(n.at("id").integer());
        t.wcet = n.at("C").rational();
        t.deadline = n.at("D").rational();
        t.period = n.at("T").rational();
        if (n.has("e")) t.energy_factor = n.at("e").rational();
        try {
            validate_task(t);
        } catch (const Error& e) {
            n.fail(e.what());
        }
        tasks.push_back(std::move(t));
    }
    try {
        validate_taskset(tasks);
    } catch (const Error& e) {
        throw InputError(source + ": " + e.what());
    }
    return tasks;
}

TaskSet load_taskset(const std::filesystem::path& path) { return parse_taskset(read_file(path), path.string()); }

std::string taskset_to_json(std::span<const Task> tasks) {
    json doc = json::array();
    for (const auto& t : tasks)
        doc.push_back({{"id", t.id},
                       {"C", t.wcet.decimal(3)},
                       {"D", t.deadline.decimal(3)},
                       {"T", t.period.decimal(3)},
                       {"e", t.energy_factor.decimal(3)}});
    // decimal(3) is exact for generated sets; fall back to fractions otherwise
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        auto exact = [](const Rational& r, const char* key, json& row) {
            if (Rational::parse(row[key].get<std::string>()) != r) row[key] = r.str();
        };
        exact(t.wcet, "C", doc[i]);
        exact(t.deadline, "D", doc[i]);
        exact(t.period, "T", doc[i]);
        exact(t.energy_factor, "e", doc[i]);
    }
    return doc.dump(2) + "\n";
}

std::vector<JobRelease> parse_actual_times(const std::string& text, std::span<const Task> tasks, const Time& horizon,
                                           const std::string& source) {
    const json doc = parse_json(text, source);
    Node root{doc, source, ""};
    std::map<JobId, JobRelease> releases;
    for (const auto& task : tasks) {
        std::int64_t index = 1;
        for (Time a = 0; a < horizon; a += task.period) {
            JobId id{task.id, index++};
            releases.emplace(id, JobRelease{id, a, task.wcet});
        }
    }
    Node jobs = root.at("jobs");
    for (std::size_t i = 0; i < jobs.array().size(); ++i) {
        Node n = jobs[i];
        const JobId id = read_job(n);
        const Task* task = nullptr;
        for (const auto& t : tasks)
            if (t.id == id.task) task = &t;
        if (!task) n.fail("unknown task " + std::to_string(id.task));
        if (id.index < 1) n.fail("job indices start at 1");
        const Work actual = n.at("actual").rational();
        if (actual.sign() <= 0 || task->wcet < actual)
            n.fail("actual time " + actual.str() + " outside (0, " + task->wcet.str() + "]");
        auto it = releases.find(id);
        if (n.has("arrival")) {
            const Time arrival = n.at("arrival").rational();
            if (arrival.sign() < 0) n.fail("negative arrival");
            releases[id] = JobRelease{id, arrival, actual};
        } else if (it != releases.end()) {
            it->second.actual_exec = actual;
        } else {
            n.fail(to_string(id) + " is not released before the horizon; give an explicit arrival");
        }
    }
    std::vector<JobRelease> out;
    out.reserve(releases.size());
    for (auto& [id, r] : releases) out.push_back(std::move(r));
    return out;
}

std::vector<JobRelease> load_actual_times(const std::filesystem::path& path, std::span<const Task> tasks,
                                          const Time& horizon) {
    return parse_actual_times(read_file(path), tasks, horizon, path.string());
}

std::string actual_times_to_json(std::span<const JobRelease> releases) {
    json jobs = json::array();
    for (const auto& r : releases) {
        json row = job_fields(r.id);
        row["arrival"] = str(r.arrival);
        row["actual"] = str(r.actual_exec);
        jobs.push_back(std::move(row));
    }
    return json{{"jobs", jobs}}.dump(2) + "\n";
}

std::string energy_to_json(const EnergyReport& report) {
    auto both = [](const Rational& r) { return json{{"exact", str(r)}, {"decimal", r.decimal(6)}}; };
    json procs = json::array();
    for (std::size_t p = 0; p < report.processors.size(); ++p) {
        const auto& pe = report.processors[p];
        procs.push_back({{"proc", p + 1},
                         {"busy_time", str(pe.busy_time)},
                         {"busy", both(pe.busy)},
                         {"idle", both(pe.idle)},
                         {"total", both(pe.total)}});
    }
    json doc = {{"unit", "uJ"}, {"total", both(report.total)}, {"busy", both(report.busy)},
                {"idle", both(report.idle)}, {"processors", procs}};
    if (report.normalized_pct) doc["normalized_pct"] = both(*report.normalized_pct);
    return doc.dump(2) + "\n";
}

std::string trace_to_json(const SimTrace& trace, const EnergyReport* energy) {
    json intervals = json::array();
    for (const auto& iv : trace.intervals) intervals.push_back(interval_json(iv));
    json offline = json::array();
    for (const auto& iv : trace.offline_intervals) offline.push_back(interval_json(iv));

    json events = json::array();
    for (const auto& ev : trace.events) {
        json e = {{"time", str(ev.time)}, {"kind", to_string(ev.kind)}};
        if (ev.job) {
            e["task"] = ev.job->task;
            e["job"] = ev.job->index;
        }
        if (ev.proc) e["proc"] = *ev.proc + 1;
        if (ev.old_speed) e["old_speed"] = str(*ev.old_speed);
        if (ev.new_speed) e["new_speed"] = str(*ev.new_speed);
        if (ev.deadline_met) e["deadline_met"] = *ev.deadline_met;
        if (ev.kind == EventKind::Rule2) {
            json cands = json::array();
            for (const auto& c : ev.candidates) {
                json row = job_fields(c.job);
                if (c.window) {
                    row["window"] = str(*c.window);
                    row["reclaim_speed"] = str(c.reclaim_speed);
                    row["deferred_speed"] = str(c.deferred_speed);
                    row["saving"] = str(c.saving);
                }
                cands.push_back(std::move(row));
            }
            e["candidates"] = std::move(cands);
        }
        events.push_back(std::move(e));
    }

    json jobs = json::array();
    for (const auto& j : trace.jobs) {
        json row = job_fields(j.id);
        row["arrival"] = str(j.arrival);
        row["deadline"] = str(j.deadline);
        row["actual"] = str(j.actual_exec);
        row["completion"] = j.completion ? json(str(*j.completion)) : json(nullptr);
        jobs.push_back(std::move(row));
    }

    json violations = json::array();
    for (const auto& v : trace.violations) {
        json row = job_fields(v.job);
        row["kind"] = to_string(v.kind);
        row["time"] = str(v.time);
        row["detail"] = v.detail;
        violations.push_back(std::move(row));
    }

    json doc = {{"processors", trace.processors}, {"horizon", str(trace.horizon)},
                {"policy", trace.policy},         {"intervals", intervals},
                {"offline_intervals", offline},   {"events", events},
                {"jobs", jobs},                   {"violations", violations},
                {"warnings", trace.warnings}};
    if (energy) doc["energy"] = json::parse(energy_to_json(*energy));
    return doc.dump(1) + "\n";
}

SimTrace parse_trace(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    Node root{doc, source, ""};
    SimTrace trace;
    const std::int64_t m = root.at("processors").integer();
    if (m < 1) root.at("processors").fail("need at least one processor");
    trace.processors = static_cast<std::size_t>(m);
    trace.horizon = root.at("horizon").rational();
    if (root.has("policy")) trace.policy = root.at("policy").string();

    Node ivs = root.at("intervals");
    for (std::size_t i = 0; i < ivs.array().size(); ++i) trace.intervals.push_back(read_interval(ivs[i], trace.processors));
    if (root.has("offline_intervals")) {
        Node off = root.at("offline_intervals");
        for (std::size_t i = 0; i < off.array().size(); ++i)
            trace.offline_intervals.push_back(read_interval(off[i], trace.processors));
    }
    if (root.has("events")) {
        Node evs = root.at("events");
        for (std::size_t i = 0; i < evs.array().size(); ++i) {
            Node n = evs[i];
            TraceEvent ev;
            ev.time = n.at("time").rational();
            try {
                ev.kind = parse_event_kind(n.at("kind").string());
            } catch (const InputError&) {
                throw;
            } catch (const Error& e) {
                n.fail(e.what());
            }
            if (n.has("task")) ev.job = read_job(n);
            if (n.has("proc")) ev.proc = read_proc(n.at("proc"), trace.processors);
            if (n.has("old_speed")) ev.old_speed = n.at("old_speed").rational();
            if (n.has("new_speed")) ev.new_speed = n.at("new_speed").rational();
            if (n.has("deadline_met")) {
                Node d = n.at("deadline_met");
                if (!d.value.is_boolean()) d.fail("expected true or false");
                ev.deadline_met = d.value.get<bool>();
            }
            if (n.has("candidates")) {
                Node cs = n.at("candidates");
                for (std::size_t k = 0; k < cs.array().size(); ++k) {
                    Node c = cs[k];
                    Rule2Evaluation r{read_job(c), std::nullopt, {}, {}, {}};
                    if (c.has("window")) {
                        r.window = c.at("window").rational();
                        r.reclaim_speed = c.at("reclaim_speed").rational();
                        r.deferred_speed = c.at("deferred_speed").rational();
                        r.saving = c.at("saving").rational();
                    }
                    ev.candidates.push_back(std::move(r));
                }
            }
            trace.events.push_back(std::move(ev));
        }
    }
    if (root.has("jobs")) {
        Node js = root.at("jobs");
        for (std::size_t i = 0; i < js.array().size(); ++i) {
            Node n = js[i];
            JobOutcome o;
            o.id = read_job(n);
            o.arrival = n.at("arrival").rational();
            o.deadline = n.at("deadline").rational();
            o.actual_exec = n.at("actual").rational();
            if (n.has("completion")) o.completion = n.at("completion").rational();
            trace.jobs.push_back(std::move(o));
        }
    }
    if (root.has("violations")) {
        Node vs = root.at("violations");
        for (std::size_t i = 0; i < vs.array().size(); ++i) {
            Node n = vs[i];
            trace.violations.push_back(
                {parse_invariant(n.at("kind")), n.at("time").rational(), read_job(n), n.at("detail").string()});
        }
    }
    if (root.has("warnings")) {
        Node ws = root.at("warnings");
        for (std::size_t i = 0; i < ws.array().size(); ++i) trace.warnings.push_back(ws[i].string());
    }
    return trace;
}

SimTrace load_trace(const std::filesystem::path& path) { return parse_trace(read_file(path), path.string()); }

std::string trace_to_csv(const SimTrace& trace) {
    std::vector<Interval> rows = trace.intervals;
    std::stable_sort(rows.begin(), rows.end(), [](const Interval& a, const Interval& b) {
        if (a.proc != b.proc) return a.proc < b.proc;
        return a.start < b.start;
    });
    std::ostringstream out;
    out << "proc,task,job,speed_num,speed_den,start,end\n";
    for (const auto& iv : rows)
        out << iv.proc + 1 << ',' << iv.job.task << ',' << iv.job.index << ',' << iv.speed.numerator() << ','
            << iv.speed.denominator() << ',' << iv.start << ',' << iv.end << '\n';
    return out.str();
}

}  // namespace morasim
