#include "crashsched/core.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace crashsched {

AdversaryEvent AdversaryEvent::make_inject(TimePoint t, TaskSpec task) {
    AdversaryEvent e;
    e.time = t;
    e.kind = EventKind::Inject;
    e.task = std::move(task);
    return e;
}

AdversaryEvent AdversaryEvent::make_crash(TimePoint t, int proc) {
    AdversaryEvent e;
    e.time = t;
    e.kind = EventKind::Crash;
    e.proc = proc;
    return e;
}

AdversaryEvent AdversaryEvent::make_restart(TimePoint t, int proc) {
    AdversaryEvent e;
    e.time = t;
    e.kind = EventKind::Restart;
    e.proc = proc;
    return e;
}

std::vector<TaskSpec> AdversarialPattern::tasks() const {
    std::vector<TaskSpec> out;
    for (const auto& e : events)
        if (e.kind == EventKind::Inject) out.push_back(e.task);
    return out;
}

std::map<std::int64_t, TaskSpec> AdversarialPattern::task_map() const {
    std::map<std::int64_t, TaskSpec> out;
    for (const auto& e : events)
        if (e.kind == EventKind::Inject) out.emplace(e.task.id, e.task);
    return out;
}

std::int64_t AdversarialPattern::total_cost() const {
    std::int64_t sum = 0;
    for (const auto& e : events)
        if (e.kind == EventKind::Inject) sum += e.task.cost;
    return sum;
}

std::optional<TimePoint> AdversarialPattern::last_event_time() const {
    if (events.empty()) return std::nullopt;
    TimePoint last = events.front().time;
    for (const auto& e : events) last = max(last, e.time);
    return last;
}

std::vector<std::string> validate_pattern(const AdversarialPattern& pattern) {
    std::vector<std::string> out;
    const auto& p = pattern.params;
    if (p.n < 1) out.push_back("params: n must be at least 1");
    if (p.lmin < 1) out.push_back("params: lmin must be at least 1");
    if (p.lmin > p.lmax) out.push_back("params: lmin exceeds lmax");
    if (p.beta < 1) out.push_back("params: beta must be at least 1");
    if (p.speedup < Rational(1)) out.push_back("params: speedup below 1");

    bool sorted = true;
    for (std::size_t i = 1; i < pattern.events.size(); ++i) {
        if (pattern.events[i].time < pattern.events[i - 1].time) {
            out.push_back("events not sorted by time at index " + std::to_string(i));
            sorted = false;
        }
    }

    std::set<std::int64_t> ids;
    for (const auto& e : pattern.events) {
        if (e.time < TimePoint(0))
            out.push_back("event at negative time t=" + e.time.str());
        if (e.kind == EventKind::Inject) {
            if (e.task.id < 1)
                out.push_back("task id " + std::to_string(e.task.id) + " must be at least 1");
            else if (!ids.insert(e.task.id).second)
                out.push_back("duplicate task id " + std::to_string(e.task.id) + " at t=" + e.time.str());
            if (e.task.cost < p.lmin || e.task.cost > p.lmax)
                out.push_back("task " + std::to_string(e.task.id) + " cost " + std::to_string(e.task.cost) +
                              " outside [" + std::to_string(p.lmin) + ", " + std::to_string(p.lmax) + "]");
            if (e.task.arrival != e.time)
                out.push_back("task " + std::to_string(e.task.id) + " arrival " + e.task.arrival.str() +
                              " differs from inject time " + e.time.str());
        } else {
            if (e.proc < 1 || e.proc > p.n)
                out.push_back("processor id " + std::to_string(e.proc) + " out of range [1, " +
                              std::to_string(p.n) + "] at t=" + e.time.str());
        }
    }

    // Crash/restart state machine, evaluated in processing order. Only
    // meaningful when event times are sorted and processor ids are in range.
    if (sorted && p.n >= 1) {
        std::vector<bool> alive(static_cast<std::size_t>(p.n) + 1, true);
        std::size_t i = 0;
        while (i < pattern.events.size()) {
            std::size_t j = i;
            while (j < pattern.events.size() && pattern.events[j].time == pattern.events[i].time) ++j;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t k = i; k < j; ++k) {
                    const auto& e = pattern.events[k];
                    if (e.proc < 1 || e.proc > p.n) continue;
                    if (pass == 0 && e.kind == EventKind::Crash) {
                        if (!alive[static_cast<std::size_t>(e.proc)])
                            out.push_back("crash of already-crashed processor " + std::to_string(e.proc) +
                                          " at t=" + e.time.str());
                        alive[static_cast<std::size_t>(e.proc)] = false;
                    } else if (pass == 1 && e.kind == EventKind::Restart) {
                        if (alive[static_cast<std::size_t>(e.proc)])
                            out.push_back("restart of alive processor " + std::to_string(e.proc) +
                                          " at t=" + e.time.str());
                        alive[static_cast<std::size_t>(e.proc)] = true;
                    }
                }
            }
            i = j;
        }
    }
    return out;
}

const char* trace_event_name(TraceEventKind kind) {
    switch (kind) {
        case TraceEventKind::Inject: return "inject";
        case TraceEventKind::Crash: return "crash";
        case TraceEventKind::Restart: return "restart";
        case TraceEventKind::Inform: return "inform";
        case TraceEventKind::Start: return "start";
        case TraceEventKind::Sample: return "sample";
    }
    throw internal_error("unknown trace event kind");
}

std::int64_t RunTrace::pending_tasks_at(const TimePoint& t) const {
    std::int64_t value = 0;
    for (const auto& s : samples) {
        if (s.time > t) break;
        value = s.pendingTasks;
    }
    return value;
}

std::int64_t RunTrace::pending_cost_at(const TimePoint& t) const {
    std::int64_t value = 0;
    for (const auto& s : samples) {
        if (s.time > t) break;
        value = s.pendingCost;
    }
    return value;
}

std::vector<TimePoint> RunTrace::instants() const {
    std::vector<TimePoint> out;
    for (const auto& s : samples)
        if (out.empty() || !(out.back() == s.time)) out.push_back(s.time);
    return out;
}

namespace {

using nlohmann::ordered_json;

Rational rational_from_json(const nlohmann::json& v, const char* what) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    throw validation_error(std::string(what) + " must be an integer or a \"num/den\" string");
}

} // namespace

AdversarialPattern pattern_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("pattern is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("params") || !j.contains("events"))
        throw validation_error("pattern JSON needs \"params\" and \"events\"");

    AdversarialPattern out;
    const auto& params = j.at("params");
    out.params.n = params.at("n").get<int>();
    out.params.speedup = rational_from_json(params.at("speedup"), "speedup");
    out.params.lmin = params.at("lmin").get<std::int64_t>();
    out.params.lmax = params.at("lmax").get<std::int64_t>();
    out.params.beta = params.at("beta").get<std::int64_t>();

    for (const auto& ej : j.at("events")) {
        TimePoint t = rational_from_json(ej.at("t"), "event time");
        std::string kind = ej.at("kind").get<std::string>();
        if (kind == "inject") {
            TaskSpec task;
            task.id = ej.at("task").at("id").get<std::int64_t>();
            task.cost = ej.at("task").at("cost").get<std::int64_t>();
            task.arrival = t;
            out.events.push_back(AdversaryEvent::make_inject(t, task));
        } else if (kind == "crash") {
            out.events.push_back(AdversaryEvent::make_crash(t, ej.at("proc").get<int>()));
        } else if (kind == "restart") {
            out.events.push_back(AdversaryEvent::make_restart(t, ej.at("proc").get<int>()));
        } else {
            throw validation_error("unknown event kind \"" + kind + "\"");
        }
    }
    return out;
}

std::string pattern_to_json(const AdversarialPattern& pattern) {
    ordered_json j;
    j["params"] = {{"n", pattern.params.n},
                   {"speedup", pattern.params.speedup.str()},
                   {"lmin", pattern.params.lmin},
                   {"lmax", pattern.params.lmax},
                   {"beta", pattern.params.beta}};
    j["events"] = ordered_json::array();
    for (const auto& e : pattern.events) {
        ordered_json ej;
        ej["t"] = e.time.str();
        switch (e.kind) {
            case EventKind::Inject:
                ej["kind"] = "inject";
                ej["task"] = {{"id", e.task.id}, {"cost", e.task.cost}};
                break;
            case EventKind::Crash:
                ej["kind"] = "crash";
                ej["proc"] = e.proc;
                break;
            case EventKind::Restart:
                ej["kind"] = "restart";
                ej["proc"] = e.proc;
                break;
        }
        j["events"].push_back(std::move(ej));
    }
    return j.dump(2) + "\n";
}

AdversarialPattern load_pattern(const std::string& path) {
    return pattern_from_json(read_file(path));
}

void save_pattern(const AdversarialPattern& pattern, const std::string& path) {
    write_file(path, pattern_to_json(pattern));
}

std::string trace_to_csv(const RunTrace& trace) {
    std::ostringstream out;
    out << "time,event,proc,task,pending_tasks,pending_cost\n";
    for (const auto& s : trace.samples) {
        out << s.time.str() << ',' << trace_event_name(s.kind) << ',';
        if (s.proc >= 0) out << s.proc;
        out << ',';
        if (s.task >= 0) out << s.task;
        out << ',' << s.pendingTasks << ',' << s.pendingCost << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("cannot write file: " + path);
    out << content;
    if (!out) throw validation_error("write failed: " + path);
}

} // namespace crashsched
