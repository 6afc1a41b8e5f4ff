#include "session/events.hpp"

#include "common/error.hpp"
#include "search/search.hpp"

namespace restopath::session {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::line_failed: return "line_failed";
    case EventKind::line_repaired: return "line_repaired";
    case EventKind::scheme_committed: return "scheme_committed";
    case EventKind::targets_changed: return "targets_changed";
    }
    return "line_failed";
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ParseError("event field '" + field + "': " + what);
}

std::vector<int> int_list(const json& j, const char* field) {
    if (!j.contains(field)) bad(field, "missing");
    const json& v = j[field];
    if (!v.is_array()) bad(field, "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) bad(field, "expected an array of integers");
        out.push_back(x.get<int>());
    }
    return out;
}

} // namespace

RestorationEvent event_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("event must be a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) bad("kind", "missing or not a string");
    const auto kind = j["kind"].get<std::string>();
    RestorationEvent e;
    if (kind == "line_failed" || kind == "line_repaired") {
        e.kind = kind == "line_failed" ? EventKind::line_failed : EventKind::line_repaired;
        if (!j.contains("branch") || !j["branch"].is_number_integer()) bad("branch", "expected an integer");
        e.branch = j["branch"].get<int>();
    } else if (kind == "scheme_committed") {
        e.kind = EventKind::scheme_committed;
        e.lines = int_list(j, "lines");
        if (j.contains("targets")) {
            const auto t = int_list(j, "targets");
            e.targets = std::set<int>(t.begin(), t.end());
        }
    } else if (kind == "targets_changed") {
        e.kind = EventKind::targets_changed;
        const auto t = int_list(j, "targets");
        e.targets = std::set<int>(t.begin(), t.end());
    } else {
        bad("kind", "unknown event kind '" + kind + "'");
    }
    if (j.contains("timestamp")) {
        if (!j["timestamp"].is_string()) bad("timestamp", "expected a string");
        e.timestamp = j["timestamp"].get<std::string>();
    }
    return e;
}

ordered_json event_to_json(const RestorationEvent& e) {
    ordered_json j;
    j["kind"] = std::string(to_string(e.kind));
    switch (e.kind) {
    case EventKind::line_failed:
    case EventKind::line_repaired: j["branch"] = e.branch; break;
    case EventKind::scheme_committed:
        j["lines"] = e.lines;
        if (e.targets) j["targets"] = *e.targets;
        break;
    case EventKind::targets_changed: j["targets"] = e.targets.value_or(std::set<int>{}); break;
    }
    if (!e.timestamp.empty()) j["timestamp"] = e.timestamp;
    return j;
}

namespace {

const grid::Branch& existing_branch(const grid::Scenario& s, int id) {
    if (!s.network.has_branch(id)) throw ValidationError("unknown branch " + std::to_string(id));
    return s.network.branch(id);
}

void check_targets(const grid::Scenario& s, const std::set<int>& targets) {
    for (int t : targets) {
        if (!s.network.has_bus(t)) throw ValidationError("unknown target bus " + std::to_string(t));
        if (s.energized(t))
            throw ValidationError("target bus " + std::to_string(t) + " is already energized");
    }
}

} // namespace

grid::Scenario apply_event(const grid::Scenario& scenario, const RestorationEvent& e) {
    grid::Scenario s = scenario;
    switch (e.kind) {
    case EventKind::line_failed: {
        auto br = existing_branch(s, e.branch);
        if (br.status == grid::BranchStatus::virtual_line)
            throw ValidationError("branch " + std::to_string(e.branch) + " is virtual");
        br.status = grid::BranchStatus::failed;
        s.network = s.network.with_branch(br);
        s.state.failed_branches.insert(e.branch);
        break;
    }
    case EventKind::line_repaired: {
        auto br = existing_branch(s, e.branch);
        if (br.status != grid::BranchStatus::failed) return s;
        br.status = grid::BranchStatus::unenergized;
        s.network = s.network.with_branch(br);
        s.state.failed_branches.erase(e.branch);
        break;
    }
    case EventKind::scheme_committed: {
        if (e.lines.empty()) throw ValidationError("committed scheme has no lines");
        for (int id : e.lines) existing_branch(s, id);
        grid::Scenario check = s;
        if (e.targets) {
            check_targets(s, *e.targets);
            check.targets = *e.targets;
        }
        const auto scheme = search::make_scheme(check, e.lines);
        if (!scheme.valid) {
            std::string why;
            for (const auto& v : scheme.violations)
                why += (why.empty() ? "" : "; ") + std::string(search::to_string(v.kind)) + ": " + v.detail;
            throw ValidationError("scheme rejected (" + why + ")");
        }
        for (int id : scheme.lines) {
            auto br = s.network.branch(id);
            br.status = grid::BranchStatus::energized;
            s.network = s.network.with_branch(br);
            s.state.energized_buses.insert(br.from_bus);
            s.state.energized_buses.insert(br.to_bus);
        }
        std::erase_if(s.targets, [&](int t) { return s.energized(t); });
        break;
    }
    case EventKind::targets_changed:
        check_targets(s, e.targets.value_or(std::set<int>{}));
        s.targets = e.targets.value_or(std::set<int>{});
        break;
    }
    grid::validate(s);
    return s;
}

} // namespace restopath::session
