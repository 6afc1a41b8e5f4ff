#include "search/trace_io.hpp"

#include <optional>
#include <string>

#include "common/error.hpp"

namespace restopath::search {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<ViolationKind> violation_from_string(std::string_view s) {
    for (auto k : {ViolationKind::depth, ViolationKind::reactive, ViolationKind::voltage,
                   ViolationKind::divergence, ViolationKind::non_tree})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::optional<Termination> termination_from_string(std::string_view s) {
    for (auto t : {Termination::found_m_s, Termination::infeasible, Termination::node_limit,
                   Termination::cancelled})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ParseError("field '" + path + "': " + what);
}

} // namespace

ordered_json scheme_to_json(const Scheme& s) {
    ordered_json j;
    j["lines"] = s.lines;
    j["objective_mvar"] = s.objective_mvar;
    ordered_json flows = ordered_json::array();
    for (const auto& [id, f] : s.flows) flows.push_back({{"branch", id}, {"flow", f}});
    j["flows"] = flows;
    ordered_json depths = ordered_json::array();
    for (const auto& [t, d] : s.depth_per_target) depths.push_back({{"target", t}, {"depth", d}});
    j["depth_per_target"] = depths;
    j["max_depth"] = s.max_depth;
    j["valid"] = s.valid;
    ordered_json viol = ordered_json::array();
    for (const auto& v : s.violations)
        viol.push_back({{"kind", std::string(to_string(v.kind))}, {"detail", v.detail}});
    j["violations"] = viol;
    return j;
}

ordered_json trace_to_json(const SearchTrace& t) {
    ordered_json j;
    ordered_json schemes = ordered_json::array();
    for (const auto& s : t.schemes) schemes.push_back(scheme_to_json(s));
    j["schemes"] = schemes;
    j["iterations"] = t.iterations;
    j["terminated_by"] = std::string(to_string(t.terminated_by));
    j["warnings"] = t.warnings;
    return j;
}

SearchTrace trace_from_json(const json& doc) {
    const json& j = doc.contains("trace") ? doc["trace"] : doc;
    if (!j.is_object()) bad("trace", "expected an object");
    if (!j.contains("schemes") || !j["schemes"].is_array()) bad("schemes", "expected an array");
    SearchTrace t;
    try {
        for (std::size_t i = 0; i < j["schemes"].size(); ++i) {
            const json& sj = j["schemes"][i];
            const std::string path = "schemes[" + std::to_string(i) + "].";
            if (!sj.is_object()) bad(path, "expected an object");
            Scheme s;
            if (!sj.contains("lines") || !sj["lines"].is_array()) bad(path + "lines", "expected an array");
            s.lines = sj["lines"].get<std::vector<int>>();
            s.objective_mvar = sj.value("objective_mvar", 0.0);
            s.solver_objective = s.objective_mvar;
            if (sj.contains("flows"))
                for (const auto& f : sj["flows"]) s.flows[f.at("branch").get<int>()] = f.at("flow").get<double>();
            if (sj.contains("depth_per_target"))
                for (const auto& d : sj["depth_per_target"])
                    s.depth_per_target[d.at("target").get<int>()] = d.at("depth").get<int>();
            s.max_depth = sj.value("max_depth", 0);
            s.valid = sj.value("valid", true);
            if (sj.contains("violations")) {
                for (const auto& v : sj["violations"]) {
                    const auto kind = violation_from_string(v.at("kind").get<std::string>());
                    if (!kind) bad(path + "violations", "unknown kind");
                    s.violations.push_back({*kind, v.value("detail", std::string{})});
                }
            }
            t.schemes.push_back(std::move(s));
        }
        t.iterations = j.value("iterations", static_cast<int>(t.schemes.size()));
        const auto term = termination_from_string(j.value("terminated_by", std::string("found_m_s")));
        if (!term) bad("terminated_by", "unknown value");
        t.terminated_by = *term;
        if (j.contains("warnings")) t.warnings = j["warnings"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed trace: ") + e.what());
    }
    return t;
}

SearchTrace parse_trace(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("trace is not valid JSON: ") + e.what());
    }
    return trace_from_json(doc);
}

} // namespace restopath::search
