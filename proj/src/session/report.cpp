#include "session/report.hpp"

#include <cstdio>
#include <sstream>

#include "common/error.hpp"
#include "search/path_model.hpp"
#include "search/trace_io.hpp"

namespace restopath::session {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ParseError("request field '" + field + "': " + what);
}

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const json& v = j[key];
    if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) bad(key, "expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) bad(key, "expected true or false");
    } else {
        if (!v.is_number()) bad(key, "expected a number");
    }
    return v.get<T>();
}

} // namespace

SolveRequest request_from_json(const json& j) {
    if (j.is_null()) return {};
    if (!j.is_object()) throw ParseError("solve request must be a JSON object");
    SolveRequest r;
    if (j.contains("targets")) {
        if (!j["targets"].is_array()) bad("targets", "expected an array of bus ids");
        std::set<int> t;
        for (const auto& x : j["targets"]) {
            if (!x.is_number_integer()) bad("targets", "expected an array of bus ids");
            t.insert(x.get<int>());
        }
        r.targets = std::move(t);
    }
    r.max_schemes = opt_field<int>(j, "k");
    r.d_max = opt_field<int>(j, "dmax");
    r.k1 = opt_field<double>(j, "k1");
    r.lambda = opt_field<double>(j, "lambda");
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (!w.is_array() || w.size() != eval::kAttributes) bad("weights", "expected 5 numbers");
        eval::Weights ws{};
        for (int i = 0; i < eval::kAttributes; ++i) {
            if (!w[i].is_number()) bad("weights", "expected 5 numbers");
            ws[i] = w[i].get<double>();
        }
        r.weights = ws;
    }
    r.check_depth = opt_field<bool>(j, "check_depth").value_or(true);
    r.check_reactive = opt_field<bool>(j, "check_reactive").value_or(true);
    r.check_voltage = opt_field<bool>(j, "check_voltage").value_or(true);
    if (j.contains("node_limit")) {
        if (!j["node_limit"].is_number_integer()) bad("node_limit", "expected an integer");
        r.node_limit = j["node_limit"].get<long>();
    }
    return r;
}

grid::Scenario apply_request(const grid::Scenario& scenario, const SolveRequest& r) {
    grid::Scenario s = scenario;
    if (r.max_schemes) s.params.m_s = *r.max_schemes;
    if (r.d_max) s.params.d_max = *r.d_max;
    if (r.k1) s.params.k1 = *r.k1;
    if (r.lambda) s.params.lambda = *r.lambda;
    if (r.weights) s.params.weights = *r.weights;
    if (r.node_limit < 1) throw ValidationError("node_limit must be positive");
    if (r.targets) {
        for (int t : *r.targets)
            if (!s.network.has_bus(t)) throw ValidationError("unknown target bus " + std::to_string(t));
        s.targets = *r.targets;
    }
    grid::Scenario check = s;
    std::erase_if(check.targets, [&](int t) { return check.energized(t); });
    grid::validate(check);
    return s;
}

namespace {

search::SearchOptions options_for(const SolveRequest& r) {
    search::SearchOptions o;
    o.check_depth = r.check_depth;
    o.check_reactive = r.check_reactive;
    o.check_voltage = r.check_voltage;
    o.milp.node_limit = r.node_limit;
    return o;
}

ordered_json build_report(const grid::Scenario& s, const SolveRequest& r,
                          const search::SearchTrace& trace, const eval::RankingResult& ranking) {
    const grid::Scenario joined = grid::transform_islands(s);
    ordered_json rep;
    rep["supply_bus"] = s.supply_bus;
    rep["targets"] = s.targets;
    rep["params"] = {{"d_max", s.params.d_max},
                     {"k1", s.params.k1},
                     {"m_s", s.params.m_s},
                     {"lambda", s.params.lambda},
                     {"weights", std::vector<double>(s.params.weights.begin(), s.params.weights.end())},
                     {"alpha", s.params.alpha},
                     {"v_min", s.params.v_min},
                     {"v_max", s.params.v_max},
                     {"check_depth", r.check_depth},
                     {"check_reactive", r.check_reactive},
                     {"check_voltage", r.check_voltage}};
    rep["islands"] = grid::compute_islands(s);
    ordered_json virt = ordered_json::array();
    for (const auto& br : joined.network.branches())
        if (br.status == grid::BranchStatus::virtual_line)
            virt.push_back({{"id", br.id}, {"from_bus", br.from_bus}, {"to_bus", br.to_bus}});
    rep["virtual_branches"] = std::move(virt);
    rep["reactive_limit_mvar"] = grid::reactive_capability(joined);

    std::set<int> used;
    for (const auto& sc : trace.schemes) used.insert(sc.lines.begin(), sc.lines.end());
    ordered_json labels = ordered_json::object();
    for (int id : used) {
        const auto& br = s.network.branch(id);
        labels[std::to_string(id)] = std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
    }
    rep["line_labels"] = std::move(labels);
    rep["trace"] = search::trace_to_json(trace);
    rep["ranking"] = eval::ranking_to_json(ranking);
    rep["summary"] = {{"schemes", trace.schemes.size()},
                      {"valid", trace.valid_count()},
                      {"best_scheme", ranking.order.empty() ? json(nullptr) : json(ranking.order.front())},
                      {"terminated_by", std::string(search::to_string(trace.terminated_by))}};
    return rep;
}

} // namespace

SolveOutcome solve(const grid::Scenario& scenario, const SolveRequest& request, const ProgressFn& progress) {
    SolveOutcome out;
    out.effective = apply_request(scenario, request);
    auto opts = options_for(request);
    opts.on_scheme = progress;
    out.trace = search::iterate_schemes(out.effective, opts);
    out.ranking = eval::rank(out.trace.schemes, out.effective);
    out.report = build_report(out.effective, request, out.trace, out.ranking);
    return out;
}

SolveOutcome evaluate(const grid::Scenario& scenario, const search::SearchTrace& trace,
                      const SolveRequest& request) {
    SolveOutcome out;
    out.effective = apply_request(scenario, request);
    out.trace = trace;
    for (auto& sc : out.trace.schemes) {
        double q = 0.0;
        for (int id : sc.lines) {
            if (!out.effective.network.has_branch(id))
                throw ValidationError("trace names unknown branch " + std::to_string(id));
            q += out.effective.network.branch(id).charging_mvar;
        }
        sc.objective_mvar = q;
    }
    out.ranking = eval::rank(out.trace.schemes, out.effective);
    out.report = build_report(out.effective, request, out.trace, out.ranking);
    return out;
}

std::string export_lp(const grid::Scenario& scenario, const SolveRequest& request) {
    const auto s = grid::transform_islands(apply_request(scenario, request));
    return milp::to_lp_format(search::build_path_model(s).problem);
}

std::string dump_report(const ordered_json& report) { return report.dump(2) + "\n"; }

std::string report_table(const json& rep) {
    std::ostringstream os;
    char buf[256];
    const auto& schemes = rep.at("trace").at("schemes");
    const auto& rk = rep.at("ranking");
    std::map<int, const json*> rows;
    for (const auto& r : rk.at("rows")) rows[r.at("scheme").get<int>()] = &r;
    std::map<int, int> place;
    int pos = 0;
    for (const auto& n : rk.at("order")) place[n.get<int>()] = ++pos;
    const auto& labels = rep.at("line_labels");

    std::snprintf(buf, sizeof buf, "%-3s %9s %5s %-7s %3s %3s %8s %5s %5s\n", "#", "MVar", "depth",
                  "valid", "V1", "V2", "V3", "u", "rank");
    os << buf;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const auto& sc = schemes[i];
        const int n = static_cast<int>(i) + 1;
        const bool valid = sc.at("valid").get<bool>();
        if (rows.contains(n)) {
            const auto& r = *rows[n];
            const auto& v = r.at("indices");
            std::snprintf(buf, sizeof buf, "%-3d %9.2f %5d %-7s %3d %3d %8.5f %5.3f %5d", n,
                          sc.at("objective_mvar").get<double>(), sc.at("max_depth").get<int>(), "yes",
                          static_cast<int>(v.at("v1").get<double>()), static_cast<int>(v.at("v2").get<double>()),
                          v.at("v3").get<double>(), r.at("u").get<double>(), place[n]);
        } else {
            std::snprintf(buf, sizeof buf, "%-3d %9.2f %5d %-7s %3s %3s %8s %5s %5s", n,
                          sc.at("objective_mvar").get<double>(), sc.at("max_depth").get<int>(),
                          valid ? "yes" : "no", "-", "-", "-", "-", "-");
        }
        os << buf << "  ";
        bool first = true;
        for (const auto& l : sc.at("lines")) {
            const auto key = std::to_string(l.get<int>());
            os << (first ? "" : " ") << (labels.contains(key) ? labels[key].get<std::string>() : key);
            first = false;
        }
        for (const auto& v : sc.at("violations"))
            os << "  [" << v.at("kind").get<std::string>() << ": " << v.at("detail").get<std::string>() << "]";
        os << '\n';
    }
    const auto& sum = rep.at("summary");
    os << sum.at("schemes").get<int>() << " schemes, " << sum.at("valid").get<int>() << " valid, search "
       << sum.at("terminated_by").get<std::string>();
    if (!sum.at("best_scheme").is_null()) os << ", best scheme " << sum.at("best_scheme").get<int>();
    os << '\n';
    for (const auto& w : rep.at("trace").at("warnings")) os << "warning: " << w.get<std::string>() << '\n';
    if (rk.at("status").get<std::string>() != "ok") os << "ranking: " << rk.at("status").get<std::string>() << '\n';
    return os.str();
}

} // namespace restopath::session
