#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "common/error.hpp"
#include "grid/network.hpp"

namespace restopath::grid {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ParseError("field '" + path + "': " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path + key, "missing");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) field_error(path, "expected an integer");
    return v.get<int>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) field_error(path, "expected true or false");
    return v.get<bool>();
}

double opt_number(const json& obj, const char* key, const std::string& path, double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, path + key);
}

int opt_integer(const json& obj, const char* key, const std::string& path, int fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : integer(*it, path + key);
}

bool opt_boolean(const json& obj, const char* key, const std::string& path, bool fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : boolean(*it, path + key);
}

const json& array_member(const json& obj, const char* key) {
    const json& v = member(obj, key, "");
    if (!v.is_array()) field_error(key, "expected an array");
    return v;
}

std::vector<int> id_list(const json& v, const std::string& path) {
    if (!v.is_array()) field_error(path, "expected an array of ids");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(integer(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Bus parse_bus(const json& j, const std::string& path) {
    if (!j.is_object()) field_error(path, "expected an object");
    Bus b;
    b.id = integer(member(j, "id", path + "."), path + ".id");
    auto name = j.find("name");
    if (name != j.end()) {
        if (!name->is_string()) field_error(path + ".name", "expected a string");
        b.name = name->get<std::string>();
    } else {
        b.name = "Bus " + std::to_string(b.id);
    }
    b.importance = opt_number(j, "importance", path + ".", 0.0);
    b.important_load = opt_number(j, "important_load", path + ".", 0.0);
    b.is_plant = opt_boolean(j, "is_plant", path + ".", false);
    b.load_mw = opt_number(j, "load_mw", path + ".", 0.0);
    b.load_mvar = opt_number(j, "load_mvar", path + ".", 0.0);
    const bool has_x = j.contains("x"), has_y = j.contains("y");
    if (has_x != has_y) field_error(path, "layout needs both x and y");
    if (has_x) b.position = std::array<double, 2>{number(j["x"], path + ".x"), number(j["y"], path + ".y")};
    return b;
}

Branch parse_branch(const json& j, const std::string& path, double base_mva) {
    if (!j.is_object()) field_error(path, "expected an object");
    const std::string p = path + ".";
    Branch br;
    br.id = integer(member(j, "id", p), p + "id");
    br.from_bus = integer(member(j, "from_bus", p), p + "from_bus");
    br.to_bus = integer(member(j, "to_bus", p), p + "to_bus");
    br.series_r = opt_number(j, "series_r", p, 0.0);
    br.series_x = opt_number(j, "series_x", p, 0.0);
    const bool has_q = j.contains("charging_mvar"), has_b = j.contains("shunt_b");
    if (!has_q && !has_b) field_error(p + "charging_mvar", "missing (give charging_mvar or shunt_b)");
    br.charging_mvar = has_q ? number(j["charging_mvar"], p + "charging_mvar") : 0.0;
    br.shunt_b = has_b ? number(j["shunt_b"], p + "shunt_b") : 0.0;
    // Either representation may be given alone; both are validated later.
    if (!has_q) br.charging_mvar = br.shunt_b * base_mva;
    if (!has_b) br.shunt_b = br.charging_mvar / base_mva;
    br.is_transformer = opt_boolean(j, "is_transformer", p, false);
    br.breaker_count = opt_integer(j, "breaker_count", p, 2);
    auto st = j.find("status");
    if (st != j.end()) {
        if (!st->is_string()) field_error(p + "status", "expected a string");
        auto parsed = branch_status_from_string(st->get<std::string>());
        if (!parsed) field_error(p + "status", "unknown status '" + st->get<std::string>() + "'");
        br.status = *parsed;
    }
    return br;
}

Generator parse_generator(const json& j, const std::string& path) {
    if (!j.is_object()) field_error(path, "expected an object");
    const std::string p = path + ".";
    Generator g;
    g.bus = integer(member(j, "bus", p), p + "bus");
    g.rated_mva = number(member(j, "rated_mva", p), p + "rated_mva");
    g.q_absorb_max = opt_number(j, "q_absorb_max", p, 0.3 * g.rated_mva);
    g.is_blackstart = opt_boolean(j, "is_blackstart", p, false);
    return g;
}

Params parse_params(const json& j) {
    Params p;
    if (!j.is_object()) field_error("params", "expected an object");
    const std::string pre = "params.";
    p.d_max = opt_integer(j, "d_max", pre, p.d_max);
    p.k1 = opt_number(j, "k1", pre, p.k1);
    p.m_s = opt_integer(j, "m_s", pre, p.m_s);
    p.lambda = opt_number(j, "lambda", pre, p.lambda);
    p.alpha = opt_number(j, "alpha", pre, p.alpha);
    p.v_min = opt_number(j, "v_min", pre, p.v_min);
    p.v_max = opt_number(j, "v_max", pre, p.v_max);
    p.base_mva = opt_number(j, "base_mva", pre, p.base_mva);
    auto w = j.find("weights");
    if (w != j.end()) {
        if (!w->is_array() || w->size() != 5) field_error("params.weights", "expected 5 numbers");
        for (std::size_t i = 0; i < 5; ++i)
            p.weights[i] = number((*w)[i], "params.weights[" + std::to_string(i) + "]");
    }
    return p;
}

std::string line_and_column(std::string_view doc, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, doc.size()); ++i) {
        if (doc[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

Scenario load_scenario(std::string_view document) {
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        std::string what = e.what();
        throw ParseError("scenario document is not valid JSON at " +
                         line_and_column(document, e.byte > 0 ? e.byte - 1 : 0) + ": " + what);
    }
    if (!root.is_object()) throw ParseError("scenario document must be a JSON object");

    Params params = root.contains("params") ? parse_params(root["params"]) : Params{};

    std::vector<Bus> buses;
    const json& jb = array_member(root, "buses");
    for (std::size_t i = 0; i < jb.size(); ++i)
        buses.push_back(parse_bus(jb[i], "buses[" + std::to_string(i) + "]"));

    std::vector<Branch> branches;
    const json& jl = array_member(root, "branches");
    for (std::size_t i = 0; i < jl.size(); ++i)
        branches.push_back(parse_branch(jl[i], "branches[" + std::to_string(i) + "]", params.base_mva));

    std::vector<Generator> gens;
    if (root.contains("generators")) {
        const json& jg = array_member(root, "generators");
        for (std::size_t i = 0; i < jg.size(); ++i)
            gens.push_back(parse_generator(jg[i], "generators[" + std::to_string(i) + "]"));
    }

    Scenario s;
    if (root.contains("state")) {
        const json& st = root["state"];
        if (!st.is_object()) field_error("state", "expected an object");
        if (st.contains("energized_buses"))
            for (int id : id_list(st["energized_buses"], "state.energized_buses"))
                s.state.energized_buses.insert(id);
        if (st.contains("failed_branches"))
            for (int id : id_list(st["failed_branches"], "state.failed_branches"))
                s.state.failed_branches.insert(id);
    }
    // A failure recorded in either place marks the branch failed.
    for (auto& br : branches) {
        if (s.state.failed_branches.contains(br.id)) {
            if (br.status == BranchStatus::energized || br.status == BranchStatus::virtual_line)
                throw ValidationError("branch " + std::to_string(br.id) + ": failed branch marked " +
                                      std::string(to_string(br.status)));
            br.status = BranchStatus::failed;
        }
        if (br.status == BranchStatus::failed) s.state.failed_branches.insert(br.id);
    }

    s.network = PowerNetwork(std::move(buses), std::move(branches), std::move(gens));
    if (root.contains("targets"))
        for (int id : id_list(root["targets"], "targets")) s.targets.insert(id);
    s.supply_bus = integer(member(root, "supply_bus", ""), "supply_bus");
    s.params = params;

    validate(s);
    return s;
}

std::string save_scenario(const Scenario& s) {
    ordered_json root;
    ordered_json buses = ordered_json::array();
    for (const auto& b : s.network.buses()) {
        ordered_json j;
        j["id"] = b.id;
        j["name"] = b.name;
        j["importance"] = b.importance;
        j["important_load"] = b.important_load;
        j["is_plant"] = b.is_plant;
        if (b.load_mw != 0.0 || b.load_mvar != 0.0) {
            j["load_mw"] = b.load_mw;
            j["load_mvar"] = b.load_mvar;
        }
        if (b.position) {
            j["x"] = (*b.position)[0];
            j["y"] = (*b.position)[1];
        }
        buses.push_back(std::move(j));
    }
    ordered_json branches = ordered_json::array();
    for (const auto& br : s.network.branches()) {
        ordered_json j;
        j["id"] = br.id;
        j["from_bus"] = br.from_bus;
        j["to_bus"] = br.to_bus;
        j["charging_mvar"] = br.charging_mvar;
        j["series_r"] = br.series_r;
        j["series_x"] = br.series_x;
        j["shunt_b"] = br.shunt_b;
        j["is_transformer"] = br.is_transformer;
        j["breaker_count"] = br.breaker_count;
        j["status"] = std::string(to_string(br.status));
        branches.push_back(std::move(j));
    }
    ordered_json gens = ordered_json::array();
    for (const auto& g : s.network.generators()) {
        gens.push_back({{"bus", g.bus},
                        {"rated_mva", g.rated_mva},
                        {"q_absorb_max", g.q_absorb_max},
                        {"is_blackstart", g.is_blackstart}});
    }
    root["buses"] = std::move(buses);
    root["branches"] = std::move(branches);
    root["generators"] = std::move(gens);
    root["state"] = {{"energized_buses", s.state.energized_buses},
                     {"failed_branches", s.state.failed_branches}};
    root["targets"] = s.targets;
    root["supply_bus"] = s.supply_bus;
    const auto& p = s.params;
    root["params"] = {{"d_max", p.d_max},   {"k1", p.k1},       {"m_s", p.m_s},
                      {"lambda", p.lambda}, {"weights", p.weights}, {"alpha", p.alpha},
                      {"v_min", p.v_min},   {"v_max", p.v_max}, {"base_mva", p.base_mva}};
    return root.dump(2) + "\n";
}

} // namespace restopath::grid
