#include "search/path_model.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "common/error.hpp"

namespace restopath::search {

namespace {

std::string var_name(const char* prefix, int branch) {
    return std::string(prefix) + "_" + std::to_string(branch);
}

// Buses reachable from the supply bus over branches that are not failed.
std::set<int> reachable(const grid::Scenario& s) {
    std::map<int, std::vector<int>> adj;
    for (const auto& br : s.network.branches()) {
        if (br.status == grid::BranchStatus::failed) continue;
        adj[br.from_bus].push_back(br.to_bus);
        adj[br.to_bus].push_back(br.from_bus);
    }
    std::set<int> seen{s.supply_bus};
    std::deque<int> queue{s.supply_bus};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[u])
            if (seen.insert(v).second) queue.push_back(v);
    }
    return seen;
}

} // namespace

PathModel build_path_model(const grid::Scenario& s) {
    if (grid::compute_islands(s).size() > 1)
        throw ValidationError("scenario has several energized islands; join them first");

    PathModel m;
    m.supply_bus = s.supply_bus;
    m.zone = grid::restored_zone(s);
    for (int t : s.targets)
        if (!m.zone.contains(t)) m.targets.insert(t);
    if (m.targets.empty()) throw ValidationError("no target outside the restored zone");

    const auto reach = reachable(s);
    for (int t : m.targets)
        if (!reach.contains(t))
            throw UnsolvableError("target bus " + std::to_string(t) +
                                  " is unreachable from the restored zone");

    const int n_targets = static_cast<int>(m.targets.size());
    m.big_u = n_targets;
    for (const auto& b : s.network.buses()) m.demand[b.id] = 0;
    for (int t : m.targets) m.demand[t] = 1;
    m.demand[s.supply_bus] = -n_targets;

    auto& p = m.problem;
    const double u = m.big_u;
    std::vector<int> in_model;
    for (const auto& br : s.network.branches()) {
        if (br.status == grid::BranchStatus::failed) continue;
        const bool fixed = br.live();
        // A dead branch between two zone buses could only close a loop.
        if (!fixed && m.zone.contains(br.from_bus) && m.zone.contains(br.to_bus)) continue;
        ArcVars a;
        a.z = p.add_binary(var_name("z", br.id));
        if (fixed) {
            p.set_bounds(a.z, 1.0, 1.0);
        } else {
            p.set_objective(a.z, br.charging_mvar);
            m.candidate_lines.push_back(br.id);
        }
        m.arc_map[br.id] = a;
        in_model.push_back(br.id);
    }
    for (int id : in_model) {
        auto& a = m.arc_map[id];
        a.forward = p.add_continuous(var_name("yf", id), 0.0, u);
        a.backward = p.add_continuous(var_name("yb", id), 0.0, u);
    }

    // Flow balance: inflow - outflow = b_i.
    std::map<int, std::vector<milp::Term>> balance;
    for (const auto& b : s.network.buses()) balance[b.id];
    for (int id : in_model) {
        const auto& br = s.network.branch(id);
        const auto& a = m.arc_map[id];
        balance[br.to_bus].push_back({a.forward, 1.0});
        balance[br.to_bus].push_back({a.backward, -1.0});
        balance[br.from_bus].push_back({a.forward, -1.0});
        balance[br.from_bus].push_back({a.backward, 1.0});
    }
    for (const auto& b : s.network.buses()) {
        p.add_constraint({std::move(balance[b.id]), milp::Sense::equal,
                          static_cast<double>(m.demand[b.id]), var_name("bal", b.id)});
    }

    for (int id : in_model) {
        const auto& a = m.arc_map[id];
        p.add_constraint({{{a.forward, 1.0}, {a.backward, 1.0}, {a.z, -u}},
                          milp::Sense::less_equal, 0.0, var_name("cap", id)});
    }
    // Selecting a line without routing flow over it is pointless; the row
    // keeps z tied to flow. Fixed lines carry flow freely.
    for (int id : m.candidate_lines) {
        const auto& a = m.arc_map[id];
        p.add_constraint({{{a.z, 1.0}, {a.forward, -1.0}, {a.backward, -1.0}},
                          milp::Sense::less_equal, 0.0, var_name("use", id)});
    }
    return m;
}

namespace {

void require_candidates(const PathModel& m, std::span<const int> lines) {
    if (lines.empty()) throw ValidationError("cannot exclude an empty scheme");
    for (int id : lines) {
        if (std::find(m.candidate_lines.begin(), m.candidate_lines.end(), id) ==
            m.candidate_lines.end())
            throw ValidationError("branch " + std::to_string(id) +
                                  " is not an unenergized line of the model");
    }
}

} // namespace

void add_exclusion_cut(PathModel& m, std::span<const int> lines) {
    require_candidates(m, lines);
    milp::Constraint c;
    for (int id : lines) c.terms.push_back({m.arc_map.at(id).z, -1.0});
    c.sense = milp::Sense::greater_equal;
    c.rhs = 1.0 - static_cast<double>(lines.size());
    c.name = "cut_" + std::to_string(++m.cuts);
    m.problem.add_constraint(std::move(c));
}

void add_naive_cut(PathModel& m, std::span<const int> lines) {
    require_candidates(m, lines);
    const std::set<int> in_scheme(lines.begin(), lines.end());
    milp::Constraint c;
    for (int id : m.candidate_lines) {
        const bool in = in_scheme.contains(id);
        c.terms.push_back({m.arc_map.at(id).z, in ? -1.0 : 1.0});
    }
    c.sense = milp::Sense::greater_equal;
    c.rhs = 1.0 - static_cast<double>(in_scheme.size());
    c.name = "naive_" + std::to_string(++m.cuts);
    m.problem.add_constraint(std::move(c));
}

std::vector<int> selected_lines(const PathModel& m, const std::vector<double>& values) {
    std::vector<int> out;
    for (int id : m.candidate_lines)
        if (values.at(static_cast<std::size_t>(m.arc_map.at(id).z)) > 0.5) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace restopath::search
