#include <algorithm>
#include <climits>
#include <deque>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "powerflow/powerflow.hpp"
#include "search/search.hpp"

namespace restopath::search {

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::depth: return "depth";
    case ViolationKind::reactive: return "reactive";
    case ViolationKind::voltage: return "voltage";
    case ViolationKind::divergence: return "divergence";
    case ViolationKind::non_tree: return "non_tree";
    }
    return "non_tree";
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::found_m_s: return "found_m_s";
    case Termination::infeasible: return "infeasible";
    case Termination::node_limit: return "node_limit";
    case Termination::cancelled: return "cancelled";
    }
    return "infeasible";
}

namespace {

constexpr int kRoot = INT_MIN;

int node_of(const std::set<int>& zone, int bus) { return zone.contains(bus) ? kRoot : bus; }

class DisjointSets {
public:
    int find(int x) {
        auto it = parent_.find(x);
        if (it == parent_.end()) {
            parent_[x] = x;
            return x;
        }
        if (it->second == x) return x;
        const int r = find(it->second);
        parent_[x] = r;
        return r;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::map<int, int> parent_;
};

struct Edge {
    int id;
    int a; // contracted endpoints
    int b;
};

std::vector<Edge> contracted_edges(const grid::Scenario& s, const std::set<int>& zone,
                                   std::span<const int> lines) {
    std::vector<Edge> out;
    for (int id : lines) {
        const auto& br = s.network.branch(id);
        out.push_back({id, node_of(zone, br.from_bus), node_of(zone, br.to_bus)});
    }
    return out;
}

} // namespace

TreeInfo analyze_tree(const grid::Scenario& s, const std::set<int>& zone,
                      const std::set<int>& targets, std::span<const int> lines) {
    TreeInfo info;
    const auto edges = contracted_edges(s, zone, lines);
    DisjointSets ds;
    std::map<int, std::vector<const Edge*>> adj;
    for (const auto& e : edges) {
        if (!ds.unite(e.a, e.b)) {
            info.problem = "line " + std::to_string(e.id) + " closes a loop";
            return info;
        }
        adj[e.a].push_back(&e);
        adj[e.b].push_back(&e);
    }

    std::map<int, int> depth{{kRoot, 0}};
    std::map<int, const Edge*> parent_edge;
    std::vector<int> order{kRoot};
    std::deque<int> queue{kRoot};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto* e : adj[u]) {
            const int v = e->a == u ? e->b : e->a;
            if (depth.contains(v)) continue;
            depth[v] = depth[u] + 1;
            parent_edge[v] = e;
            order.push_back(v);
            queue.push_back(v);
        }
    }
    for (const auto& e : edges) {
        if (!depth.contains(e.a) || !depth.contains(e.b)) {
            info.problem = "line " + std::to_string(e.id) + " is not connected to the restored zone";
            return info;
        }
    }
    for (int t : targets) {
        if (!zone.contains(t) && !depth.contains(t)) {
            info.problem = "target bus " + std::to_string(t) + " is not reached";
            return info;
        }
    }

    info.is_tree = true;
    for (const auto& [node, d] : depth)
        if (node != kRoot) info.bus_depth[node] = d;
    for (int b : zone) info.bus_depth[b] = 0;

    // Targets below each node; the parent edge carries that many units.
    std::map<int, int> below;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        if (v == kRoot) continue;
        below[v] += targets.contains(v) ? 1 : 0;
        const Edge* e = parent_edge[v];
        const int up = e->a == v ? e->b : e->a;
        below[up] += below[v];
        const auto& br = s.network.branch(e->id);
        // Flow runs from parent to child.
        const bool forward = node_of(zone, br.to_bus) == v;
        info.flows[e->id] = forward ? below[v] : -below[v];
    }
    return info;
}

std::vector<int> minimal_subtree(const grid::Scenario& s, const std::set<int>& zone,
                                 const std::set<int>& targets, std::span<const int> lines) {
    std::vector<int> sorted(lines.begin(), lines.end());
    std::sort(sorted.begin(), sorted.end(), [&](int x, int y) {
        const double cx = s.network.branch(x).charging_mvar;
        const double cy = s.network.branch(y).charging_mvar;
        return cx != cy ? cx < cy : x < y;
    });
    DisjointSets ds;
    std::vector<Edge> forest;
    for (const auto& e : contracted_edges(s, zone, sorted))
        if (ds.unite(e.a, e.b)) forest.push_back(e);

    const int root_set = ds.find(kRoot);
    std::erase_if(forest, [&](const Edge& e) { return ds.find(e.a) != root_set; });

    bool pruned = true;
    while (pruned) {
        pruned = false;
        std::map<int, int> degree;
        for (const auto& e : forest) {
            ++degree[e.a];
            ++degree[e.b];
        }
        auto removable = [&](int node) {
            return node != kRoot && degree[node] == 1 && !targets.contains(node);
        };
        const auto before = forest.size();
        std::erase_if(forest, [&](const Edge& e) { return removable(e.a) || removable(e.b); });
        pruned = forest.size() != before;
    }

    std::vector<int> out;
    for (const auto& e : forest) out.push_back(e.id);
    std::sort(out.begin(), out.end());
    return out;
}

Scheme make_scheme(const grid::Scenario& input, std::span<const int> lines,
                   const SearchOptions& options) {
    const grid::Scenario s = grid::transform_islands(input);
    const auto zone = grid::restored_zone(s);
    std::set<int> targets;
    for (int t : s.targets)
        if (!zone.contains(t)) targets.insert(t);

    Scheme scheme;
    scheme.lines.assign(lines.begin(), lines.end());
    std::sort(scheme.lines.begin(), scheme.lines.end());
    for (int id : scheme.lines) {
        if (!s.network.has_branch(id))
            throw ValidationError("scheme line " + std::to_string(id) + " does not exist");
        const auto& br = s.network.branch(id);
        if (br.status != grid::BranchStatus::unenergized)
            throw ValidationError("scheme line " + std::to_string(id) + " is " +
                                  std::string(grid::to_string(br.status)));
        scheme.objective_mvar += br.charging_mvar;
    }
    if (std::adjacent_find(scheme.lines.begin(), scheme.lines.end()) != scheme.lines.end())
        throw ValidationError("scheme lists a line twice");
    scheme.solver_objective = scheme.objective_mvar;

    const auto tree = analyze_tree(s, zone, targets, scheme.lines);
    if (!tree.is_tree) {
        scheme.violations.push_back({ViolationKind::non_tree, tree.problem});
    } else {
        scheme.flows = tree.flows;
        for (int t : targets) {
            const int d = tree.bus_depth.at(t);
            scheme.depth_per_target[t] = d;
            scheme.max_depth = std::max(scheme.max_depth, d);
        }
        if (options.check_depth && scheme.max_depth > s.params.d_max) {
            scheme.violations.push_back(
                {ViolationKind::depth, "depth " + std::to_string(scheme.max_depth) + " exceeds " +
                                           std::to_string(s.params.d_max)});
        }
    }

    if (options.check_reactive) {
        const double limit = grid::reactive_capability(s);
        if (!(scheme.objective_mvar < limit)) {
            std::ostringstream os;
            os.precision(6);
            os << "charging " << scheme.objective_mvar << " MVar reaches the absorption limit "
               << limit << " MVar";
            scheme.violations.push_back({ViolationKind::reactive, os.str()});
        }
    }

    if (options.check_voltage && !scheme.lines.empty()) {
        std::vector<pf::PFResult> results;
        for (const auto& c : pf::build_energized_cases(s, scheme.lines, options.slack_voltage))
            results.push_back(pf::newton_solve(c));
        const auto vc = pf::check_voltage(results, s.params.v_min, s.params.v_max);
        if (vc.diverged) {
            scheme.violations.push_back({ViolationKind::divergence, "power flow did not converge"});
        } else if (!vc.pass) {
            std::ostringstream os;
            os.precision(4);
            os << "voltage outside limits at bus";
            for (int b : vc.violating) os << ' ' << b;
            os << " (range " << vc.v_lowest << " to " << vc.v_highest << " p.u.)";
            scheme.violations.push_back({ViolationKind::voltage, os.str()});
        }
    }

    scheme.valid = scheme.violations.empty();
    return scheme;
}

} // namespace restopath::search
