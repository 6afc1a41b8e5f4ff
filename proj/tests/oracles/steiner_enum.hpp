#pragma once

// Brute-force Steiner-tree oracle, independent of the solver code: grows
// every subtree that contains the root, one edge at a time, and keeps those
// whose leaves are all terminals.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

struct Edge {
    int id;
    int u;
    int v;
    double w;
};

struct Tree {
    std::vector<int> edges; // sorted ids
    double weight = 0.0;
};

/// Every edge subset that is a tree containing `root`, each exactly once.
inline void for_each_rooted_subtree(int root, const std::vector<Edge>& edges,
                                    const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> in_tree_edges;
    std::set<int> in_tree_nodes{root};
    std::vector<char> banned(edges.size(), 0);

    std::function<void(std::vector<int>)> grow = [&](std::vector<int> frontier) {
        visit(in_tree_edges);
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            const int e = frontier[i];
            const Edge& ed = edges[static_cast<std::size_t>(e)];
            const bool has_u = in_tree_nodes.contains(ed.u);
            const bool has_v = in_tree_nodes.contains(ed.v);
            if (has_u == has_v) continue; // both inside: a cycle
            const int fresh = has_u ? ed.v : ed.u;

            std::vector<int> next(frontier.begin() + static_cast<long>(i) + 1, frontier.end());
            for (std::size_t k = 0; k < edges.size(); ++k) {
                if (banned[k] || static_cast<int>(k) == e) continue;
                if ((edges[k].u == fresh && !in_tree_nodes.contains(edges[k].v)) ||
                    (edges[k].v == fresh && !in_tree_nodes.contains(edges[k].u))) {
                    if (std::find(next.begin(), next.end(), static_cast<int>(k)) == next.end())
                        next.push_back(static_cast<int>(k));
                }
            }
            // Edges skipped at this level stay out of the whole subtree below.
            std::vector<int> newly_banned;
            for (std::size_t j = 0; j < i; ++j)
                if (!banned[static_cast<std::size_t>(frontier[j])]) {
                    banned[static_cast<std::size_t>(frontier[j])] = 1;
                    newly_banned.push_back(frontier[j]);
                }
            banned[static_cast<std::size_t>(e)] = 1;

            in_tree_edges.push_back(e);
            in_tree_nodes.insert(fresh);
            grow(next);
            in_tree_nodes.erase(fresh);
            in_tree_edges.pop_back();

            banned[static_cast<std::size_t>(e)] = 0;
            for (int b : newly_banned) banned[static_cast<std::size_t>(b)] = 0;
        }
    };

    std::vector<int> start;
    for (std::size_t k = 0; k < edges.size(); ++k)
        if (edges[k].u == root || edges[k].v == root) start.push_back(static_cast<int>(k));
    grow(start);
}

/// True when `tree` (edge indices) spans all terminals and every leaf other
/// than the root is a terminal.
inline bool is_minimal_steiner(int root, const std::set<int>& terminals, const std::vector<Edge>& edges,
                               const std::vector<int>& tree) {
    std::map<int, int> degree;
    for (int e : tree) {
        ++degree[edges[static_cast<std::size_t>(e)].u];
        ++degree[edges[static_cast<std::size_t>(e)].v];
    }
    for (int t : terminals)
        if (t != root && !degree.contains(t)) return false;
    for (const auto& [node, d] : degree)
        if (d == 1 && node != root && !terminals.contains(node)) return false;
    return true;
}

/// All minimal Steiner trees connecting root and terminals, cheapest first.
inline std::vector<Tree> steiner_trees(int root, const std::set<int>& terminals, const std::vector<Edge>& edges) {
    std::vector<Tree> out;
    for_each_rooted_subtree(root, edges, [&](const std::vector<int>& tree) {
        if (!is_minimal_steiner(root, terminals, edges, tree)) return;
        Tree t;
        for (int e : tree) {
            t.edges.push_back(edges[static_cast<std::size_t>(e)].id);
            t.weight += edges[static_cast<std::size_t>(e)].w;
        }
        std::sort(t.edges.begin(), t.edges.end());
        out.push_back(std::move(t));
    });
    std::stable_sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) { return a.weight < b.weight; });
    return out;
}

/// Subset-by-subset check of the same set, for cross-checking the grower on
/// tiny graphs (edge count <= 16).
inline std::vector<Tree> steiner_trees_by_subsets(int root, const std::set<int>& terminals,
                                                  const std::vector<Edge>& edges) {
    std::vector<Tree> out;
    const std::uint32_t n = static_cast<std::uint32_t>(edges.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> tree;
        for (std::uint32_t k = 0; k < n; ++k)
            if (mask & (1u << k)) tree.push_back(static_cast<int>(k));
        // Tree containing root: connected from root, acyclic.
        std::map<int, int> parent;
        std::function<int(int)> find = [&](int x) {
            if (!parent.contains(x)) parent[x] = x;
            return parent[x] == x ? x : parent[x] = find(parent[x]);
        };
        bool acyclic = true;
        for (int e : tree) {
            const int a = find(edges[static_cast<std::size_t>(e)].u);
            const int b = find(edges[static_cast<std::size_t>(e)].v);
            if (a == b) {
                acyclic = false;
                break;
            }
            parent[a] = b;
        }
        if (!acyclic) continue;
        bool connected = true;
        for (int e : tree)
            if (find(edges[static_cast<std::size_t>(e)].u) != find(root)) connected = false;
        if (!connected) continue;
        if (!is_minimal_steiner(root, terminals, edges, tree)) continue;
        Tree t;
        for (int e : tree) {
            t.edges.push_back(edges[static_cast<std::size_t>(e)].id);
            t.weight += edges[static_cast<std::size_t>(e)].w;
        }
        std::sort(t.edges.begin(), t.edges.end());
        out.push_back(std::move(t));
    }
    std::stable_sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) { return a.weight < b.weight; });
    return out;
}

/// Dijkstra distance from `source` to `target`; infinity when unreachable.
inline double shortest_path(int source, int target, const std::vector<Edge>& edges) {
    std::map<int, double> dist{{source, 0.0}};
    std::set<std::pair<double, int>> queue{{0.0, source}};
    while (!queue.empty()) {
        const auto [d, u] = *queue.begin();
        queue.erase(queue.begin());
        if (u == target) return d;
        for (const auto& e : edges) {
            if (e.u != u && e.v != u) continue;
            const int v = e.u == u ? e.v : e.u;
            const double nd = d + e.w;
            auto it = dist.find(v);
            if (it == dist.end() || nd < it->second) {
                if (it != dist.end()) queue.erase({it->second, v});
                dist[v] = nd;
                queue.insert({nd, v});
            }
        }
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace oracle
