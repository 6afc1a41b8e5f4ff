#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "grid/network.hpp"
#include "milp/problem.hpp"
#include "search/scheme.hpp"

namespace restopath::search {

struct SearchProgress {
    int iteration = 0;
    int schemes_found = 0;
    int valid_found = 0;
    int max_schemes = 0;
    double last_objective = 0.0;
};

struct SearchOptions {
    int max_schemes = 0; // 0: the scenario's M_S
    bool check_depth = true;
    bool check_reactive = true;
    bool check_voltage = true;
    double slack_voltage = 1.0;
    milp::MilpOptions milp;
    /// Called after every scheme; returning false cancels the search.
    std::function<bool(const SearchProgress&)> on_scheme;
};

struct TreeInfo {
    bool is_tree = false;
    std::string problem;           // why it is not a tree
    std::map<int, int> bus_depth;  // unenergized lines from the zone
    std::map<int, double> flows;   // targets fed through each line, signed by branch orientation
};

/// Structure of `lines` with the restored zone contracted to one root node.
TreeInfo analyze_tree(const grid::Scenario& scenario, const std::set<int>& zone,
                      const std::set<int>& targets, std::span<const int> lines);

/// Cheapest spanning forest of `lines` (ties by branch id), restricted to the
/// component of the zone, with non-target leaves pruned repeatedly.
std::vector<int> minimal_subtree(const grid::Scenario& scenario, const std::set<int>& zone,
                                 const std::set<int>& targets, std::span<const int> lines);

/// Builds a scheme from `lines` and runs the enabled checks against the
/// scenario (islands are joined first). Fills depth, flows and violations.
Scheme make_scheme(const grid::Scenario& scenario, std::span<const int> lines,
                   const SearchOptions& options = {});

/// Solve, check, exclude, repeat until M_S schemes, infeasibility, the node
/// limit or cancellation. Throws UnsolvableError when a target is
/// unreachable.
SearchTrace iterate_schemes(const grid::Scenario& scenario, const SearchOptions& options = {});

/// The same search towards one target.
SearchTrace single_target_path(const grid::Scenario& scenario, int target,
                               const SearchOptions& options = {});

} // namespace restopath::search
