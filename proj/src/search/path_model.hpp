#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "grid/network.hpp"
#include "milp/problem.hpp"

namespace restopath::search {

struct ArcVars {
    int z = -1;        // line selected
    int forward = -1;  // flow from_bus -> to_bus
    int backward = -1; // flow to_bus -> from_bus
};

/// Single-commodity fixed-charge flow model of the Steiner problem: one unit
/// of flow from the supply bus to every target, a binary per branch paying
/// the branch's charging MVar when an unenergized branch carries flow.
struct PathModel {
    milp::Problem problem;
    std::map<int, ArcVars> arc_map; // branch id -> variables
    std::map<int, int> demand;      // bus id -> b_i
    int big_u = 0;
    int supply_bus = 0;
    std::set<int> zone;             // restored-zone buses
    std::set<int> targets;          // V_D
    std::vector<int> candidate_lines; // unenergized branches in the model (E_un)
    int cuts = 0;
};

/// Builds the model for a single-island scenario. Targets already in the
/// restored zone are left out of V_D. Throws ValidationError when the
/// scenario has several islands or no target outside the zone, and
/// UnsolvableError when a target cannot be reached.
PathModel build_path_model(const grid::Scenario& scenario);

/// sum over `lines` of (1 - z) >= 1: forbids every solution that contains
/// all of `lines`.
void add_exclusion_cut(PathModel& model, std::span<const int> lines);

/// sum over `lines` of (1 - z) + sum over the other candidate lines of z >= 1:
/// forbids only the exact selection. Diagnostic; admits supersets.
void add_naive_cut(PathModel& model, std::span<const int> lines);

/// Unenergized lines with z = 1 in a MILP solution, unreduced.
std::vector<int> selected_lines(const PathModel& model, const std::vector<double>& values);

} // namespace restopath::search
