#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace restopath::search {

enum class ViolationKind { depth, reactive, voltage, divergence, non_tree };

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind = ViolationKind::non_tree;
    std::string detail;
};

/// One energising path: the unenergized lines to switch in.
struct Scheme {
    std::vector<int> lines;             // sorted branch ids (E_S)
    double objective_mvar = 0.0;        // sum of charging over `lines`
    double solver_objective = 0.0;      // as reported by the MILP
    std::map<int, double> flows;        // branch id -> flow, positive from_bus -> to_bus
    std::map<int, int> depth_per_target;
    int max_depth = 0;
    bool valid = true;
    std::vector<Violation> violations;

    bool violates(ViolationKind kind) const {
        for (const auto& v : violations)
            if (v.kind == kind) return true;
        return false;
    }
};

enum class Termination { found_m_s, infeasible, node_limit, cancelled };

std::string_view to_string(Termination t);

struct SearchTrace {
    std::vector<Scheme> schemes; // discovery order
    int iterations = 0;
    Termination terminated_by = Termination::infeasible;
    std::vector<std::string> warnings;

    int valid_count() const {
        int n = 0;
        for (const auto& s : schemes) n += s.valid ? 1 : 0;
        return n;
    }
};

} // namespace restopath::search
