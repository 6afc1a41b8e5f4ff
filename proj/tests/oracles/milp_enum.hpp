#pragma once

// Exhaustive MILP oracle for problems with binaries and at most one
// continuous variable. For each binary assignment the continuous variable
// lives on an interval cut out by the rows; the objective picks an end.
// Shares no code with the simplex.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

struct Row {
    std::vector<double> a; // binaries
    double c = 0.0;        // continuous
    int sense = 0;         // -1 <=, 0 =, 1 >=
    double rhs = 0.0;
};

struct SmallMilp {
    int binaries = 0;
    bool has_continuous = false;
    double y_lower = 0.0;
    double y_upper = 0.0;
    std::vector<double> cost; // binaries
    double y_cost = 0.0;
    std::vector<Row> rows;
};

struct EnumResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
};

inline EnumResult enumerate(const SmallMilp& p, double tol = 1e-9) {
    EnumResult best;
    for (std::uint32_t mask = 0; mask < (1u << p.binaries); ++mask) {
        double lo = p.has_continuous ? p.y_lower : 0.0;
        double hi = p.has_continuous ? p.y_upper : 0.0;
        bool ok = true;
        for (const auto& r : p.rows) {
            double lhs = 0.0;
            for (int j = 0; j < p.binaries; ++j)
                if (mask & (1u << j)) lhs += r.a[static_cast<std::size_t>(j)];
            const double rest = r.rhs - lhs; // c*y (sense) rest
            const double c = p.has_continuous ? r.c : 0.0;
            if (c == 0.0) {
                if ((r.sense <= 0 && 0.0 > rest + tol) || (r.sense >= 0 && 0.0 < rest - tol)) ok = false;
            } else {
                const double bound = rest / c;
                // c*y <= rest  ->  y <= bound when c > 0, y >= bound when c < 0.
                const bool upper = (r.sense <= 0) == (c > 0);
                if (r.sense == 0) {
                    lo = std::max(lo, bound);
                    hi = std::min(hi, bound);
                } else if (upper) {
                    hi = std::min(hi, bound);
                } else {
                    lo = std::max(lo, bound);
                }
            }
            if (!ok) break;
        }
        if (!ok || lo > hi + tol) continue;
        double obj = 0.0;
        for (int j = 0; j < p.binaries; ++j)
            if (mask & (1u << j)) obj += p.cost[static_cast<std::size_t>(j)];
        if (p.has_continuous) obj += p.y_cost * (p.y_cost >= 0 ? lo : hi);
        if (obj < best.objective) {
            best.objective = obj;
            best.feasible = true;
        }
    }
    return best;
}

} // namespace oracle
