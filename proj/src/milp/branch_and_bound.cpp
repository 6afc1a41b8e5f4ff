#include <cmath>
#include <memory>
#include <queue>
#include <utility>
#include <vector>

#include "milp/problem.hpp"
#include "milp/simplex.hpp"

namespace restopath::milp {

using detail::Basis;
using detail::BoundedSimplex;
using detail::LpStatus;

namespace {

Status to_status(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return Status::optimal;
    case LpStatus::infeasible: return Status::infeasible;
    case LpStatus::unbounded: return Status::unbounded;
    case LpStatus::iteration_limit:
    case LpStatus::numerical: return Status::numerical_failure;
    }
    return Status::numerical_failure;
}

struct Fixing {
    int var;
    double value;
};

struct OpenNode {
    double bound;
    long seq;
    std::vector<Fixing> fixings;
    std::shared_ptr<const Basis> basis;
};

struct WorseNode {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.seq > b.seq;
    }
};

/// Rounds the binaries of an incumbent and re-solves the continuous part with
/// them fixed, so reported values carry no tableau drift. The objective is
/// then recomputed from the values in index order.
void polish(const Problem& problem, const std::vector<int>& binaries, const LpOptions& lp_options,
            std::vector<double>& values, double& objective) {
    for (int j : binaries) values[static_cast<std::size_t>(j)] = std::round(values[static_cast<std::size_t>(j)]);

    std::vector<int> continuous;
    std::vector<int> reduced_index(problem.num_variables(), -1);
    Problem reduced;
    for (std::size_t j = 0; j < problem.num_variables(); ++j) {
        const auto& v = problem.variables()[j];
        if (v.kind == VarKind::binary) continue;
        reduced_index[j] = reduced.add_variable(v.name, VarKind::continuous, v.lower, v.upper);
        reduced.set_objective(reduced_index[j], problem.objective()[j]);
        continuous.push_back(static_cast<int>(j));
    }
    if (!continuous.empty()) {
        for (const auto& c : problem.constraints()) {
            Constraint r;
            double fixed = 0.0;
            for (const auto& t : c.terms) {
                const int k = reduced_index[static_cast<std::size_t>(t.var)];
                if (k < 0)
                    fixed += t.coef * values[static_cast<std::size_t>(t.var)];
                else
                    r.terms.push_back({k, t.coef});
            }
            if (r.terms.empty()) continue;
            r.sense = c.sense;
            r.rhs = c.rhs - fixed;
            reduced.add_constraint(std::move(r));
        }
        const Solution sol = solve_lp(reduced, lp_options);
        if (sol.status == Status::optimal)
            for (std::size_t k = 0; k < continuous.size(); ++k)
                values[static_cast<std::size_t>(continuous[k])] = sol.values[k];
    }

    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) sum += problem.objective()[j] * values[j];
    objective = sum;
}

} // namespace

Solution solve_lp(const Problem& problem, const LpOptions& options) {
    problem.check();
    BoundedSimplex lp(problem, options.tol, options.iteration_limit);
    Solution out;
    out.status = to_status(lp.solve_dual());
    out.node_count = 1;
    out.lp_iterations = lp.iterations();
    if (out.status == Status::optimal) {
        out.values = lp.structural_values();
        out.objective_value = lp.objective();
    }
    return out;
}

Solution solve_milp(const Problem& problem, const MilpOptions& options) {
    problem.check();
    std::vector<int> binaries;
    for (std::size_t j = 0; j < problem.num_variables(); ++j)
        if (problem.variables()[j].kind == VarKind::binary) binaries.push_back(static_cast<int>(j));

    BoundedSimplex lp(problem, options.tol, options.iteration_limit);
    Solution out;
    double incumbent = kInfinity;
    std::vector<double> best_values;
    bool hit_node_limit = false;
    bool numerical = false;
    bool unbounded = false;
    long nodes = 0;
    long seq = 0;
    std::priority_queue<OpenNode, std::vector<OpenNode>, WorseNode> open;

    auto prunable = [&](double bound) {
        return bound >= incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
    };

    // Most fractional binary; lowest index wins ties.
    auto branching_variable = [&]() {
        int pick = -1;
        double best = options.tol.integrality;
        for (int j : binaries) {
            const double v = lp.value(j);
            const double frac = std::abs(v - std::round(v));
            if (frac > best + 1e-12) {
                best = frac;
                pick = j;
            }
        }
        return pick;
    };

    // Solves the node currently loaded in `lp`, then keeps diving into the
    // 0-branch; each 1-branch goes to the open list.
    auto dive = [&](std::vector<Fixing> fixings) {
        while (true) {
            if (nodes >= options.node_limit) {
                hit_node_limit = true;
                return;
            }
            ++nodes;
            const LpStatus status = lp.solve_dual();
            if (status == LpStatus::infeasible) return;
            if (status == LpStatus::unbounded) {
                unbounded = true;
                return;
            }
            if (status != LpStatus::optimal) {
                numerical = true;
                return;
            }
            const double bound = lp.objective();
            if (prunable(bound)) return;
            const int j = branching_variable();
            if (j < 0) {
                incumbent = bound;
                best_values = lp.structural_values();
                return;
            }
            auto up = fixings;
            up.push_back({j, 1.0});
            open.push({bound, seq++, std::move(up), std::make_shared<const Basis>(lp.basis())});
            fixings.push_back({j, 0.0});
            lp.set_bounds(j, 0.0, 0.0);
        }
    };

    dive({});
    while (!open.empty() && !hit_node_limit && !numerical && !unbounded) {
        OpenNode node = open.top();
        open.pop();
        if (prunable(node.bound)) continue;
        lp.reset_structural_bounds();
        lp.load_basis(*node.basis);
        for (const auto& f : node.fixings) lp.set_bounds(f.var, f.value, f.value);
        dive(std::move(node.fixings));
    }

    out.node_count = nodes;
    out.lp_iterations = lp.iterations();
    if (unbounded) {
        out.status = Status::unbounded;
    } else if (numerical) {
        out.status = Status::numerical_failure;
    } else if (hit_node_limit) {
        out.status = Status::node_limit;
    } else {
        out.status = std::isfinite(incumbent) ? Status::optimal : Status::infeasible;
    }
    if (std::isfinite(incumbent)) {
        out.objective_value = incumbent;
        out.values = std::move(best_values);
        polish(problem, binaries, {options.tol, options.iteration_limit}, out.values, out.objective_value);
    }
    return out;
}

} // namespace restopath::milp
