#pragma once

#include <cstdint>
#include <vector>

#include "milp/problem.hpp"

namespace restopath::milp::detail {

enum class VarState : std::uint8_t { basic, at_lower, at_upper, at_zero };

/// Enough to rebuild a tableau: which variable is basic in each row and
/// where every nonbasic variable sits.
struct Basis {
    std::vector<int> head;
    std::vector<VarState> state;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical };

/// Dense bounded-variable simplex over min c'x, Ax + s = b, l <= (x, s) <= u.
/// One slack per row: [0, inf) for <=, (-inf, 0] for >=, [0, 0] for =.
///
/// The tableau is kept explicitly (B^-1 [A | I | b]); the matrices this
/// library builds are a few hundred rows, so the O(mn) pivot is cheap and the
/// code stays auditable. Pricing is Dantzig with lowest-index ties, switching
/// to Bland's rule after a run of degenerate pivots.
class BoundedSimplex {
public:
    BoundedSimplex(const Problem& problem, const Tolerances& tol, long iteration_limit);

    /// Primal simplex (phase 1 then phase 2) from the current basis.
    LpStatus solve_primal();

    /// Dual simplex from the current basis; falls back to the primal method
    /// when the basis is not dual feasible.
    LpStatus solve_dual();

    void set_bounds(int var, double lower, double upper);
    void reset_structural_bounds();

    Basis basis() const;
    void load_basis(const Basis& basis);

    double objective() const;
    std::vector<double> structural_values() const;
    double value(int var) const { return x_[static_cast<std::size_t>(var)]; }
    long iterations() const { return iterations_; }

private:
    double& t(std::size_t row, std::size_t col) { return tab_[row * width_ + col]; }
    double t(std::size_t row, std::size_t col) const { return tab_[row * width_ + col]; }

    void pivot(std::size_t row, std::size_t col);
    void refactor();
    void compute_primal();
    void compute_reduced_costs();
    bool dual_feasible() const;
    void place_nonbasic(std::size_t j);
    double infeasibility(std::size_t row) const;
    bool is_fixed(std::size_t j) const { return lo_[j] == hi_[j]; }

    const Problem* problem_;
    Tolerances tol_;
    long iteration_limit_;
    long iterations_ = 0;
    long pivots_since_refactor_ = 0;

    std::size_t rows_ = 0;
    std::size_t structurals_ = 0;
    std::size_t cols_ = 0;  // structurals + slacks
    std::size_t width_ = 0; // cols + rhs column

    std::vector<double> original_; // [A | I | b], row-major
    std::vector<double> tab_;
    std::vector<double> cost_;
    std::vector<double> lo_, hi_;
    std::vector<double> x_;
    std::vector<double> d_; // reduced costs for the phase-2 objective
    std::vector<int> head_;
    std::vector<VarState> state_;
};

} // namespace restopath::milp::detail
