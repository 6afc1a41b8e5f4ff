#include "milp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace restopath::milp::detail {

namespace {

constexpr long kRefactorInterval = 100;
constexpr int kDegenerateRun = 30;
constexpr double kTieEps = 1e-12;
constexpr double kSingular = 1e-9;

} // namespace

BoundedSimplex::BoundedSimplex(const Problem& problem, const Tolerances& tol, long iteration_limit)
    : problem_(&problem), tol_(tol), iteration_limit_(iteration_limit) {
    rows_ = problem.num_constraints();
    structurals_ = problem.num_variables();
    cols_ = structurals_ + rows_;
    width_ = cols_ + 1;

    original_.assign(rows_ * width_, 0.0);
    lo_.resize(cols_);
    hi_.resize(cols_);
    cost_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < structurals_; ++j) {
        lo_[j] = problem.variables()[j].lower;
        hi_[j] = problem.variables()[j].upper;
        cost_[j] = problem.objective()[j];
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        const auto& c = problem.constraints()[i];
        double* row = &original_[i * width_];
        for (const auto& term : c.terms) row[static_cast<std::size_t>(term.var)] = term.coef;
        row[structurals_ + i] = 1.0;
        row[cols_] = c.rhs;
        const std::size_t s = structurals_ + i;
        switch (c.sense) {
        case Sense::less_equal: lo_[s] = 0.0; hi_[s] = kInfinity; break;
        case Sense::greater_equal: lo_[s] = -kInfinity; hi_[s] = 0.0; break;
        case Sense::equal: lo_[s] = 0.0; hi_[s] = 0.0; break;
        }
    }

    tab_ = original_;
    head_.resize(rows_);
    state_.resize(cols_);
    x_.assign(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        head_[i] = static_cast<int>(structurals_ + i);
        state_[structurals_ + i] = VarState::basic;
    }
    for (std::size_t j = 0; j < structurals_; ++j) {
        // Boxed columns start at the bound their cost prefers, which makes
        // the slack basis dual feasible for all-boxed problems.
        if (std::isfinite(lo_[j]) && std::isfinite(hi_[j]))
            state_[j] = cost_[j] >= 0.0 ? VarState::at_lower : VarState::at_upper;
        else
            place_nonbasic(j);
    }
    compute_primal();
    compute_reduced_costs();
}

void BoundedSimplex::place_nonbasic(std::size_t j) {
    if (std::isfinite(lo_[j]))
        state_[j] = VarState::at_lower;
    else if (std::isfinite(hi_[j]))
        state_[j] = VarState::at_upper;
    else
        state_[j] = VarState::at_zero;
}

void BoundedSimplex::compute_primal() {
    std::vector<std::size_t> moved;
    for (std::size_t j = 0; j < cols_; ++j) {
        switch (state_[j]) {
        case VarState::basic: continue;
        case VarState::at_lower: x_[j] = lo_[j]; break;
        case VarState::at_upper: x_[j] = hi_[j]; break;
        case VarState::at_zero: x_[j] = 0.0; break;
        }
        if (x_[j] != 0.0) moved.push_back(j);
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = &tab_[i * width_];
        double v = row[cols_];
        for (std::size_t j : moved) v -= row[j] * x_[j];
        x_[static_cast<std::size_t>(head_[i])] = v;
    }
}

void BoundedSimplex::compute_reduced_costs() {
    d_ = cost_;
    for (std::size_t i = 0; i < rows_; ++i) {
        const double cb = cost_[static_cast<std::size_t>(head_[i])];
        if (cb == 0.0) continue;
        const double* row = &tab_[i * width_];
        for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (int b : head_) d_[static_cast<std::size_t>(b)] = 0.0;
}

void BoundedSimplex::pivot(std::size_t r, std::size_t q) {
    double* pr = &tab_[r * width_];
    const double inv = 1.0 / pr[q];
    for (std::size_t k = 0; k < width_; ++k) pr[k] *= inv;
    pr[q] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r) continue;
        double* pi = &tab_[i * width_];
        const double f = pi[q];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < width_; ++k) pi[k] -= f * pr[k];
        pi[q] = 0.0;
    }
    const double dq = d_.empty() ? 0.0 : d_[q];
    if (dq != 0.0) {
        for (std::size_t k = 0; k < cols_; ++k) d_[k] -= dq * pr[k];
        d_[q] = 0.0;
    }
    ++pivots_since_refactor_;
}

void BoundedSimplex::refactor() {
    tab_ = original_;
    d_.clear(); // pivots below skip the reduced-cost update
    const std::vector<int> wanted = head_;
    std::vector<char> row_done(rows_, 0);
    std::vector<int> new_head(rows_, -1);
    for (int v : wanted) {
        const auto col = static_cast<std::size_t>(v);
        std::size_t best_row = rows_;
        double best = kSingular;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (row_done[i]) continue;
            const double a = std::abs(t(i, col));
            if (a > best) {
                best = a;
                best_row = i;
            }
        }
        if (best_row == rows_) {
            place_nonbasic(col);
            continue;
        }
        pivot(best_row, col);
        row_done[best_row] = 1;
        new_head[best_row] = v;
    }
    // Rows left without a basic column get the best available nonbasic one.
    std::vector<char> in_head(cols_, 0);
    for (int b : new_head)
        if (b >= 0) in_head[static_cast<std::size_t>(b)] = 1;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_done[i]) continue;
        std::size_t best_col = cols_;
        double best = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (in_head[j]) continue;
            const double a = std::abs(t(i, j));
            if (a > best + kTieEps) {
                best = a;
                best_col = j;
            }
        }
        if (best_col == cols_) continue; // left degenerate; caller sees numerical trouble
        pivot(i, best_col);
        row_done[i] = 1;
        new_head[i] = static_cast<int>(best_col);
        in_head[best_col] = 1;
        state_[best_col] = VarState::basic;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (new_head[i] < 0) new_head[i] = static_cast<int>(structurals_ + i);
    }
    std::vector<char> is_basic(cols_, 0);
    for (int b : new_head) is_basic[static_cast<std::size_t>(b)] = 1;
    for (std::size_t j = 0; j < cols_; ++j) {
        if (is_basic[j])
            state_[j] = VarState::basic;
        else if (state_[j] == VarState::basic)
            place_nonbasic(j);
    }
    head_ = new_head;
    pivots_since_refactor_ = 0;
    compute_primal();
    compute_reduced_costs();
}

double BoundedSimplex::infeasibility(std::size_t row) const {
    const auto b = static_cast<std::size_t>(head_[row]);
    const double v = x_[b];
    if (v < lo_[b] - tol_.feasibility) return lo_[b] - v;
    if (v > hi_[b] + tol_.feasibility) return v - hi_[b];
    return 0.0;
}

bool BoundedSimplex::dual_feasible() const {
    const double tol = 1e-7;
    for (std::size_t j = 0; j < cols_; ++j) {
        if (is_fixed(j)) continue;
        switch (state_[j]) {
        case VarState::basic: break;
        case VarState::at_lower:
            if (d_[j] < -tol) return false;
            break;
        case VarState::at_upper:
            if (d_[j] > tol) return false;
            break;
        case VarState::at_zero:
            if (std::abs(d_[j]) > tol) return false;
            break;
        }
    }
    return true;
}

LpStatus BoundedSimplex::solve_primal() {
    bool bland = false;
    int degenerate = 0;
    std::vector<double> phase_d(cols_, 0.0);
    std::vector<double> cb(rows_, 0.0);

    while (true) {
        if (iterations_ >= iteration_limit_) return LpStatus::iteration_limit;
        if (pivots_since_refactor_ >= kRefactorInterval) refactor();

        bool phase1 = false;
        for (std::size_t i = 0; i < rows_; ++i) {
            const auto b = static_cast<std::size_t>(head_[i]);
            const double v = x_[b];
            cb[i] = v < lo_[b] - tol_.feasibility ? -1.0 : (v > hi_[b] + tol_.feasibility ? 1.0 : 0.0);
            phase1 = phase1 || cb[i] != 0.0;
        }
        const std::vector<double>* dj = &d_;
        if (phase1) {
            std::fill(phase_d.begin(), phase_d.end(), 0.0);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (cb[i] == 0.0) continue;
                const double* row = &tab_[i * width_];
                for (std::size_t j = 0; j < cols_; ++j) phase_d[j] -= cb[i] * row[j];
            }
            dj = &phase_d;
        }

        std::size_t q = cols_;
        int dir = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (state_[j] == VarState::basic || is_fixed(j)) continue;
            const double d = (*dj)[j];
            int s = 0;
            if (state_[j] == VarState::at_lower) {
                if (d < -tol_.optimality) s = 1;
            } else if (state_[j] == VarState::at_upper) {
                if (d > tol_.optimality) s = -1;
            } else if (std::abs(d) > tol_.optimality) {
                s = d < 0.0 ? 1 : -1;
            }
            if (s == 0) continue;
            if (bland) {
                q = j;
                dir = s;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                q = j;
                dir = s;
            }
        }
        if (q == cols_) {
            if (phase1) return LpStatus::infeasible;
            // Basic values straight from the tableau, without the drift of
            // incremental updates.
            compute_primal();
            return LpStatus::optimal;
        }

        double step = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInfinity;
        std::size_t leave = rows_;
        VarState leave_to = VarState::at_lower;
        double leave_alpha = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = t(i, q);
            if (std::abs(a) <= tol_.pivot) continue;
            const double g = -dir * a;
            const auto b = static_cast<std::size_t>(head_[i]);
            const double v = x_[b];
            double lim;
            VarState to;
            if (g < 0.0) {
                if (phase1 && v < lo_[b] - tol_.feasibility) continue;
                if (phase1 && v > hi_[b] + tol_.feasibility) {
                    lim = (v - hi_[b]) / -g;
                    to = VarState::at_upper;
                } else if (std::isfinite(lo_[b])) {
                    lim = (v - lo_[b]) / -g;
                    to = VarState::at_lower;
                } else {
                    continue;
                }
            } else {
                if (phase1 && v > hi_[b] + tol_.feasibility) continue;
                if (phase1 && v < lo_[b] - tol_.feasibility) {
                    lim = (lo_[b] - v) / g;
                    to = VarState::at_lower;
                } else if (std::isfinite(hi_[b])) {
                    lim = (hi_[b] - v) / g;
                    to = VarState::at_upper;
                } else {
                    continue;
                }
            }
            lim = std::max(lim, 0.0);
            bool take = lim < step - kTieEps;
            if (!take && leave != rows_ && std::abs(lim - step) <= kTieEps) {
                take = bland ? head_[i] < head_[leave]
                             : (std::abs(a) > leave_alpha + kTieEps ||
                                (std::abs(std::abs(a) - leave_alpha) <= kTieEps && head_[i] < head_[leave]));
            }
            if (take) {
                step = lim;
                leave = i;
                leave_to = to;
                leave_alpha = std::abs(a);
            }
        }
        if (!std::isfinite(step)) return phase1 ? LpStatus::numerical : LpStatus::unbounded;

        ++iterations_;
        if (step > 0.0) {
            x_[q] += dir * step;
            for (std::size_t i = 0; i < rows_; ++i) {
                const double a = t(i, q);
                if (a != 0.0) x_[static_cast<std::size_t>(head_[i])] -= dir * a * step;
            }
        }
        if (step <= 1e-11) {
            if (++degenerate > kDegenerateRun) bland = true;
        } else {
            degenerate = 0;
            bland = false;
        }

        if (leave == rows_) {
            state_[q] = dir > 0 ? VarState::at_upper : VarState::at_lower;
            x_[q] = dir > 0 ? hi_[q] : lo_[q];
            continue;
        }
        const auto out = static_cast<std::size_t>(head_[leave]);
        x_[out] = leave_to == VarState::at_lower ? lo_[out] : hi_[out];
        state_[out] = leave_to;
        pivot(leave, q);
        head_[leave] = static_cast<int>(q);
        state_[q] = VarState::basic;
    }
}

LpStatus BoundedSimplex::solve_dual() {
    // Boxed columns with the wrong reduced-cost sign can simply move to
    // their other bound.
    bool moved = false;
    for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::basic || is_fixed(j)) continue;
        if (!std::isfinite(lo_[j]) || !std::isfinite(hi_[j])) continue;
        if (state_[j] != VarState::at_upper && d_[j] < -1e-7) {
            state_[j] = VarState::at_upper;
            moved = true;
        } else if (state_[j] != VarState::at_lower && d_[j] > 1e-7) {
            state_[j] = VarState::at_lower;
            moved = true;
        }
    }
    if (moved) compute_primal();
    if (!dual_feasible()) return solve_primal();

    bool bland = false;
    int degenerate = 0;
    while (true) {
        if (iterations_ >= iteration_limit_) return LpStatus::iteration_limit;
        if (pivots_since_refactor_ >= kRefactorInterval) {
            refactor();
            if (!dual_feasible()) return solve_primal();
        }

        std::size_t r = rows_;
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double inf = infeasibility(i);
            if (inf <= 0.0) continue;
            if (bland) {
                if (r == rows_ || head_[i] < head_[r]) r = i;
            } else if (inf > worst) {
                worst = inf;
                r = i;
            }
        }
        // Primal feasible: let the primal method confirm (and clean up any
        // reduced cost that drifted within tolerance).
        if (r == rows_) return solve_primal();

        const auto leaving = static_cast<std::size_t>(head_[r]);
        const double v = x_[leaving];
        const bool increase = v < lo_[leaving];
        const double target = increase ? lo_[leaving] : hi_[leaving];

        std::size_t q = cols_;
        double best_ratio = kInfinity;
        double best_alpha = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (state_[j] == VarState::basic || is_fixed(j)) continue;
            const double a = t(r, j);
            if (std::abs(a) <= tol_.pivot) continue;
            // x_r moves by -a * dx_j.
            double dabs;
            if (state_[j] == VarState::at_lower) {
                if (increase ? a >= 0.0 : a <= 0.0) continue;
                dabs = std::max(d_[j], 0.0);
            } else if (state_[j] == VarState::at_upper) {
                if (increase ? a <= 0.0 : a >= 0.0) continue;
                dabs = std::max(-d_[j], 0.0);
            } else {
                dabs = std::abs(d_[j]);
            }
            const double ratio = dabs / std::abs(a);
            bool take = ratio < best_ratio - kTieEps;
            if (!take && !bland && std::abs(ratio - best_ratio) <= kTieEps)
                take = std::abs(a) > best_alpha + kTieEps;
            if (take) {
                best_ratio = ratio;
                best_alpha = std::abs(a);
                q = j;
            }
        }
        if (q == cols_) return LpStatus::infeasible;

        ++iterations_;
        const double dx = (v - target) / t(r, q);
        x_[q] += dx;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = t(i, q);
            if (a != 0.0) x_[static_cast<std::size_t>(head_[i])] -= a * dx;
        }
        x_[leaving] = target;
        state_[leaving] = increase ? VarState::at_lower : VarState::at_upper;
        if (best_ratio <= 1e-11) {
            if (++degenerate > kDegenerateRun) bland = true;
        } else {
            degenerate = 0;
            bland = false;
        }
        pivot(r, q);
        head_[r] = static_cast<int>(q);
        state_[q] = VarState::basic;
    }
}

void BoundedSimplex::set_bounds(int var, double lower, double upper) {
    const auto j = static_cast<std::size_t>(var);
    if (lo_[j] == lower && hi_[j] == upper) return;
    lo_[j] = lower;
    hi_[j] = upper;
    if (state_[j] == VarState::basic) return;
    if (lower == upper) {
        state_[j] = VarState::at_lower;
    } else if ((state_[j] == VarState::at_lower && !std::isfinite(lower)) ||
               (state_[j] == VarState::at_upper && !std::isfinite(upper))) {
        place_nonbasic(j);
    }
    const double target = state_[j] == VarState::at_lower   ? lower
                          : state_[j] == VarState::at_upper ? upper
                                                            : 0.0;
    const double delta = target - x_[j];
    if (delta == 0.0) return;
    x_[j] = target;
    for (std::size_t i = 0; i < rows_; ++i) {
        const double a = t(i, j);
        if (a != 0.0) x_[static_cast<std::size_t>(head_[i])] -= a * delta;
    }
}

void BoundedSimplex::reset_structural_bounds() {
    for (std::size_t j = 0; j < structurals_; ++j) {
        const auto& v = problem_->variables()[j];
        set_bounds(static_cast<int>(j), v.lower, v.upper);
    }
}

Basis BoundedSimplex::basis() const { return {head_, state_}; }

void BoundedSimplex::load_basis(const Basis& target) {
    std::vector<char> wanted(cols_, 0);
    for (int b : target.head) wanted[static_cast<std::size_t>(b)] = 1;
    bool ok = true;
    for (int b : target.head) {
        const auto col = static_cast<std::size_t>(b);
        if (state_[col] == VarState::basic) continue;
        std::size_t best_row = rows_;
        double best = 1e-7;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (wanted[static_cast<std::size_t>(head_[i])]) continue;
            const double a = std::abs(t(i, col));
            if (a > best) {
                best = a;
                best_row = i;
            }
        }
        if (best_row == rows_) {
            ok = false;
            break;
        }
        const auto out = static_cast<std::size_t>(head_[best_row]);
        pivot(best_row, col);
        head_[best_row] = b;
        state_[col] = VarState::basic;
        state_[out] = VarState::at_lower; // overwritten below
    }
    if (!ok) {
        head_ = target.head;
        state_ = target.state;
        refactor();
        return;
    }
    for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::basic) continue;
        state_[j] = target.state[j] == VarState::basic ? VarState::at_lower : target.state[j];
        if ((state_[j] == VarState::at_lower && !std::isfinite(lo_[j])) ||
            (state_[j] == VarState::at_upper && !std::isfinite(hi_[j])))
            place_nonbasic(j);
    }
    if (pivots_since_refactor_ >= kRefactorInterval)
        refactor();
    else
        compute_primal();
}

double BoundedSimplex::objective() const {
    double obj = 0.0;
    for (std::size_t j = 0; j < structurals_; ++j) obj += cost_[j] * x_[j];
    return obj;
}

std::vector<double> BoundedSimplex::structural_values() const {
    return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(structurals_)};
}

} // namespace restopath::milp::detail
