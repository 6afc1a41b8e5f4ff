#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace restopath::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { less_equal, equal, greater_equal };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = kInfinity;
};

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::vector<Term> terms;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
    std::string name;
};

/// A minimization MILP over continuous and binary variables.
class Problem {
public:
    int add_variable(std::string name, VarKind kind, double lower = 0.0, double upper = kInfinity);
    int add_binary(std::string name) { return add_variable(std::move(name), VarKind::binary, 0.0, 1.0); }
    int add_continuous(std::string name, double lower = 0.0, double upper = kInfinity) {
        return add_variable(std::move(name), VarKind::continuous, lower, upper);
    }

    /// Index-based constraint. Duplicate variables in `terms` are merged.
    int add_constraint(Constraint constraint);

    /// Name-based constraint; throws ValidationError on an unknown name.
    int add_constraint(const std::map<std::string, double>& coefficients, Sense sense, double rhs,
                       std::string name = {});

    void set_objective(int var, double coef);
    void set_bounds(int var, double lower, double upper);

    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<double>& objective() const { return objective_; }
    const Variable& variable(int var) const { return variables_.at(static_cast<std::size_t>(var)); }

    int find(std::string_view name) const;

    /// Throws ValidationError if bounds or coefficients are malformed.
    void check() const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<double> objective_;
    std::map<std::string, int, std::less<>> by_name_;
};

/// Functional form: returns a copy of `problem` with `constraint` appended.
Problem add_constraint(Problem problem, Constraint constraint);

enum class Status { optimal, infeasible, unbounded, node_limit, numerical_failure };

std::string_view to_string(Status status);

struct Solution {
    Status status = Status::infeasible;
    double objective_value = 0.0;
    std::vector<double> values;
    long node_count = 0;
    long lp_iterations = 0;
};

struct Tolerances {
    double feasibility = 1e-7;
    double optimality = 1e-9;
    double pivot = 1e-9;
    double integrality = 1e-6;
};

struct LpOptions {
    Tolerances tol;
    long iteration_limit = 200000;
};

struct MilpOptions {
    Tolerances tol;
    long node_limit = 2000000;
    long iteration_limit = 200000; // per LP
};

/// Solves the LP relaxation (binaries relaxed to [0, 1]).
Solution solve_lp(const Problem& problem, const LpOptions& options = {});

/// Exact branch and bound over the binary variables.
Solution solve_milp(const Problem& problem, const MilpOptions& options = {});

/// Largest absolute violation of any row or bound by `values`.
double max_violation(const Problem& problem, const std::vector<double>& values);

/// Human-readable LP-format dump (objective, rows, bounds, binaries).
std::string to_lp_format(const Problem& problem);

} // namespace restopath::milp
