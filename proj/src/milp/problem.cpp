#include "milp/problem.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace restopath::milp {

std::string_view to_string(Status status) {
    switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::node_limit: return "node_limit";
    case Status::numerical_failure: return "numerical_failure";
    }
    return "numerical_failure";
}

int Problem::add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (kind == VarKind::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    const int index = static_cast<int>(variables_.size());
    if (name.empty()) name = "x" + std::to_string(index);
    if (!by_name_.emplace(name, index).second)
        throw ValidationError("duplicate variable name '" + name + "'");
    variables_.push_back({std::move(name), kind, lower, upper});
    objective_.push_back(0.0);
    return index;
}

int Problem::add_constraint(Constraint constraint) {
    std::sort(constraint.terms.begin(), constraint.terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const Term& t : constraint.terms) {
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= variables_.size())
            throw ValidationError("constraint references unknown variable index " + std::to_string(t.var));
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    constraint.terms = std::move(merged);
    constraints_.push_back(std::move(constraint));
    return static_cast<int>(constraints_.size()) - 1;
}

int Problem::add_constraint(const std::map<std::string, double>& coefficients, Sense sense, double rhs,
                            std::string name) {
    Constraint c;
    c.sense = sense;
    c.rhs = rhs;
    c.name = std::move(name);
    for (const auto& [var, coef] : coefficients) {
        int index = find(var);
        if (index < 0) throw ValidationError("unknown variable '" + var + "'");
        c.terms.push_back({index, coef});
    }
    return add_constraint(std::move(c));
}

void Problem::set_objective(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }

void Problem::set_bounds(int var, double lower, double upper) {
    auto& v = variables_.at(static_cast<std::size_t>(var));
    v.lower = lower;
    v.upper = upper;
}

int Problem::find(std::string_view name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

void Problem::check() const {
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& v = variables_[j];
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
            v.lower == kInfinity || v.upper == -kInfinity)
            throw ValidationError("variable '" + v.name + "' has invalid bounds");
        if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
            throw ValidationError("binary variable '" + v.name + "' must lie in [0, 1]");
        if (!std::isfinite(objective_[j]))
            throw ValidationError("objective coefficient of '" + v.name + "' is not finite");
    }
    for (const auto& c : constraints_) {
        if (!std::isfinite(c.rhs)) throw ValidationError("constraint '" + c.name + "' has non-finite rhs");
        for (const auto& t : c.terms)
            if (!std::isfinite(t.coef))
                throw ValidationError("constraint '" + c.name + "' has a non-finite coefficient");
    }
}

Problem add_constraint(Problem problem, Constraint constraint) {
    problem.add_constraint(std::move(constraint));
    return problem;
}

double max_violation(const Problem& problem, const std::vector<double>& values) {
    double worst = 0.0;
    for (std::size_t j = 0; j < problem.num_variables(); ++j) {
        const auto& v = problem.variables()[j];
        worst = std::max({worst, v.lower - values[j], values[j] - v.upper});
    }
    for (const auto& c : problem.constraints()) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
        switch (c.sense) {
        case Sense::less_equal: worst = std::max(worst, lhs - c.rhs); break;
        case Sense::greater_equal: worst = std::max(worst, c.rhs - lhs); break;
        case Sense::equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

} // namespace restopath::milp
