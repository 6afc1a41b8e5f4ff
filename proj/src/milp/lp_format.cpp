#include <cmath>
#include <sstream>

#include "milp/problem.hpp"

namespace restopath::milp {

namespace {

void write_terms(std::ostringstream& os, const Problem& p, const std::vector<Term>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        const double c = t.coef;
        if (first)
            os << (c < 0 ? "- " : "");
        else
            os << (c < 0 ? " - " : " + ");
        if (std::abs(c) != 1.0) os << std::abs(c) << ' ';
        os << p.variable(t.var).name;
        first = false;
    }
    if (first) os << "0";
}

} // namespace

std::string to_lp_format(const Problem& p) {
    std::ostringstream os;
    os.precision(12);
    os << "Minimize\n obj: ";
    std::vector<Term> obj;
    for (std::size_t j = 0; j < p.num_variables(); ++j)
        if (p.objective()[j] != 0.0) obj.push_back({static_cast<int>(j), p.objective()[j]});
    write_terms(os, p, obj);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
        const auto& c = p.constraints()[i];
        os << ' ' << (c.name.empty() ? "r" + std::to_string(i) : c.name) << ": ";
        write_terms(os, p, c.terms);
        switch (c.sense) {
        case Sense::less_equal: os << " <= "; break;
        case Sense::greater_equal: os << " >= "; break;
        case Sense::equal: os << " = "; break;
        }
        os << c.rhs << '\n';
    }
    os << "Bounds\n";
    for (const auto& v : p.variables()) {
        if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) continue;
        if (v.lower == v.upper) {
            os << ' ' << v.name << " = " << v.lower << '\n';
            continue;
        }
        os << ' ';
        if (std::isfinite(v.lower))
            os << v.lower;
        else
            os << "-inf";
        os << " <= " << v.name << " <= ";
        if (std::isfinite(v.upper))
            os << v.upper;
        else
            os << "+inf";
        os << '\n';
    }
    bool any_binary = false;
    for (const auto& v : p.variables()) {
        if (v.kind != VarKind::binary) continue;
        if (!any_binary) os << "Binaries\n";
        any_binary = true;
        os << ' ' << v.name << '\n';
    }
    os << "End\n";
    return os.str();
}

} // namespace restopath::milp
