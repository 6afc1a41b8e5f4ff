#include "powerflow/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <set>
#include <string>

#include "common/error.hpp"

namespace restopath::pf {

using cd = std::complex<double>;

namespace {

int pick_slack(const grid::Scenario& s, const std::vector<int>& component) {
    const std::set<int> members(component.begin(), component.end());
    if (members.contains(s.supply_bus)) return s.supply_bus;
    int lowest_gen = -1;
    for (const auto& g : s.network.generators()) {
        if (!members.contains(g.bus)) continue;
        if (g.is_blackstart) return g.bus;
        if (lowest_gen < 0 || g.bus < lowest_gen) lowest_gen = g.bus;
    }
    return lowest_gen >= 0 ? lowest_gen : component.front();
}

} // namespace

std::vector<PFCase> build_energized_cases(const grid::Scenario& s, std::span<const int> scheme_lines,
                                          double slack_voltage) {
    const std::set<int> scheme(scheme_lines.begin(), scheme_lines.end());
    std::vector<const grid::Branch*> in_service;
    std::set<int> buses = s.state.energized_buses;
    for (const auto& br : s.network.branches()) {
        const bool live = br.status == grid::BranchStatus::energized || scheme.contains(br.id);
        if (!live) continue;
        in_service.push_back(&br);
        buses.insert(br.from_bus);
        buses.insert(br.to_bus);
    }
    for (int id : scheme) {
        if (!s.network.has_branch(id))
            throw ValidationError("scheme line " + std::to_string(id) + " does not exist");
    }

    std::map<int, std::vector<const grid::Branch*>> adj;
    for (const auto* br : in_service) {
        adj[br->from_bus].push_back(br);
        adj[br->to_bus].push_back(br);
    }

    std::vector<PFCase> cases;
    std::set<int> seen;
    for (int start : buses) {
        if (seen.contains(start)) continue;
        std::vector<int> comp;
        std::set<int> comp_branches;
        std::deque<int> queue{start};
        seen.insert(start);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            comp.push_back(u);
            for (const auto* br : adj[u]) {
                comp_branches.insert(br->id);
                const int v = br->other(u);
                if (seen.insert(v).second) queue.push_back(v);
            }
        }
        const bool touched = std::any_of(comp_branches.begin(), comp_branches.end(),
                                         [&](int id) { return scheme.contains(id); });
        if (!touched) continue;
        std::sort(comp.begin(), comp.end());

        PFCase c;
        c.base_mva = s.params.base_mva;
        const int slack = pick_slack(s, comp);
        for (int id : comp) {
            const auto& bus = s.network.bus(id);
            PFBus b;
            b.id = id;
            b.type = id == slack ? BusType::slack : BusType::pq;
            b.v_set = slack_voltage;
            b.p_load_mw = bus.load_mw;
            b.q_load_mvar = bus.load_mvar;
            c.buses.push_back(b);
        }
        for (const auto& br : s.network.branches()) {
            if (!comp_branches.contains(br.id)) continue;
            c.branches.push_back({br.id, br.from_bus, br.to_bus, br.series_r, br.series_x, br.shunt_b});
        }
        cases.push_back(std::move(c));
    }
    return cases;
}

NewtonSystem::NewtonSystem(const PFCase& pf_case) : case_(pf_case) {
    const int n = static_cast<int>(case_.buses.size());
    std::map<int, int> pos;
    int slacks = 0;
    for (int i = 0; i < n; ++i) {
        pos[case_.buses[static_cast<std::size_t>(i)].id] = i;
        if (case_.buses[static_cast<std::size_t>(i)].type == BusType::slack) {
            slack_ = i;
            ++slacks;
        } else {
            pq_.push_back(i);
        }
    }
    if (slacks != 1) throw ValidationError("power-flow case needs exactly one slack bus");

    ybus_ = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : case_.branches) {
        if (!pos.contains(br.from) || !pos.contains(br.to))
            throw ValidationError("branch " + std::to_string(br.id) + " leaves the case");
        if (br.r == 0.0 && br.x == 0.0)
            throw ValidationError("branch " + std::to_string(br.id) + " has zero impedance");
        const cd ys = 1.0 / cd(br.r, br.x);
        const cd ysh(0.0, br.b / 2.0);
        const int f = pos[br.from];
        const int t = pos[br.to];
        ybus_(f, f) += ys + ysh;
        ybus_(t, t) += ys + ysh;
        ybus_(f, t) -= ys;
        ybus_(t, f) -= ys;
    }

    p_spec_.resize(n);
    q_spec_.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& b = case_.buses[static_cast<std::size_t>(i)];
        p_spec_(i) = -b.p_load_mw / case_.base_mva;
        q_spec_(i) = -b.q_load_mvar / case_.base_mva;
    }
}

Eigen::VectorXd NewtonSystem::flat_start() const {
    const int m = static_cast<int>(pq_.size());
    Eigen::VectorXd x(2 * m);
    x.head(m).setZero();
    x.tail(m).setOnes();
    return x;
}

Eigen::VectorXcd NewtonSystem::voltages(const Eigen::VectorXd& x) const {
    const int n = static_cast<int>(case_.buses.size());
    const int m = static_cast<int>(pq_.size());
    Eigen::VectorXcd v(n);
    v(slack_) = cd(case_.buses[static_cast<std::size_t>(slack_)].v_set, 0.0);
    for (int k = 0; k < m; ++k) v(pq_[static_cast<std::size_t>(k)]) = std::polar(x(m + k), x(k));
    return v;
}

Eigen::VectorXd NewtonSystem::mismatch(const Eigen::VectorXd& x) const {
    const Eigen::VectorXcd v = voltages(x);
    const Eigen::VectorXcd s = v.cwiseProduct((ybus_ * v).conjugate());
    const int m = static_cast<int>(pq_.size());
    Eigen::VectorXd f(2 * m);
    for (int k = 0; k < m; ++k) {
        const int i = pq_[static_cast<std::size_t>(k)];
        f(k) = p_spec_(i) - s(i).real();
        f(m + k) = q_spec_(i) - s(i).imag();
    }
    return f;
}

// Derivative of the computed injections P, Q with respect to the state;
// the mismatch derivative is its negative.
Eigen::MatrixXd NewtonSystem::jacobian(const Eigen::VectorXd& x) const {
    const Eigen::VectorXcd v = voltages(x);
    const Eigen::VectorXcd ibus = ybus_ * v;
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd vnorm(n);
    for (int i = 0; i < n; ++i) vnorm(i) = v(i) / std::abs(v(i));

    const cd j(0.0, 1.0);
    Eigen::MatrixXcd ds_da(n, n);
    Eigen::MatrixXcd ds_dm(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const cd diag_i = r == c ? ibus(r) : cd(0.0);
            ds_da(r, c) = j * v(r) * std::conj(diag_i - ybus_(r, c) * v(c));
            ds_dm(r, c) = v(r) * std::conj(ybus_(r, c) * vnorm(c)) +
                          (r == c ? std::conj(ibus(r)) * vnorm(r) : cd(0.0));
        }
    }
    const int m = static_cast<int>(pq_.size());
    Eigen::MatrixXd jac(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        const int r = pq_[static_cast<std::size_t>(a)];
        for (int b = 0; b < m; ++b) {
            const int c = pq_[static_cast<std::size_t>(b)];
            jac(a, b) = ds_da(r, c).real();
            jac(a, m + b) = ds_dm(r, c).real();
            jac(m + a, b) = ds_da(r, c).imag();
            jac(m + a, m + b) = ds_dm(r, c).imag();
        }
    }
    return jac;
}

PFResult newton_solve(const PFCase& pf_case, double tol, int max_iter) {
    const NewtonSystem sys(pf_case);
    Eigen::VectorXd x = sys.flat_start();
    PFResult out;
    Eigen::VectorXd f = sys.mismatch(x);
    out.max_mismatch = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    while (out.max_mismatch > tol && out.iterations < max_iter) {
        const Eigen::VectorXd dx = sys.jacobian(x).partialPivLu().solve(f);
        if (!dx.allFinite()) break;
        x += dx;
        ++out.iterations;
        f = sys.mismatch(x);
        if (!f.allFinite()) break;
        out.max_mismatch = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    }
    out.converged = std::isfinite(out.max_mismatch) && out.max_mismatch <= tol && x.allFinite();

    const Eigen::VectorXcd v = sys.voltages(x);
    for (std::size_t i = 0; i < pf_case.buses.size(); ++i) {
        out.v_mag[pf_case.buses[i].id] = std::abs(v(static_cast<int>(i)));
        out.v_ang[pf_case.buses[i].id] = std::arg(v(static_cast<int>(i)));
    }
    const int sl = sys.slack_index();
    const cd s_slack = v(sl) * std::conj((sys.admittance() * v)(sl));
    const auto& slack_bus = pf_case.buses[static_cast<std::size_t>(sl)];
    out.slack_p_mw = s_slack.real() * pf_case.base_mva + slack_bus.p_load_mw;
    out.slack_q_mvar = s_slack.imag() * pf_case.base_mva + slack_bus.q_load_mvar;
    return out;
}

VoltageCheck check_voltage(std::span<const PFResult> results, double v_min, double v_max) {
    VoltageCheck out;
    bool first = true;
    for (const auto& r : results) {
        if (!r.converged) {
            out.diverged = true;
            out.pass = false;
            continue;
        }
        for (const auto& [bus, vm] : r.v_mag) {
            if (first) {
                out.v_lowest = out.v_highest = vm;
                first = false;
            }
            out.v_lowest = std::min(out.v_lowest, vm);
            out.v_highest = std::max(out.v_highest, vm);
            if (vm < v_min || vm > v_max) {
                out.violating.push_back(bus);
                out.pass = false;
            }
        }
    }
    std::sort(out.violating.begin(), out.violating.end());
    return out;
}

} // namespace restopath::pf
