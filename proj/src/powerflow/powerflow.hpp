#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grid/network.hpp"

namespace restopath::pf {

enum class BusType { slack, pq };

struct PFBus {
    int id = 0;
    BusType type = BusType::pq;
    double v_set = 1.0;   // slack only
    double p_load_mw = 0.0;
    double q_load_mvar = 0.0;
};

struct PFBranch {
    int id = 0;
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double b = 0.0; // total charging, split between the two ends
};

/// One connected energized network with exactly one slack bus.
struct PFCase {
    std::vector<PFBus> buses;
    std::vector<PFBranch> branches;
    double base_mva = 100.0;
};

struct PFResult {
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0; // p.u.
    std::map<int, double> v_mag;
    std::map<int, double> v_ang; // rad
    double slack_p_mw = 0.0;
    double slack_q_mvar = 0.0;
};

/// Energized network after switching in `scheme_lines`: energized real
/// branches plus the scheme, virtual branches excluded. One case per connected
/// component that holds a scheme line. The slack is the supply bus when it is
/// in the component, otherwise the component's black-start unit, otherwise its
/// lowest generator bus, otherwise its lowest bus.
std::vector<PFCase> build_energized_cases(const grid::Scenario& scenario,
                                          std::span<const int> scheme_lines,
                                          double slack_voltage = 1.0);

/// Polar Newton-Raphson system for one case. State is the angles of all
/// non-slack buses followed by their magnitudes, in case bus order.
class NewtonSystem {
public:
    explicit NewtonSystem(const PFCase& pf_case);

    int size() const { return 2 * static_cast<int>(pq_.size()); }
    Eigen::VectorXd flat_start() const;
    /// Specified minus computed injections, P rows then Q rows.
    Eigen::VectorXd mismatch(const Eigen::VectorXd& state) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& state) const;

    /// Complex voltages for a state vector.
    Eigen::VectorXcd voltages(const Eigen::VectorXd& state) const;
    const Eigen::MatrixXcd& admittance() const { return ybus_; }
    const PFCase& pf_case() const { return case_; }
    int slack_index() const { return slack_; }

private:
    PFCase case_;
    Eigen::MatrixXcd ybus_;
    Eigen::VectorXd p_spec_;
    Eigen::VectorXd q_spec_;
    std::vector<int> pq_; // case bus positions of non-slack buses
    int slack_ = 0;
};

PFResult newton_solve(const PFCase& pf_case, double tol = 1e-8, int max_iter = 50);

struct VoltageCheck {
    bool pass = true;
    bool diverged = false;
    std::vector<int> violating; // bus ids outside [v_min, v_max]
    double v_lowest = 1.0;
    double v_highest = 1.0;
};

VoltageCheck check_voltage(std::span<const PFResult> results, double v_min, double v_max);

} // namespace restopath::pf
