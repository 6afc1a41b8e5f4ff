#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "powerflow/powerflow.hpp"
#include "test_support.hpp"
#include "../oracles/random_pf.hpp"

using namespace restopath;
using namespace restopath::pf;

namespace {

PFCase two_bus(double r, double x, double b) {
    PFCase c;
    c.buses = {{1, BusType::slack, 1.0, 0.0, 0.0}, {2, BusType::pq, 1.0, 0.0, 0.0}};
    c.branches = {{1, 1, 2, r, x, b}};
    return c;
}

} // namespace

TEST_CASE("open-ended line: receiving-end rise matches the closed form") {
    for (const auto& [r, x, b] : {std::tuple{0.0035, 0.0411, 0.6987}, std::tuple{0.001, 0.0250, 0.75},
                                  std::tuple{0.02, 0.1, 0.1}, std::tuple{0.0, 0.05, 0.0}}) {
        const auto res = newton_solve(two_bus(r, x, b));
        REQUIRE(res.converged);
        const double expected = 1.0 / std::abs(std::complex<double>(1.0 - x * b / 2.0, r * b / 2.0));
        CHECK(std::abs(res.v_mag.at(2) - expected) < 1e-6);
        CHECK(res.v_mag.at(1) == 1.0);
    }
}

TEST_CASE("Jacobian matches central differences of the mismatch") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = oracle::random_pf_case(rng, 6);
        const NewtonSystem sys(c);
        Eigen::VectorXd x = sys.flat_start();
        std::uniform_real_distribution<double> jitter(-0.05, 0.05);
        for (int i = 0; i < x.size(); ++i) x[i] += jitter(rng);

        const Eigen::MatrixXd j = sys.jacobian(x);
        const double h = 1e-6;
        Eigen::MatrixXd fd(x.size(), x.size());
        for (int k = 0; k < x.size(); ++k) {
            Eigen::VectorXd up = x, dn = x;
            up[k] += h;
            dn[k] -= h;
            // The mismatch is specified minus computed.
            fd.col(k) = -(sys.mismatch(up) - sys.mismatch(dn)) / (2 * h);
        }
        const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
        CHECK((j - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
}

TEST_CASE("converged cases balance generation, load and losses") {
    std::mt19937 rng(23);
    int converged = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = oracle::random_pf_case(rng, 7);
        const auto res = newton_solve(c);
        if (!res.converged) continue;
        ++converged;
        CHECK(res.max_mismatch < 1e-8);
        const auto bal = oracle::power_balance(c, res);
        CHECK(std::abs(bal.p_residual_mw) < 1e-6 * c.base_mva);
        CHECK(std::abs(bal.q_residual_mvar) < 1e-6 * c.base_mva);
    }
    CHECK(converged >= 45);
}

TEST_CASE("bus order does not change the solution") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = oracle::random_pf_case(rng, 6);
        const auto a = newton_solve(c);
        std::reverse(c.buses.begin(), c.buses.end());
        std::reverse(c.branches.begin(), c.branches.end());
        const auto b = newton_solve(c);
        REQUIRE(a.converged == b.converged);
        for (const auto& [bus, vm] : a.v_mag) CHECK(std::abs(vm - b.v_mag.at(bus)) < 1e-9);
    }
}

TEST_CASE("an overloaded feeder does not converge") {
    auto c = two_bus(0.05, 0.5, 0.0);
    c.buses[1].p_load_mw = 500.0;
    const auto res = newton_solve(c);
    CHECK_FALSE(res.converged);
    const std::vector<PFResult> results{res};
    const auto vc = check_voltage(results, 0.9, 1.1);
    CHECK(vc.diverged);
    CHECK_FALSE(vc.pass);
}

TEST_CASE("voltage limits are inclusive") {
    PFResult r;
    r.converged = true;
    r.v_mag = {{1, 0.9}, {2, 1.1}, {3, 1.0}};
    const std::vector<PFResult> ok{r};
    CHECK(check_voltage(ok, 0.9, 1.1).pass);
    r.v_mag[4] = 1.1000001;
    const std::vector<PFResult> high{r};
    const auto vc = check_voltage(high, 0.9, 1.1);
    CHECK_FALSE(vc.pass);
    CHECK(vc.violating == std::vector<int>{4});
    CHECK(vc.v_lowest == 0.9);
}

TEST_CASE("energized cases from a scenario") {
    const auto s = testing::fixture("ieee39_case1.json");
    // 33-19, 19-16, 16-17: one component with the supply bus as slack.
    std::vector<int> lines;
    for (const auto& br : s.network.branches()) {
        const std::set<std::pair<int, int>> want{{19, 33}, {16, 19}, {16, 17}};
        if (want.contains({std::min(br.from_bus, br.to_bus), std::max(br.from_bus, br.to_bus)}))
            lines.push_back(br.id);
    }
    REQUIRE(lines.size() == 3);
    const auto cases = build_energized_cases(s, lines);
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].buses.size() == 4);
    CHECK(cases[0].branches.size() == 3);
    const auto slack = std::find_if(cases[0].buses.begin(), cases[0].buses.end(),
                                    [](const PFBus& b) { return b.type == BusType::slack; });
    CHECK(slack->id == 33);
    const auto res = newton_solve(cases[0]);
    CHECK(res.converged);
    CHECK(res.v_mag.at(17) > 1.0);

    // Islands untouched by the scheme get no case; virtual branches carry no power.
    const auto three = grid::transform_islands(testing::fixture("ieee39_three_islands.json"));
    const auto cs = build_energized_cases(three, lines);
    REQUIRE(cs.size() == 1);
    for (const auto& br : cs[0].branches) CHECK(br.id <= 46);
}
