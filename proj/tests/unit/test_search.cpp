#include <doctest.h>

#include <algorithm>
#include <random>

#include "common/error.hpp"
#include "milp/problem.hpp"
#include "search/path_model.hpp"
#include "search/search.hpp"
#include "test_support.hpp"
#include "../oracles/random_scenarios.hpp"
#include "../oracles/steiner_enum.hpp"

using namespace restopath;
using namespace restopath::search;
using testing::fixture;
using testing::line;

namespace {

SearchOptions no_checks(int k) {
    SearchOptions o;
    o.max_schemes = k;
    o.check_depth = false;
    o.check_reactive = false;
    o.check_voltage = false;
    return o;
}

bool strict_subset(const std::vector<int>& a, const std::vector<int>& b) {
    return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

TEST_CASE("subtree grower agrees with subset enumeration") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = std::uniform_int_distribution<int>(3, 7)(rng);
        const auto g = oracle::random_connected_graph(rng, n, 11);
        const auto targets = oracle::random_targets(rng, n, std::min(n - 1, 3));
        const auto grown = oracle::steiner_trees(1, targets, g.edges);
        const auto subsets = oracle::steiner_trees_by_subsets(1, targets, g.edges);
        REQUIRE(grown.size() == subsets.size());
        std::vector<std::vector<int>> a, b;
        for (const auto& t : grown) a.push_back(t.edges);
        for (const auto& t : subsets) b.push_back(t.edges);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("k cheapest schemes on random graphs match the Steiner oracle") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = std::uniform_int_distribution<int>(4, 9)(rng);
        const auto g = oracle::random_connected_graph(rng, n, 14);
        const int nt = std::uniform_int_distribution<int>(2, std::min(4, n - 1))(rng);
        const auto targets = oracle::random_targets(rng, n, nt);
        const auto scenario = oracle::scenario_from_graph(g, targets, 5);
        const auto expected = oracle::steiner_trees(1, targets, g.edges);
        const auto trace = iterate_schemes(scenario, no_checks(5));
        CAPTURE(trial);

        const std::size_t k = std::min<std::size_t>(5, expected.size());
        REQUIRE(trace.schemes.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(trace.schemes[i].objective_mvar == expected[i].weight);
            const bool known = std::any_of(expected.begin(), expected.end(),
                                           [&](const oracle::Tree& t) { return t.edges == trace.schemes[i].lines; });
            CHECK(known);
        }
        CHECK(trace.terminated_by == (expected.size() > 5 ? Termination::found_m_s : Termination::infeasible));
    }
}

TEST_CASE("single target reduces to a shortest path") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = std::uniform_int_distribution<int>(3, 10)(rng);
        const auto g = oracle::random_connected_graph(rng, n, 16);
        const int target = std::uniform_int_distribution<int>(2, n)(rng);
        const auto scenario = oracle::scenario_from_graph(g, {target}, 1);
        const auto trace = single_target_path(scenario, target, no_checks(1));
        REQUIRE(trace.schemes.size() == 1);
        CHECK(trace.schemes[0].objective_mvar == oracle::shortest_path(1, target, g.edges));
    }
}

TEST_CASE("branching instance: first scheme, depths and flows") {
    const auto s = testing::branching_instance();
    const auto trace = iterate_schemes(s, no_checks(1));
    REQUIRE(trace.schemes.size() == 1);
    const Scheme& first = trace.schemes[0];
    CHECK(first.lines == std::vector<int>{1, 2, 3, 4, 5, 7, 8});
    CHECK(first.objective_mvar == 60.0);
    CHECK(first.depth_per_target == std::map<int, int>{{4, 3}, {6, 4}, {8, 3}});
    CHECK(first.max_depth == 4);
    // Line 1 carries all three targets, 2-7 one, oriented from_bus -> to_bus.
    CHECK(first.flows.at(1) == 3.0);
    CHECK(first.flows.at(2) == 2.0);
    CHECK(first.flows.at(8) == 1.0);
    CHECK(first.flows.at(5) == 1.0);
}

TEST_CASE("naive cut admits a superset, the exclusion cut does not") {
    const auto s = testing::branching_instance();

    auto run = [&](bool naive) {
        PathModel m = build_path_model(s);
        std::vector<std::vector<int>> seen;
        for (int i = 0; i < 40; ++i) {
            const auto sol = milp::solve_milp(m.problem);
            if (sol.status != milp::Status::optimal) break;
            const auto raw = selected_lines(m, sol.values);
            seen.push_back(raw);
            if (naive)
                add_naive_cut(m, raw);
            else
                add_exclusion_cut(m, raw);
        }
        return seen;
    };
    auto has_superset = [](const std::vector<std::vector<int>>& seen) {
        for (std::size_t j = 0; j < seen.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (strict_subset(seen[i], seen[j])) return true;
        return false;
    };

    const auto naive = run(true);
    const auto exclusion = run(false);
    CHECK(has_superset(naive));
    CHECK_FALSE(has_superset(exclusion));

    // With minimalization every minimal tree turns up exactly once.
    std::vector<oracle::Edge> edges;
    for (const auto& br : s.network.branches()) edges.push_back({br.id, br.from_bus, br.to_bus, br.charging_mvar});
    const auto trees = oracle::steiner_trees(1, s.targets, edges);
    const auto trace = iterate_schemes(s, no_checks(50));
    REQUIRE(trace.schemes.size() == trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) CHECK(trace.schemes[i].objective_mvar == trees[i].weight);
}

TEST_CASE("path model rows") {
    const auto s = testing::branching_instance();
    const PathModel m = build_path_model(s);
    CHECK(m.big_u == 3);
    CHECK(m.demand.at(1) == -3);
    CHECK(m.demand.at(4) == 1);
    CHECK(m.demand.at(5) == 0);
    CHECK(m.candidate_lines.size() == 10);
    for (int id : m.candidate_lines) CHECK(m.problem.find("z_" + std::to_string(id)) >= 0);
    int use_rows = 0, cap_rows = 0, bal_rows = 0;
    for (const auto& c : m.problem.constraints()) {
        use_rows += c.name.rfind("use_", 0) == 0 ? 1 : 0;
        cap_rows += c.name.rfind("cap_", 0) == 0 ? 1 : 0;
        bal_rows += c.name.rfind("bal_", 0) == 0 ? 1 : 0;
    }
    CHECK(use_rows == 10);
    CHECK(cap_rows == 10);
    CHECK(bal_rows == 9);
}

TEST_CASE("exclusion cut input checks") {
    auto m = build_path_model(testing::branching_instance());
    CHECK_THROWS_AS(add_exclusion_cut(m, std::vector<int>{}), ValidationError);
    CHECK_THROWS_AS(add_exclusion_cut(m, std::vector<int>{99}), ValidationError);
    add_exclusion_cut(m, std::vector<int>{1, 2});
    CHECK(m.cuts == 1);
    CHECK(m.problem.constraints().back().name == "cut_1");
    CHECK(m.problem.constraints().back().rhs == -1.0);
}

TEST_CASE("failed lines are never selected") {
    auto s = testing::branching_instance();
    auto br = s.network.branch(2);
    br.status = grid::BranchStatus::failed;
    s.network = s.network.with_branch(br);
    s.state.failed_branches = {2};
    const auto trace = iterate_schemes(s, no_checks(8));
    REQUIRE(!trace.schemes.empty());
    for (const auto& sc : trace.schemes) CHECK(std::find(sc.lines.begin(), sc.lines.end(), 2) == sc.lines.end());
    // 1-9-4 is now the only way to 4.
    CHECK(trace.schemes[0].lines.front() == 1);
}

TEST_CASE("unreachable target") {
    auto s = testing::small_scenario(4, {line(1, 1, 2, 5), line(2, 3, 4, 5)}, {2, 4});
    CHECK_THROWS_AS(iterate_schemes(s, no_checks(2)), UnsolvableError);
}

TEST_CASE("targets already in the zone give one empty scheme") {
    auto s = testing::branching_instance();
    s.targets.clear();
    const auto trace = iterate_schemes(s, no_checks(3));
    REQUIRE(trace.schemes.size() == 1);
    CHECK(trace.schemes[0].lines.empty());
    CHECK(trace.schemes[0].objective_mvar == 0.0);
    CHECK(trace.terminated_by == Termination::infeasible);
}

TEST_CASE("progress callback sees every scheme and can cancel") {
    const auto s = testing::branching_instance();
    SearchOptions o = no_checks(6);
    std::vector<int> counts;
    o.on_scheme = [&](const SearchProgress& p) {
        counts.push_back(p.schemes_found);
        CHECK(p.max_schemes == 6);
        return p.schemes_found < 2;
    };
    const auto trace = iterate_schemes(s, o);
    CHECK(counts == std::vector<int>{1, 2});
    CHECK(trace.schemes.size() == 2);
    CHECK(trace.terminated_by == Termination::cancelled);
}

TEST_CASE("minimal_subtree drops dangling lines and closes no cycle") {
    const auto s = testing::branching_instance();
    const std::set<int> zone{1};
    const std::set<int> targets{4, 6, 8};
    // Tree plus the 1-7 loop plus the 1-9 stub.
    const std::vector<int> raw{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto reduced = minimal_subtree(s, zone, targets, raw);
    CHECK(reduced == std::vector<int>{1, 2, 3, 4, 5, 7, 8});

    const auto info = analyze_tree(s, zone, targets, reduced);
    CHECK(info.is_tree);
    CHECK(info.bus_depth.at(6) == 4);
    CHECK_FALSE(analyze_tree(s, zone, targets, raw).is_tree);
}

TEST_CASE("scheme checks: depth, strict reactive limit, non-tree") {
    auto s = testing::branching_instance();
    s.params.d_max = 3;
    SearchOptions o;
    o.check_voltage = false;
    const std::vector<int> lines{1, 2, 3, 4, 5, 7, 8};

    const Scheme deep = make_scheme(s, lines, o);
    CHECK(deep.violates(ViolationKind::depth));
    CHECK_FALSE(deep.valid);

    s.params.d_max = 4;
    // Limit = k1 * 150 = 60 exactly: equality is a violation.
    s.params.k1 = 0.4;
    const Scheme at_limit = make_scheme(s, lines, o);
    CHECK(at_limit.violates(ViolationKind::reactive));
    s.params.k1 = 0.41;
    CHECK(make_scheme(s, lines, o).valid);

    const Scheme loop = make_scheme(s, std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}, o);
    CHECK(loop.violates(ViolationKind::non_tree));
    const Scheme short_of_targets = make_scheme(s, std::vector<int>{1, 2, 3}, o);
    CHECK(short_of_targets.violates(ViolationKind::non_tree));

    CHECK_THROWS_AS(make_scheme(s, std::vector<int>{42}, o), ValidationError);
    CHECK_THROWS_AS(make_scheme(s, std::vector<int>{1, 1}, o), ValidationError);
}

TEST_CASE("single-source fixture: eight schemes, non-decreasing, four valid") {
    const auto s = fixture("ieee39_case1.json");
    const auto trace = iterate_schemes(s);
    REQUIRE(trace.schemes.size() == 8);
    CHECK(trace.terminated_by == Termination::found_m_s);
    const std::vector<double> mvar{128.64, 129.10, 135.39, 143.22, 158.62, 162.57, 164.91, 168.71};
    for (std::size_t i = 0; i < 8; ++i) CHECK(trace.schemes[i].objective_mvar == doctest::Approx(mvar[i]).epsilon(1e-9));
    for (std::size_t i = 0; i < 4; ++i) CHECK(trace.schemes[i].valid);
    CHECK(trace.schemes[4].max_depth == 9);
    CHECK(trace.schemes[5].max_depth == 11);
    CHECK(trace.schemes[6].max_depth == 10);
    CHECK(trace.schemes[7].violates(ViolationKind::reactive));
    CHECK_FALSE(trace.schemes[6].violates(ViolationKind::reactive));
    CHECK(trace.warnings.empty());
    CHECK(trace.valid_count() == 4);
}

TEST_CASE("a cheapest scheme over the reactive limit warns") {
    auto s = fixture("ieee39_case1.json");
    s.params.k1 = 0.5;
    SearchOptions o;
    o.max_schemes = 2;
    o.check_voltage = false;
    const auto trace = iterate_schemes(s, o);
    REQUIRE(trace.warnings.size() == 1);
    CHECK(trace.warnings[0].find("adjust the target nodes") != std::string::npos);
    CHECK(trace.valid_count() == 0);
}

TEST_CASE("three islands: charging sequence through virtual branches") {
    const auto s = fixture("ieee39_three_islands.json");
    const auto trace = iterate_schemes(s);
    REQUIRE(trace.schemes.size() == 8);
    const std::vector<double> mvar{126.54, 128.64, 129.10, 130.71, 135.39, 143.22, 146.56, 147.69};
    const std::vector<int> depth{4, 7, 6, 5, 7, 7, 6, 4};
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(trace.schemes[i].objective_mvar == doctest::Approx(mvar[i]).epsilon(1e-9));
        CHECK(trace.schemes[i].max_depth == depth[i]);
        for (int id : trace.schemes[i].lines) CHECK(id <= 46);
    }
}
