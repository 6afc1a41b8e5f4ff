#include <cmath>

#include "common/error.hpp"
#include "search/path_model.hpp"
#include "search/search.hpp"

namespace restopath::search {

SearchTrace iterate_schemes(const grid::Scenario& input, const SearchOptions& options) {
    const grid::Scenario s = grid::transform_islands(input);
    const int max_schemes = options.max_schemes > 0 ? options.max_schemes : s.params.m_s;
    if (max_schemes < 1) throw ValidationError("max_schemes must be at least 1");

    SearchTrace trace;
    const auto zone = grid::restored_zone(s);
    std::set<int> targets;
    for (int t : s.targets)
        if (!zone.contains(t)) targets.insert(t);

    SearchProgress progress;
    progress.max_schemes = max_schemes;
    auto report = [&](const Scheme& scheme) {
        progress.iteration = trace.iterations;
        progress.schemes_found = static_cast<int>(trace.schemes.size());
        progress.valid_found = trace.valid_count();
        progress.last_objective = scheme.objective_mvar;
        return !options.on_scheme || options.on_scheme(progress);
    };

    if (targets.empty()) {
        // Every target is already live: the empty scheme is the only one.
        trace.iterations = 1;
        trace.schemes.push_back(make_scheme(s, {}, options));
        trace.terminated_by = max_schemes == 1 ? Termination::found_m_s : Termination::infeasible;
        if (!report(trace.schemes.back())) trace.terminated_by = Termination::cancelled;
        return trace;
    }

    PathModel model = build_path_model(s);
    while (static_cast<int>(trace.schemes.size()) < max_schemes) {
        const auto sol = milp::solve_milp(model.problem, options.milp);
        ++trace.iterations;
        if (sol.status == milp::Status::infeasible) {
            trace.terminated_by = Termination::infeasible;
            return trace;
        }
        if (sol.status == milp::Status::node_limit) {
            trace.terminated_by = Termination::node_limit;
            return trace;
        }
        if (sol.status != milp::Status::optimal)
            throw Error("path model solve failed: " + std::string(milp::to_string(sol.status)));

        const auto raw = selected_lines(model, sol.values);
        const auto lines = minimal_subtree(s, model.zone, model.targets, raw);
        Scheme scheme = make_scheme(s, lines, options);
        scheme.solver_objective = sol.objective_value;
        if (trace.schemes.empty() && scheme.violates(ViolationKind::reactive))
            trace.warnings.push_back(
                "cheapest scheme already exceeds the reactive absorption limit; adjust the target nodes");
        trace.schemes.push_back(std::move(scheme));
        add_exclusion_cut(model, trace.schemes.back().lines);
        if (!report(trace.schemes.back())) {
            trace.terminated_by = Termination::cancelled;
            return trace;
        }
    }
    trace.terminated_by = Termination::found_m_s;
    return trace;
}

SearchTrace single_target_path(const grid::Scenario& scenario, int target,
                               const SearchOptions& options) {
    if (!scenario.network.has_bus(target))
        throw ValidationError("target bus " + std::to_string(target) + " does not exist");
    grid::Scenario s = scenario;
    s.targets = {target};
    return iterate_schemes(s, options);
}

} // namespace restopath::search
