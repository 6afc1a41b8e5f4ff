#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "evaluation/evaluation.hpp"
#include "grid/network.hpp"
#include "search/search.hpp"

namespace restopath::session {

/// Per-run overrides of the scenario parameters.
struct SolveRequest {
    std::optional<std::set<int>> targets;
    std::optional<int> max_schemes;
    std::optional<int> d_max;
    std::optional<double> k1;
    std::optional<double> lambda;
    std::optional<eval::Weights> weights;
    bool check_depth = true;
    bool check_reactive = true;
    bool check_voltage = true;
    long node_limit = 2000000;
};

/// Throws ParseError on malformed fields.
SolveRequest request_from_json(const nlohmann::json& j);

/// Scenario with the overrides applied. Override targets that are already
/// energized are kept; the search drops them. Throws ValidationError.
grid::Scenario apply_request(const grid::Scenario& scenario, const SolveRequest& request);

struct SolveOutcome {
    grid::Scenario effective;
    search::SearchTrace trace;
    eval::RankingResult ranking;
    nlohmann::ordered_json report;
};

using ProgressFn = std::function<bool(const search::SearchProgress&)>;

/// Join islands, enumerate schemes, rank the valid ones.
SolveOutcome solve(const grid::Scenario& scenario, const SolveRequest& request,
                   const ProgressFn& progress = {});

/// Rank schemes found earlier. Validity is taken from the trace.
SolveOutcome evaluate(const grid::Scenario& scenario, const search::SearchTrace& trace,
                      const SolveRequest& request);

/// Path-model LP text for the first iteration of a solve.
std::string export_lp(const grid::Scenario& scenario, const SolveRequest& request);

/// Canonical report text: two-space indented JSON plus newline.
std::string dump_report(const nlohmann::ordered_json& report);

/// Fixed-width summary of a report document.
std::string report_table(const nlohmann::json& report);

} // namespace restopath::session
