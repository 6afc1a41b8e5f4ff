#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "grid/network.hpp"

namespace restopath::session {

enum class EventKind { line_failed, line_repaired, scheme_committed, targets_changed };

std::string_view to_string(EventKind kind);

struct RestorationEvent {
    EventKind kind = EventKind::line_failed;
    int branch = 0;                         // line_failed, line_repaired
    std::vector<int> lines;                 // scheme_committed
    std::optional<std::set<int>> targets;   // targets_changed; optional check set for a commit
    std::string timestamp;
};

/// Throws ParseError.
RestorationEvent event_from_json(const nlohmann::json& j);
nlohmann::ordered_json event_to_json(const RestorationEvent& event);

/// Next scenario after `event`. Failing an already failed line and repairing
/// a line that is not failed change nothing. A commit is checked as a scheme
/// (tree, depth, reactive and voltage) against the event's targets or, when
/// absent, the scenario's; an invalid scheme is rejected with
/// ValidationError.
grid::Scenario apply_event(const grid::Scenario& scenario, const RestorationEvent& event);

} // namespace restopath::session
