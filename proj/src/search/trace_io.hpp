#pragma once

#include <string_view>

#include <json.hpp>

#include "search/scheme.hpp"

namespace restopath::search {

nlohmann::ordered_json scheme_to_json(const Scheme& scheme);
nlohmann::ordered_json trace_to_json(const SearchTrace& trace);

/// Accepts either a trace object or a report containing one under "trace".
/// Throws ParseError.
SearchTrace trace_from_json(const nlohmann::json& document);
SearchTrace parse_trace(std::string_view text);

} // namespace restopath::search
