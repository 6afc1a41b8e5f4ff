#include <algorithm>
#include <map>
#include <queue>

#include "common/error.hpp"
#include "grid/network.hpp"

namespace restopath::grid {

std::vector<std::vector<int>> compute_islands(const Scenario& s) {
    std::map<int, std::vector<int>> adjacency;
    for (int bus : s.state.energized_buses) adjacency[bus];
    for (const auto& br : s.network.branches()) {
        if (!br.live()) continue;
        if (!s.energized(br.from_bus) || !s.energized(br.to_bus)) continue;
        adjacency[br.from_bus].push_back(br.to_bus);
        adjacency[br.to_bus].push_back(br.from_bus);
    }

    std::vector<std::vector<int>> islands;
    std::set<int> seen;
    for (const auto& [start, _] : adjacency) {
        if (seen.contains(start)) continue;
        std::vector<int> island;
        std::queue<int> frontier;
        frontier.push(start);
        seen.insert(start);
        while (!frontier.empty()) {
            int bus = frontier.front();
            frontier.pop();
            island.push_back(bus);
            for (int next : adjacency[bus]) {
                if (seen.insert(next).second) frontier.push(next);
            }
        }
        std::sort(island.begin(), island.end());
        islands.push_back(std::move(island));
    }
    // Map iteration visits starts in ascending id order, so islands are
    // already ordered by their smallest bus.
    return islands;
}

std::set<int> restored_zone(const Scenario& s) {
    for (auto& island : compute_islands(s)) {
        if (std::binary_search(island.begin(), island.end(), s.supply_bus))
            return {island.begin(), island.end()};
    }
    return {};
}

namespace {

int representative(const Scenario& s, const std::vector<int>& island) {
    const Generator* best = nullptr;
    for (const auto& gen : s.network.generators()) {
        if (!std::binary_search(island.begin(), island.end(), gen.bus)) continue;
        if (best == nullptr || (gen.is_blackstart && !best->is_blackstart) ||
            (gen.is_blackstart == best->is_blackstart && gen.bus < best->bus))
            best = &gen;
    }
    return best != nullptr ? best->bus : island.front();
}

} // namespace

Scenario transform_islands(const Scenario& s) {
    if (s.state.energized_buses.empty())
        throw UnsolvableError("no energized bus: nothing to restore from");
    auto islands = compute_islands(s);
    if (islands.size() <= 1) return s;

    Scenario out = s;
    for (const auto& island : islands) {
        if (std::binary_search(island.begin(), island.end(), s.supply_bus)) continue;
        Branch v;
        v.id = out.network.next_branch_id();
        v.from_bus = s.supply_bus;
        v.to_bus = representative(s, island);
        v.breaker_count = 0;
        v.status = BranchStatus::virtual_line;
        out.network = out.network.with_added_branch(v);
    }
    return out;
}

double reactive_capability(const Scenario& s) {
    const auto zone = restored_zone(s);
    double total = 0.0;
    for (const auto& gen : s.network.generators()) {
        if (zone.contains(gen.bus)) total += gen.q_absorb_max;
    }
    return s.params.k1 * total;
}

} // namespace restopath::grid
