#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace restopath::grid {

enum class BranchStatus { unenergized, energized, failed, virtual_line };

std::string_view to_string(BranchStatus status);
std::optional<BranchStatus> branch_status_from_string(std::string_view text);

struct Bus {
    int id = 0;
    std::string name;
    double importance = 0.0;     // I_i, dimensionless
    double important_load = 0.0; // L_i, MW
    bool is_plant = false;
    double load_mw = 0.0;        // picked-up load, used by the power flow
    double load_mvar = 0.0;
    std::optional<std::array<double, 2>> position; // one-line diagram layout

    friend bool operator==(const Bus&, const Bus&) = default;
};

struct Branch {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double charging_mvar = 0.0; // Q_L at 1.0 p.u.
    double series_r = 0.0;
    double series_x = 0.0;
    double shunt_b = 0.0;       // total line charging, p.u.
    bool is_transformer = false;
    int breaker_count = 2;
    BranchStatus status = BranchStatus::unenergized;

    /// Energized and virtual branches both belong to the restored zone.
    bool live() const {
        return status == BranchStatus::energized || status == BranchStatus::virtual_line;
    }
    int other(int bus) const { return bus == from_bus ? to_bus : from_bus; }

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct Generator {
    int bus = 0;
    double rated_mva = 0.0;
    double q_absorb_max = 0.0; // MVar
    bool is_blackstart = false;

    friend bool operator==(const Generator&, const Generator&) = default;
};

/// Buses, branches and generators with id lookup. Element order is the
/// document order and is preserved through persistence.
class PowerNetwork {
public:
    PowerNetwork() = default;
    PowerNetwork(std::vector<Bus> buses, std::vector<Branch> branches,
                 std::vector<Generator> generators);

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Generator>& generators() const { return generators_; }

    bool has_bus(int id) const { return bus_index_.contains(id); }
    bool has_branch(int id) const { return branch_index_.contains(id); }
    const Bus& bus(int id) const;
    const Branch& branch(int id) const;
    std::size_t bus_position(int id) const;
    std::size_t branch_position(int id) const;

    int next_branch_id() const;

    /// Copy with one branch replaced (same id).
    PowerNetwork with_branch(const Branch& branch) const;
    PowerNetwork with_added_branch(const Branch& branch) const;

    friend bool operator==(const PowerNetwork& a, const PowerNetwork& b) {
        return a.buses_ == b.buses_ && a.branches_ == b.branches_ &&
               a.generators_ == b.generators_;
    }

private:
    void index();

    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::map<int, std::size_t> bus_index_;
    std::map<int, std::size_t> branch_index_;
};

struct RestorationState {
    std::set<int> energized_buses;
    std::set<int> failed_branches;

    friend bool operator==(const RestorationState&, const RestorationState&) = default;
};

struct Params {
    int d_max = 8;
    double k1 = 0.8;
    int m_s = 8;
    double lambda = 0.5;
    std::array<double, 5> weights{0.2, 0.2, 0.2, 0.2, 0.2};
    double alpha = 0.0;
    double v_min = 0.90;
    double v_max = 1.10;
    double base_mva = 100.0;

    friend bool operator==(const Params&, const Params&) = default;
};

struct Scenario {
    PowerNetwork network;
    RestorationState state;
    std::set<int> targets;
    int supply_bus = 0;
    Params params;

    bool energized(int bus) const { return state.energized_buses.contains(bus); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ValidationError naming the first offending element.
void validate(const Scenario& scenario);

/// Parses and validates a scenario document. Throws ParseError or
/// ValidationError.
Scenario load_scenario(std::string_view document);

/// Serializes to the scenario document format. Output is deterministic:
/// equal scenarios give byte-identical documents.
std::string save_scenario(const Scenario& scenario);

/// Connected components of the energized subgraph (energized buses joined by
/// energized or virtual branches). Each island is sorted; islands are ordered
/// by their smallest bus id.
std::vector<std::vector<int>> compute_islands(const Scenario& scenario);

/// Buses of the island that contains the supply bus.
std::set<int> restored_zone(const Scenario& scenario);

/// Joins every island to the supply island with a zero-charging virtual
/// branch. Returns the scenario unchanged when there is one island. Throws
/// UnsolvableError when nothing is energized.
Scenario transform_islands(const Scenario& scenario);

/// K1 times the summed absorption limit of the units in the restored zone.
double reactive_capability(const Scenario& scenario);

} // namespace restopath::grid
