#include "grid/network.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace restopath::grid {

std::string_view to_string(BranchStatus status) {
    switch (status) {
    case BranchStatus::unenergized: return "unenergized";
    case BranchStatus::energized: return "energized";
    case BranchStatus::failed: return "failed";
    case BranchStatus::virtual_line: return "virtual";
    }
    return "unenergized";
}

std::optional<BranchStatus> branch_status_from_string(std::string_view text) {
    if (text == "unenergized") return BranchStatus::unenergized;
    if (text == "energized") return BranchStatus::energized;
    if (text == "failed") return BranchStatus::failed;
    if (text == "virtual") return BranchStatus::virtual_line;
    return std::nullopt;
}

PowerNetwork::PowerNetwork(std::vector<Bus> buses, std::vector<Branch> branches,
                           std::vector<Generator> generators)
    : buses_(std::move(buses)), branches_(std::move(branches)),
      generators_(std::move(generators)) {
    index();
}

void PowerNetwork::index() {
    bus_index_.clear();
    branch_index_.clear();
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        if (!bus_index_.emplace(buses_[i].id, i).second)
            throw ValidationError("duplicate bus id " + std::to_string(buses_[i].id));
    }
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        if (!branch_index_.emplace(branches_[i].id, i).second)
            throw ValidationError("duplicate branch id " + std::to_string(branches_[i].id));
    }
}

const Bus& PowerNetwork::bus(int id) const { return buses_[bus_position(id)]; }

const Branch& PowerNetwork::branch(int id) const { return branches_[branch_position(id)]; }

std::size_t PowerNetwork::bus_position(int id) const {
    auto it = bus_index_.find(id);
    if (it == bus_index_.end()) throw ValidationError("unknown bus " + std::to_string(id));
    return it->second;
}

std::size_t PowerNetwork::branch_position(int id) const {
    auto it = branch_index_.find(id);
    if (it == branch_index_.end()) throw ValidationError("unknown branch " + std::to_string(id));
    return it->second;
}

int PowerNetwork::next_branch_id() const {
    return branch_index_.empty() ? 1 : branch_index_.rbegin()->first + 1;
}

PowerNetwork PowerNetwork::with_branch(const Branch& branch) const {
    PowerNetwork copy = *this;
    copy.branches_[branch_position(branch.id)] = branch;
    return copy;
}

PowerNetwork PowerNetwork::with_added_branch(const Branch& branch) const {
    PowerNetwork copy = *this;
    copy.branches_.push_back(branch);
    copy.index();
    return copy;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

void validate(const Scenario& s) {
    const auto& net = s.network;
    const double base = s.params.base_mva;
    require(std::isfinite(base) && base > 0.0, "params.base_mva must be positive");

    for (const auto& bus : net.buses()) {
        const std::string where = "bus " + std::to_string(bus.id);
        require(finite_non_negative(bus.importance), where + ": importance must be finite and >= 0");
        require(finite_non_negative(bus.important_load),
                where + ": important_load must be finite and >= 0");
        require(std::isfinite(bus.load_mw) && std::isfinite(bus.load_mvar),
                where + ": load must be finite");
    }

    for (const auto& br : net.branches()) {
        const std::string where = "branch " + std::to_string(br.id);
        require(br.from_bus != br.to_bus, where + ": from_bus equals to_bus");
        require(net.has_bus(br.from_bus), where + ": unknown from_bus " + std::to_string(br.from_bus));
        require(net.has_bus(br.to_bus), where + ": unknown to_bus " + std::to_string(br.to_bus));
        require(finite_non_negative(br.charging_mvar), where + ": charging_mvar must be finite and >= 0");
        require(std::isfinite(br.series_r) && std::isfinite(br.series_x) && std::isfinite(br.shunt_b),
                where + ": impedance must be finite");
        if (br.status == BranchStatus::virtual_line) {
            require(br.charging_mvar == 0.0, where + ": virtual branch must have zero charging");
            require(s.energized(br.from_bus) && s.energized(br.to_bus),
                    where + ": virtual branch must join energized buses");
            continue;
        }
        require(br.breaker_count > 0, where + ": breaker_count must be positive");
        const double derived = br.shunt_b * base;
        const double scale = std::max(std::abs(derived), std::abs(br.charging_mvar));
        require(std::abs(derived - br.charging_mvar) <= 1e-6 * scale + 1e-12,
                where + ": charging_mvar " + std::to_string(br.charging_mvar) +
                    " disagrees with shunt_b x base_mva = " + std::to_string(derived));
        const bool listed_failed = s.state.failed_branches.contains(br.id);
        require(listed_failed == (br.status == BranchStatus::failed),
                where + ": status and state.failed_branches disagree");
        if (br.status == BranchStatus::energized) {
            require(s.energized(br.from_bus) && s.energized(br.to_bus),
                    where + ": energized branch has an unenergized endpoint");
        }
    }

    for (int id : s.state.failed_branches)
        require(net.has_branch(id), "state.failed_branches: unknown branch " + std::to_string(id));
    for (int id : s.state.energized_buses)
        require(net.has_bus(id), "state.energized_buses: unknown bus " + std::to_string(id));

    for (const auto& gen : net.generators()) {
        const std::string where = "generator at bus " + std::to_string(gen.bus);
        require(net.has_bus(gen.bus), where + ": unknown bus");
        require(std::isfinite(gen.rated_mva) && gen.rated_mva > 0.0, where + ": rated_mva must be positive");
        require(std::isfinite(gen.q_absorb_max) && gen.q_absorb_max > 0.0,
                where + ": q_absorb_max must be positive");
    }

    require(net.has_bus(s.supply_bus), "supply_bus " + std::to_string(s.supply_bus) + " does not exist");
    require(s.energized(s.supply_bus), "supply_bus " + std::to_string(s.supply_bus) + " is not energized");
    for (int t : s.targets) {
        require(net.has_bus(t), "target " + std::to_string(t) + " does not exist");
        require(!s.energized(t), "target " + std::to_string(t) + " is already energized");
    }

    const auto& p = s.params;
    require(p.d_max >= 1, "params.d_max must be a positive integer");
    require(std::isfinite(p.k1) && p.k1 > 0.0 && p.k1 <= 1.0, "params.k1 must lie in (0, 1]");
    require(p.m_s >= 1, "params.m_s must be a positive integer");
    require(std::isfinite(p.lambda) && p.lambda > 0.0 && p.lambda <= 1.0,
            "params.lambda must lie in (0, 1]");
    double sum = 0.0;
    for (double w : p.weights) {
        require(finite_non_negative(w), "params.weights must be finite and >= 0");
        sum += w;
    }
    // Published weight vectors are rounded to 4 decimals.
    require(std::abs(sum - 1.0) <= 5e-4, "params.weights must sum to 1");
    require(finite_non_negative(p.alpha), "params.alpha must be finite and >= 0");
    require(std::isfinite(p.v_min) && std::isfinite(p.v_max) && p.v_min > 0.0 && p.v_min < p.v_max,
            "params.v_min/v_max must satisfy 0 < v_min < v_max");
}

} // namespace restopath::grid
