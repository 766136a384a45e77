#include "dallysim/topology.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace dallysim {

const char* tier_name(Tier t) {
    switch (t) {
    case Tier::Machine: return "machine";
    case Tier::Rack: return "rack";
    case Tier::Network: return "network";
    }
    return "?";
}

const TierLink& ClusterTopology::link(Tier t) const {
    switch (t) {
    case Tier::Machine: return machine_link;
    case Tier::Rack: return rack_link;
    case Tier::Network: return network_link;
    }
    return network_link;
}

void ClusterTopology::validate() const {
    if (gpus_per_machine < 1 || machines_per_rack < 1 || num_racks < 1) {
        throw ConfigError("topology: all counts must be >= 1");
    }
    for (Tier t : {Tier::Machine, Tier::Rack, Tier::Network}) {
        const TierLink& l = link(t);
        if (l.bandwidth_gbps <= 0.0) {
            throw ConfigError(fmt::format("topology: {} link bandwidth must be > 0", tier_name(t)));
        }
        if (l.latency_us < 0.0) {
            throw ConfigError(fmt::format("topology: {} link latency must be >= 0", tier_name(t)));
        }
    }
}

int Placement::total_gpus() const {
    int total = 0;
    for (const auto& s : slots) total += s.gpus;
    return total;
}

Tier derive_tier(const Placement& placement) {
    if (placement.slots.empty()) {
        throw ValidationError("placement: empty slot list");
    }
    if (placement.slots.size() == 1) return Tier::Machine;
    const int rack = placement.slots.front().rack;
    for (const auto& s : placement.slots) {
        if (s.rack != rack) return Tier::Network;
    }
    return Tier::Rack;
}

Placement make_placement(std::vector<PlacementSlot> slots) {
    Placement p;
    p.slots = std::move(slots);
    p.tier = derive_tier(p);
    return p;
}

CapacityLedger::CapacityLedger(const ClusterTopology& topo)
    : gpus_per_machine_(topo.gpus_per_machine),
      machines_per_rack_(topo.machines_per_rack),
      num_racks_(topo.num_racks),
      free_(static_cast<size_t>(topo.total_machines()), topo.gpus_per_machine),
      total_free_(topo.total_gpus()) {}

int CapacityLedger::index(int rack, int machine) const {
    if (rack < 0 || rack >= num_racks_ || machine < 0 || machine >= machines_per_rack_) {
        throw std::logic_error(fmt::format("ledger: slot (r{},m{}) outside topology", rack, machine));
    }
    return rack * machines_per_rack_ + machine;
}

int CapacityLedger::free_gpus(int rack, int machine) const {
    return free_[static_cast<size_t>(index(rack, machine))];
}

int CapacityLedger::free_in_rack(int rack) const {
    int total = 0;
    for (int m = 0; m < machines_per_rack_; ++m) total += free_gpus(rack, m);
    return total;
}

void CapacityLedger::allocate(const Placement& placement) {
    // Validate the whole placement first so a failed allocate mutates nothing.
    std::set<std::pair<int, int>> seen;
    for (const auto& s : placement.slots) {
        const int idx = index(s.rack, s.machine);
        if (s.gpus < 1 || s.gpus > gpus_per_machine_) {
            throw std::logic_error(fmt::format("ledger: slot gpu count {} out of range", s.gpus));
        }
        if (!seen.insert({s.rack, s.machine}).second) {
            throw std::logic_error(fmt::format("ledger: duplicate slot (r{},m{})", s.rack, s.machine));
        }
        if (free_[static_cast<size_t>(idx)] < s.gpus) {
            throw std::logic_error(fmt::format(
                "ledger corruption: allocating {} GPUs on (r{},m{}) with only {} free",
                s.gpus, s.rack, s.machine, free_[static_cast<size_t>(idx)]));
        }
    }
    for (const auto& s : placement.slots) {
        free_[static_cast<size_t>(index(s.rack, s.machine))] -= s.gpus;
        total_free_ -= s.gpus;
    }
}

void CapacityLedger::release(const Placement& placement) {
    for (const auto& s : placement.slots) {
        const int idx = index(s.rack, s.machine);
        if (free_[static_cast<size_t>(idx)] + s.gpus > gpus_per_machine_) {
            throw std::logic_error(fmt::format(
                "ledger corruption: releasing {} GPUs on (r{},m{}) with {} already free",
                s.gpus, s.rack, s.machine, free_[static_cast<size_t>(idx)]));
        }
    }
    for (const auto& s : placement.slots) {
        free_[static_cast<size_t>(index(s.rack, s.machine))] += s.gpus;
        total_free_ += s.gpus;
    }
}

namespace {

// Most-loaded machine that still fits, ties to lowest (rack, machine) index.
std::optional<PlacementSlot> best_machine_fit(int demand, const CapacityLedger& ledger) {
    std::optional<PlacementSlot> best;
    int best_free = 0;
    for (int r = 0; r < ledger.num_racks(); ++r) {
        for (int m = 0; m < ledger.machines_per_rack(); ++m) {
            const int f = ledger.free_gpus(r, m);
            if (f < demand) continue;
            if (!best || f < best_free) {
                best = PlacementSlot{r, m, demand};
                best_free = f;
            }
        }
    }
    return best;
}

// Fill within one rack, most-loaded machines first (ties by index).
std::vector<PlacementSlot> fill_rack(int demand, int rack, const CapacityLedger& ledger) {
    std::vector<std::pair<int, int>> machines; // (free, machine index)
    for (int m = 0; m < ledger.machines_per_rack(); ++m) {
        const int f = ledger.free_gpus(rack, m);
        if (f > 0) machines.emplace_back(f, m);
    }
    std::sort(machines.begin(), machines.end());
    std::vector<PlacementSlot> slots;
    int remaining = demand;
    for (const auto& [f, m] : machines) {
        if (remaining == 0) break;
        const int take = std::min(f, remaining);
        slots.push_back({rack, m, take});
        remaining -= take;
    }
    return slots;
}

} // namespace

std::optional<Placement> find_placement(int demand, Tier tier_cap,
                                        const CapacityLedger& ledger,
                                        const ClusterTopology& topo) {
    if (demand < 1) {
        throw ValidationError(fmt::format("find_placement: demand {} < 1", demand));
    }
    if (demand > topo.total_gpus()) {
        throw InfeasibleDemandError(fmt::format(
            "demand {} exceeds total cluster GPUs {}", demand, topo.total_gpus()));
    }

    if (demand <= topo.gpus_per_machine) {
        if (auto slot = best_machine_fit(demand, ledger)) {
            return make_placement({*slot});
        }
    }
    if (tier_cap == Tier::Machine) return std::nullopt;

    if (demand <= topo.rack_capacity()) {
        // Smallest rack free total that fits, ties to the lowest rack index.
        int best_rack = -1;
        int best_free = 0;
        for (int r = 0; r < topo.num_racks; ++r) {
            const int f = ledger.free_in_rack(r);
            if (f < demand) continue;
            if (best_rack < 0 || f < best_free) {
                best_rack = r;
                best_free = f;
            }
        }
        if (best_rack >= 0) {
            return make_placement(fill_rack(demand, best_rack, ledger));
        }
    }
    if (tier_cap == Tier::Rack) return std::nullopt;

    if (ledger.total_free() >= demand) {
        std::vector<PlacementSlot> slots;
        int remaining = demand;
        for (int r = 0; r < topo.num_racks && remaining > 0; ++r) {
            for (int m = 0; m < topo.machines_per_rack && remaining > 0; ++m) {
                const int f = ledger.free_gpus(r, m);
                if (f == 0) continue;
                const int take = std::min(f, remaining);
                slots.push_back({r, m, take});
                remaining -= take;
            }
        }
        return make_placement(std::move(slots));
    }
    return std::nullopt;
}

} // namespace dallysim
