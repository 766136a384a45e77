#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dallysim/errors.hpp"

namespace dallysim {

// Consolidation tier of a placement. Lower = more consolidated.
enum class Tier { Machine = 0, Rack = 1, Network = 2 };

const char* tier_name(Tier t);

struct TierLink {
    double bandwidth_gbps = 0.0; // per link/port
    double latency_us = 0.0;     // per hop
};

// Static three-tier datacenter shape: GPUs -> machines -> racks -> network.
struct ClusterTopology {
    int gpus_per_machine = 8;
    int machines_per_rack = 8;
    int num_racks = 2;
    TierLink machine_link{900.0, 1.0};
    TierLink rack_link{400.0, 2.0};
    TierLink network_link{800.0, 5.0};

    int total_machines() const { return machines_per_rack * num_racks; }
    long long total_gpus() const {
        return static_cast<long long>(gpus_per_machine) * total_machines();
    }
    int rack_capacity() const { return gpus_per_machine * machines_per_rack; }
    const TierLink& link(Tier t) const;

    void validate() const; // throws ConfigError
};

struct PlacementSlot {
    int rack = 0;
    int machine = 0; // index within the rack
    int gpus = 0;

    bool operator==(const PlacementSlot&) const = default;
};

// Concrete GPU allocation of one job plus its derived consolidation tier.
struct Placement {
    std::vector<PlacementSlot> slots;
    Tier tier = Tier::Machine;

    int total_gpus() const;
};

// Machine iff one slot, Rack iff >1 slot all in one rack, Network otherwise.
// Throws ValidationError on an empty slot list.
Tier derive_tier(const Placement& placement);

// Builds a Placement from slots, deriving and caching the tier.
Placement make_placement(std::vector<PlacementSlot> slots);

// Per-machine free-GPU counts. Allocation and release are exact inverses;
// violating either is a fatal engine bug (std::logic_error).
class CapacityLedger {
public:
    explicit CapacityLedger(const ClusterTopology& topo);

    int free_gpus(int rack, int machine) const;
    int free_in_rack(int rack) const;
    long long total_free() const { return total_free_; }

    void allocate(const Placement& placement);
    void release(const Placement& placement);

    int gpus_per_machine() const { return gpus_per_machine_; }
    int machines_per_rack() const { return machines_per_rack_; }
    int num_racks() const { return num_racks_; }

private:
    int index(int rack, int machine) const;

    int gpus_per_machine_ = 0;
    int machines_per_rack_ = 0;
    int num_racks_ = 0;
    std::vector<int> free_;
    long long total_free_ = 0;
};

// Most consolidated placement with tier <= tier_cap, or nullopt.
// Deterministic best-fit: machines by most-loaded-that-fits, racks by
// smallest free total that fits, ties to the lowest (rack, machine) index.
// Network-tier placements fill machines in index order.
// Throws InfeasibleDemandError when demand exceeds the whole cluster.
std::optional<Placement> find_placement(int demand, Tier tier_cap,
                                        const CapacityLedger& ledger,
                                        const ClusterTopology& topo);

} // namespace dallysim
