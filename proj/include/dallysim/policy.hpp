#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dallysim/latency.hpp"
#include "dallysim/topology.hpp"
#include "dallysim/workload.hpp"

namespace dallysim {

enum class Phase { Pending, Waiting, Running, Done };

const char* phase_name(Phase p);

// Mutable per-job bookkeeping owned by the engine. Policies see it read-only.
struct JobState {
    JobSpec spec;
    const ModelProfile* profile = nullptr;
    Phase phase = Phase::Pending;
    long long iterations_completed = 0;
    double run_time_accum = 0.0;  // run-queue wall time, restore overhead included
    double wait_time_accum = 0.0;
    double comm_time_accum = 0.0;
    std::optional<Placement> placement;
    double run_start = 0.0;     // allocation instant of the current segment
    double compute_start = 0.0; // run_start + restore overhead
    double per_iter_time_current = 0.0;
    double comm_per_iter_current = 0.0;
    double last_assignment_ref = 0.0; // starvation clock reference
    double phase_entry = 0.0;
    long long placement_epoch = 0;
    double first_start = -1.0;
    double completion_time = -1.0;
    int num_preemptions = 0;
    std::vector<std::pair<double, Tier>> tier_history;

    long long remaining_iterations() const {
        return spec.total_expected_iterations - iterations_completed;
    }
};

// Guard against FP noise when an elapsed time should be a whole number of
// iterations; expressed in iteration units.
inline constexpr double kIterationEpsilon = 1e-9;

// Whole iterations finished in the current segment as of `now`.
long long segment_iterations(const JobState& job, double now);

// Accumulated + in-segment run-queue time as of `now`.
double live_run_time(const JobState& job, double now);

// Accumulated + in-segment completed iterations as of `now`.
long long live_iterations(const JobState& job, double now);

inline double starvation_time(const JobState& job, double now) {
    return now - job.last_assignment_ref;
}

// Cumulative per-tier feasibility: `rack` means a placement with tier <= Rack
// exists, etc.
struct TierAvail {
    bool machine = false;
    bool rack = false;
    bool network = false;

    bool any() const { return machine || rack || network; }
    bool at(Tier t) const;
};

enum class OfferDecision { Reject, AcceptMachine, AcceptRack, AcceptNetwork };

std::optional<Tier> decision_tier(OfferDecision d);

// Read-only feasibility probe over the live ledger, with support for
// hypothetical victim releases during preemption planning.
class PlacementQuery {
public:
    PlacementQuery(const CapacityLedger& ledger, const ClusterTopology& topo)
        : ledger_(&ledger), topo_(&topo) {}

    TierAvail availability(int demand) const;
    bool feasible(int demand, Tier cap) const;
    bool feasible_with_release(int demand, Tier cap,
                               const std::vector<const Placement*>& released) const;

private:
    const CapacityLedger* ledger_;
    const ClusterTopology* topo_;
};

// Snapshot handed to policies each round.
struct EngineView {
    double now = 0.0;
    const ClusterTopology* topo = nullptr;
    std::span<const JobState> jobs;
    const PlacementQuery* query = nullptr;

    const JobState& job(int id) const { return jobs[static_cast<size_t>(id)]; }
};

// Scheduling policy driven by the engine: victim selection, then optional
// migrations, then resource offers to waiting jobs in priority order.
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string_view name() const = 0;

    virtual void begin_round(const EngineView& view) { (void)view; }

    // Waiting job ids in offer order (highest priority first).
    virtual std::vector<int> priority_order(const EngineView& view,
                                            std::vector<int> waiting) const = 0;

    virtual OfferDecision on_offer(const EngineView& view, int job,
                                   const TierAvail& avail) = 0;

    // Called after an accepted offer has been allocated. `waited` is the
    // starvation time at acceptance.
    virtual void on_accept(const EngineView& view, int job, Tier tier, double waited) {
        (void)view;
        (void)job;
        (void)tier;
        (void)waited;
    }

    // Running jobs to preempt this round, already capped and ordered.
    virtual std::vector<int> select_victims(const EngineView& view,
                                            const std::vector<int>& running,
                                            const std::vector<int>& waiting) {
        (void)view;
        (void)running;
        (void)waiting;
        return {};
    }

    virtual bool migration_due() const { return false; }

    // Tier cap a running job may migrate to, or nullopt to leave it alone.
    virtual std::optional<Tier> migration_target_cap(const JobState& job) const {
        (void)job;
        return std::nullopt;
    }
};

// Shared victim-selection machinery: walks waiting candidates in priority
// order; when a candidate has no feasible placement at its tier cap, greedily
// adds eligible running jobs (worst first) until releasing them would make one
// feasible, then prunes the set to a minimal one. Stops at max_victims total.
struct VictimCandidate {
    int job = -1;
    Tier cap = Tier::Network;
};

std::vector<int> select_victims_by_priority(
    const EngineView& view, const std::vector<VictimCandidate>& candidates,
    const std::vector<int>& running_worst_first,
    const std::function<bool(int candidate, int runner)>& eligible, int max_victims);

// Arrival order, ties by job id.
std::vector<int> fifo_order(const EngineView& view, std::vector<int> ids);

} // namespace dallysim
