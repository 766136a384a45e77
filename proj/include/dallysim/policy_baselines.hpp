#pragma once

#include <vector>

#include "dallysim/policy.hpp"

namespace dallysim {

struct TiresiasConfig {
    // Ascending GPU-second boundaries of the discretized priority queues.
    std::vector<double> thresholds_gpu_s{3600.0, 36000.0};
    int max_preemptions_per_round = 4;
};

// GPU-seconds attained by a job: running time times its GPU count.
double attained_service(const JobState& job, double now);

// (queue index, attained service); queue index counts thresholds at or below
// the attained service, so a job sitting exactly on a boundary moves up.
std::pair<int, double> tiresias_priority(const JobState& job, double now,
                                         const std::vector<double>& thresholds);

// Discretized 2D-LAS with skew-based consolidation: high-skew jobs wait
// indefinitely for the most consolidated tier class their demand allows,
// low-skew jobs take whatever is available.
class TiresiasPolicy : public Policy {
public:
    explicit TiresiasPolicy(TiresiasConfig config);

    std::string_view name() const override { return "tiresias"; }
    std::vector<int> priority_order(const EngineView& view,
                                    std::vector<int> waiting) const override;
    OfferDecision on_offer(const EngineView& view, int job, const TierAvail& avail) override;
    std::vector<int> select_victims(const EngineView& view, const std::vector<int>& running,
                                    const std::vector<int>& waiting) override;

private:
    TiresiasConfig config_;
};

struct GandivaConfig {
    double migration_check_period_s = 360.0;
};

// Network-agnostic FIFO placement plus periodic migration of running jobs to
// strictly more consolidated tiers when free GPUs allow.
class GandivaPolicy : public Policy {
public:
    explicit GandivaPolicy(GandivaConfig config);

    std::string_view name() const override { return "gandiva"; }
    void begin_round(const EngineView& view) override;
    std::vector<int> priority_order(const EngineView& view,
                                    std::vector<int> waiting) const override;
    OfferDecision on_offer(const EngineView& view, int job, const TierAvail& avail) override;
    bool migration_due() const override { return migration_due_; }
    std::optional<Tier> migration_target_cap(const JobState& job) const override;

private:
    GandivaConfig config_;
    double next_check_ = 0.0;
    bool migration_due_ = false;
};

// Most consolidated tier class that can ever hold this demand.
Tier best_tier_class(int gpu_demand, const ClusterTopology& topo);

// First-available acceptance, most consolidated tier first.
OfferDecision accept_most_consolidated(const TierAvail& avail);

// Arrival order, ties by job id.
std::vector<int> fifo_order(const EngineView& view, std::vector<int> ids);

} // namespace dallysim
