#pragma once

#include <map>
#include <utility>

#include "dallysim/policy.hpp"

namespace dallysim {

// Inputs to the network-sensitive priority.
struct PriorityInputs {
    long long iterations_completed = 0;
    long long iterations_total = 1;
    double run_time = 0.0;
    double ideal_total_time = 1.0;
};

// Work-completed fraction divided by normalized running time. Lower values
// mark jobs slowed by poor placement and get offers first. A job that has
// never run (run_time == 0) is treated as on-schedule and scores 1.
double nw_sens(const PriorityInputs& p);

PriorityInputs priority_inputs(const JobState& job, double now);

double nw_sens(const JobState& job, double now);

enum class DallyMode { AutoTuned, Manual, NoWait, FullyConsolidated };

const char* dally_mode_name(DallyMode m);

struct DallyConfig {
    DallyMode mode = DallyMode::AutoTuned;
    // Delay timers, both measured on the same starvation clock: a job may
    // accept rack placements once it has starved t_mc_s, and network
    // placements once it has starved t_rk_s. Defaults are 12 h and 24 h.
    double t_mc_s = 43200.0;
    double t_rk_s = 86400.0;
    double history_limit_s = 604800.0;
    double preemption_margin = 0.5;
    int max_preemptions_per_round = 4;
};

// Windowed wait-time lists keyed by (tier, GPU demand), feeding the
// auto-tuner. Entries are filtered lazily at read time.
class DelayHistory {
public:
    void record(Tier tier, int gpu_demand, double accept_time, double waited);

    // mean + 2 sample standard deviations over entries whose age
    // (now - accept_time) is strictly below history_limit; nullopt when the
    // window holds nothing.
    std::optional<double> tuned_timer(Tier tier, int gpu_demand, double now,
                                      double history_limit) const;

    size_t entry_count(Tier tier, int gpu_demand) const;

private:
    using Key = std::pair<int, int>; // (tier, demand)
    std::map<Key, std::vector<std::pair<double, double>>> lists_;
};

// Machine and rack delay timers for one GPU demand: windowed mean + 2 sigma
// per tier, falling back to the configured defaults when a window is empty.
std::pair<double, double> get_tuned_timers(int gpu_demand, const DelayHistory& history,
                                           double now, const DallyConfig& config);

// The resource-offer decision cascade: accept machine if feasible; otherwise
// wait out t_mc before accepting rack, and t_rk before accepting network.
OfferDecision delay_offer_decision(const TierAvail& avail, double starvation, double t_mc,
                                   double t_rk);

class DallyPolicy : public Policy {
public:
    explicit DallyPolicy(DallyConfig config);

    std::string_view name() const override;

    std::vector<int> priority_order(const EngineView& view,
                                    std::vector<int> waiting) const override;
    OfferDecision on_offer(const EngineView& view, int job, const TierAvail& avail) override;
    void on_accept(const EngineView& view, int job, Tier tier, double waited) override;
    std::vector<int> select_victims(const EngineView& view, const std::vector<int>& running,
                                    const std::vector<int>& waiting) override;

    // Effective (t_mc, t_rk) for a job of this demand right now. Demands that
    // cannot fit a machine zero the machine timer; demands that cannot fit a
    // rack zero both.
    std::pair<double, double> effective_timers(int gpu_demand, const ClusterTopology& topo,
                                               double now) const;

    const DelayHistory& history() const { return history_; }

private:
    Tier current_tier_cap(const JobState& job, const ClusterTopology& topo, double now) const;

    DallyConfig config_;
    DelayHistory history_;
};

} // namespace dallysim
