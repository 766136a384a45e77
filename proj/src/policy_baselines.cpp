#include "dallysim/policy_baselines.hpp"

#include <algorithm>

namespace dallysim {

double attained_service(const JobState& job, double now) {
    return static_cast<double>(job.spec.gpu_demand) * live_run_time(job, now);
}

std::pair<int, double> tiresias_priority(const JobState& job, double now,
                                         const std::vector<double>& thresholds) {
    const double attained = attained_service(job, now);
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), attained);
    return {static_cast<int>(it - thresholds.begin()), attained};
}

Tier best_tier_class(int gpu_demand, const ClusterTopology& topo) {
    if (gpu_demand <= topo.gpus_per_machine) return Tier::Machine;
    if (gpu_demand <= topo.rack_capacity()) return Tier::Rack;
    return Tier::Network;
}

OfferDecision accept_most_consolidated(const TierAvail& avail) {
    if (avail.machine) return OfferDecision::AcceptMachine;
    if (avail.rack) return OfferDecision::AcceptRack;
    if (avail.network) return OfferDecision::AcceptNetwork;
    return OfferDecision::Reject;
}

std::vector<int> fifo_order(const EngineView& view, std::vector<int> ids) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const JobState& ja = view.job(a);
        const JobState& jb = view.job(b);
        if (ja.spec.arrival_time != jb.spec.arrival_time) {
            return ja.spec.arrival_time < jb.spec.arrival_time;
        }
        return ja.spec.job_id < jb.spec.job_id;
    });
    return ids;
}

TiresiasPolicy::TiresiasPolicy(TiresiasConfig config) : config_(std::move(config)) {}

std::vector<int> TiresiasPolicy::priority_order(const EngineView& view,
                                                std::vector<int> waiting) const {
    std::sort(waiting.begin(), waiting.end(), [&](int a, int b) {
        const auto pa = tiresias_priority(view.job(a), view.now, config_.thresholds_gpu_s);
        const auto pb = tiresias_priority(view.job(b), view.now, config_.thresholds_gpu_s);
        if (pa != pb) return pa < pb;
        const JobState& ja = view.job(a);
        const JobState& jb = view.job(b);
        if (ja.spec.arrival_time != jb.spec.arrival_time) {
            return ja.spec.arrival_time < jb.spec.arrival_time;
        }
        return ja.spec.job_id < jb.spec.job_id;
    });
    return waiting;
}

OfferDecision TiresiasPolicy::on_offer(const EngineView& view, int job, const TierAvail& avail) {
    const JobState& state = view.job(job);
    if (state.profile->skew == SkewClass::Low) {
        return accept_most_consolidated(avail);
    }
    // High skew: hold out for the most consolidated class the demand allows.
    switch (best_tier_class(state.spec.gpu_demand, *view.topo)) {
    case Tier::Machine:
        return avail.machine ? OfferDecision::AcceptMachine : OfferDecision::Reject;
    case Tier::Rack:
        return avail.rack ? OfferDecision::AcceptRack : OfferDecision::Reject;
    case Tier::Network:
        return avail.network ? OfferDecision::AcceptNetwork : OfferDecision::Reject;
    }
    return OfferDecision::Reject;
}

std::vector<int> TiresiasPolicy::select_victims(const EngineView& view,
                                                const std::vector<int>& running,
                                                const std::vector<int>& waiting) {
    if (config_.max_preemptions_per_round <= 0 || running.empty() || waiting.empty()) {
        return {};
    }
    using Key = std::tuple<int, double, double, std::string>;
    const auto key = [&](int id) {
        const JobState& j = view.job(id);
        const auto [queue, attained] = tiresias_priority(j, view.now, config_.thresholds_gpu_s);
        return Key{queue, attained, j.spec.arrival_time, j.spec.job_id};
    };

    std::vector<VictimCandidate> candidates;
    for (int id : priority_order(view, waiting)) {
        const JobState& j = view.job(id);
        const Tier cap = j.profile->skew == SkewClass::High
                             ? best_tier_class(j.spec.gpu_demand, *view.topo)
                             : Tier::Network;
        candidates.push_back({id, cap});
    }

    std::vector<int> worst_first = running;
    std::sort(worst_first.begin(), worst_first.end(),
              [&](int a, int b) { return key(a) > key(b); });

    return select_victims_by_priority(
        view, candidates, worst_first,
        [&](int candidate, int runner) { return key(runner) > key(candidate); },
        config_.max_preemptions_per_round);
}

GandivaPolicy::GandivaPolicy(GandivaConfig config) : config_(config) {}

void GandivaPolicy::begin_round(const EngineView& view) {
    migration_due_ = view.now >= next_check_;
    if (migration_due_) next_check_ = view.now + config_.migration_check_period_s;
}

std::vector<int> GandivaPolicy::priority_order(const EngineView& view,
                                               std::vector<int> waiting) const {
    return fifo_order(view, std::move(waiting));
}

OfferDecision GandivaPolicy::on_offer(const EngineView& view, int job, const TierAvail& avail) {
    (void)view;
    (void)job;
    return accept_most_consolidated(avail);
}

std::optional<Tier> GandivaPolicy::migration_target_cap(const JobState& job) const {
    switch (job.placement->tier) {
    case Tier::Machine: return std::nullopt;
    case Tier::Rack: return Tier::Machine;
    case Tier::Network: return Tier::Rack;
    }
    return std::nullopt;
}

} // namespace dallysim
