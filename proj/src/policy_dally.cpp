#include "dallysim/policy_dally.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dallysim {

double nw_sens(const PriorityInputs& p) {
    if (p.run_time == 0.0) return 1.0;
    const double work_completed =
        static_cast<double>(p.iterations_completed) / static_cast<double>(p.iterations_total);
    const double normalized_run_time = p.run_time / p.ideal_total_time;
    return work_completed / normalized_run_time;
}

PriorityInputs priority_inputs(const JobState& job, double now) {
    PriorityInputs p;
    p.iterations_completed = live_iterations(job, now);
    p.iterations_total = job.spec.total_expected_iterations;
    p.run_time = live_run_time(job, now);
    p.ideal_total_time = ideal_run_time(job.spec);
    return p;
}

double nw_sens(const JobState& job, double now) {
    return nw_sens(priority_inputs(job, now));
}

const char* dally_mode_name(DallyMode m) {
    switch (m) {
    case DallyMode::AutoTuned: return "auto";
    case DallyMode::Manual: return "manual";
    case DallyMode::NoWait: return "nowait";
    case DallyMode::FullyConsolidated: return "fullyconsolidated";
    }
    return "?";
}

void DelayHistory::record(Tier tier, int gpu_demand, double accept_time, double waited) {
    lists_[{static_cast<int>(tier), gpu_demand}].emplace_back(accept_time, waited);
}

std::optional<double> DelayHistory::tuned_timer(Tier tier, int gpu_demand, double now,
                                                double history_limit) const {
    const auto it = lists_.find({static_cast<int>(tier), gpu_demand});
    if (it == lists_.end()) return std::nullopt;

    double sum = 0.0;
    long long n = 0;
    for (const auto& [accept_time, waited] : it->second) {
        if (now - accept_time < history_limit) {
            sum += waited;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return mean;

    double sq = 0.0;
    for (const auto& [accept_time, waited] : it->second) {
        if (now - accept_time < history_limit) {
            sq += (waited - mean) * (waited - mean);
        }
    }
    const double stddev = std::sqrt(sq / static_cast<double>(n - 1));
    return mean + 2.0 * stddev;
}

size_t DelayHistory::entry_count(Tier tier, int gpu_demand) const {
    const auto it = lists_.find({static_cast<int>(tier), gpu_demand});
    return it == lists_.end() ? 0 : it->second.size();
}

std::pair<double, double> get_tuned_timers(int gpu_demand, const DelayHistory& history,
                                           double now, const DallyConfig& config) {
    const double t_mc =
        history.tuned_timer(Tier::Machine, gpu_demand, now, config.history_limit_s)
            .value_or(config.t_mc_s);
    const double t_rk = history.tuned_timer(Tier::Rack, gpu_demand, now, config.history_limit_s)
                            .value_or(config.t_rk_s);
    return {t_mc, t_rk};
}

OfferDecision delay_offer_decision(const TierAvail& avail, double starvation, double t_mc,
                                   double t_rk) {
    if (avail.machine) return OfferDecision::AcceptMachine;
    if (starvation < t_mc) return OfferDecision::Reject;
    if (avail.rack) return OfferDecision::AcceptRack;
    if (starvation < t_rk) return OfferDecision::Reject;
    if (avail.network) return OfferDecision::AcceptNetwork;
    return OfferDecision::Reject;
}

DallyPolicy::DallyPolicy(DallyConfig config) : config_(config) {}

std::string_view DallyPolicy::name() const {
    switch (config_.mode) {
    case DallyMode::AutoTuned: return "dally";
    case DallyMode::Manual: return "dally_manual";
    case DallyMode::NoWait: return "dally_nowait";
    case DallyMode::FullyConsolidated: return "dally_fullyconsolidated";
    }
    return "dally";
}

std::pair<double, double> DallyPolicy::effective_timers(int gpu_demand,
                                                        const ClusterTopology& topo,
                                                        double now) const {
    double t_mc = 0.0;
    double t_rk = 0.0;
    switch (config_.mode) {
    case DallyMode::AutoTuned:
        std::tie(t_mc, t_rk) = get_tuned_timers(gpu_demand, history_, now, config_);
        break;
    case DallyMode::Manual:
        t_mc = config_.t_mc_s;
        t_rk = config_.t_rk_s;
        break;
    case DallyMode::NoWait:
        break;
    case DallyMode::FullyConsolidated:
        t_mc = std::numeric_limits<double>::infinity();
        t_rk = std::numeric_limits<double>::infinity();
        break;
    }
    if (gpu_demand > topo.gpus_per_machine) t_mc = 0.0;
    if (gpu_demand > topo.rack_capacity()) {
        t_mc = 0.0;
        t_rk = 0.0;
    }
    return {t_mc, t_rk};
}

std::vector<int> DallyPolicy::priority_order(const EngineView& view,
                                             std::vector<int> waiting) const {
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(waiting.size());
    for (int id : waiting) keyed.emplace_back(nw_sens(view.job(id), view.now), id);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const JobState& ja = view.job(a.second);
        const JobState& jb = view.job(b.second);
        if (ja.spec.arrival_time != jb.spec.arrival_time) {
            return ja.spec.arrival_time < jb.spec.arrival_time;
        }
        return ja.spec.job_id < jb.spec.job_id;
    });
    std::vector<int> out;
    out.reserve(keyed.size());
    for (const auto& [key, id] : keyed) out.push_back(id);
    return out;
}

OfferDecision DallyPolicy::on_offer(const EngineView& view, int job, const TierAvail& avail) {
    const JobState& state = view.job(job);
    const auto [t_mc, t_rk] = effective_timers(state.spec.gpu_demand, *view.topo, view.now);
    return delay_offer_decision(avail, starvation_time(state, view.now), t_mc, t_rk);
}

void DallyPolicy::on_accept(const EngineView& view, int job, Tier tier, double waited) {
    // Network acceptances never feed the history.
    if (tier == Tier::Network) return;
    history_.record(tier, view.job(job).spec.gpu_demand, view.now, waited);
}

Tier DallyPolicy::current_tier_cap(const JobState& job, const ClusterTopology& topo,
                                   double now) const {
    const auto [t_mc, t_rk] = effective_timers(job.spec.gpu_demand, topo, now);
    const double starvation = starvation_time(job, now);
    if (starvation < t_mc) return Tier::Machine;
    if (starvation < t_rk) return Tier::Rack;
    return Tier::Network;
}

std::vector<int> DallyPolicy::select_victims(const EngineView& view,
                                             const std::vector<int>& running,
                                             const std::vector<int>& waiting) {
    if (config_.max_preemptions_per_round <= 0 || running.empty() || waiting.empty()) {
        return {};
    }
    std::map<int, double> nw;
    for (int id : running) nw[id] = nw_sens(view.job(id), view.now);
    for (int id : waiting) nw[id] = nw_sens(view.job(id), view.now);

    std::vector<VictimCandidate> candidates;
    for (int id : priority_order(view, waiting)) {
        candidates.push_back({id, current_tier_cap(view.job(id), *view.topo, view.now)});
    }

    std::vector<int> worst_first = running;
    std::sort(worst_first.begin(), worst_first.end(), [&](int a, int b) {
        if (nw[a] != nw[b]) return nw[a] > nw[b];
        const JobState& ja = view.job(a);
        const JobState& jb = view.job(b);
        if (ja.spec.arrival_time != jb.spec.arrival_time) {
            return ja.spec.arrival_time > jb.spec.arrival_time;
        }
        return ja.spec.job_id > jb.spec.job_id;
    });

    const double margin = config_.preemption_margin;
    return select_victims_by_priority(
        view, candidates, worst_first,
        [&](int candidate, int runner) { return nw[runner] > nw[candidate] * (1.0 + margin); },
        config_.max_preemptions_per_round);
}

} // namespace dallysim
