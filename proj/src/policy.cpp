#include "dallysim/policy.hpp"

#include <algorithm>
#include <cmath>

namespace dallysim {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::Pending: return "pending";
    case Phase::Waiting: return "waiting";
    case Phase::Running: return "running";
    case Phase::Done: return "done";
    }
    return "?";
}

long long segment_iterations(const JobState& job, double now) {
    if (job.phase != Phase::Running) return 0;
    const double elapsed = now - job.compute_start;
    if (elapsed <= 0.0) return 0;
    const auto done = static_cast<long long>(
        std::floor(elapsed / job.per_iter_time_current + kIterationEpsilon));
    return std::clamp(done, 0LL, job.remaining_iterations());
}

double live_run_time(const JobState& job, double now) {
    double t = job.run_time_accum;
    if (job.phase == Phase::Running) t += now - job.run_start;
    return t;
}

long long live_iterations(const JobState& job, double now) {
    return job.iterations_completed + segment_iterations(job, now);
}

bool TierAvail::at(Tier t) const {
    switch (t) {
    case Tier::Machine: return machine;
    case Tier::Rack: return rack;
    case Tier::Network: return network;
    }
    return false;
}

std::optional<Tier> decision_tier(OfferDecision d) {
    switch (d) {
    case OfferDecision::Reject: return std::nullopt;
    case OfferDecision::AcceptMachine: return Tier::Machine;
    case OfferDecision::AcceptRack: return Tier::Rack;
    case OfferDecision::AcceptNetwork: return Tier::Network;
    }
    return std::nullopt;
}

TierAvail PlacementQuery::availability(int demand) const {
    TierAvail avail;
    avail.machine = feasible(demand, Tier::Machine);
    avail.rack = avail.machine || feasible(demand, Tier::Rack);
    avail.network = avail.rack || feasible(demand, Tier::Network);
    return avail;
}

bool PlacementQuery::feasible(int demand, Tier cap) const {
    if (demand <= topo_->gpus_per_machine) {
        for (int r = 0; r < topo_->num_racks; ++r) {
            for (int m = 0; m < topo_->machines_per_rack; ++m) {
                if (ledger_->free_gpus(r, m) >= demand) return true;
            }
        }
    }
    if (cap == Tier::Machine) return false;
    if (demand <= topo_->rack_capacity()) {
        for (int r = 0; r < topo_->num_racks; ++r) {
            if (ledger_->free_in_rack(r) >= demand) return true;
        }
    }
    if (cap == Tier::Rack) return false;
    return ledger_->total_free() >= demand;
}

bool PlacementQuery::feasible_with_release(int demand, Tier cap,
                                           const std::vector<const Placement*>& released) const {
    if (released.empty()) return feasible(demand, cap);
    CapacityLedger scratch = *ledger_;
    for (const Placement* p : released) scratch.release(*p);
    return PlacementQuery(scratch, *topo_).feasible(demand, cap);
}

std::vector<int> select_victims_by_priority(
    const EngineView& view, const std::vector<VictimCandidate>& candidates,
    const std::vector<int>& running_worst_first,
    const std::function<bool(int candidate, int runner)>& eligible, int max_victims) {
    std::vector<int> victims;
    std::vector<const Placement*> released;
    const auto taken = [&](int job, const std::vector<int>& extra) {
        return std::find(victims.begin(), victims.end(), job) != victims.end() ||
               std::find(extra.begin(), extra.end(), job) != extra.end();
    };

    for (const auto& cand : candidates) {
        if (static_cast<int>(victims.size()) >= max_victims) break;
        const int demand = view.job(cand.job).spec.gpu_demand;
        if (view.query->feasible_with_release(demand, cand.cap, released)) continue;

        std::vector<int> added;
        std::vector<const Placement*> trial = released;
        bool satisfied = false;
        for (int runner : running_worst_first) {
            if (static_cast<int>(victims.size() + added.size()) >= max_victims) break;
            if (taken(runner, added) || !eligible(cand.job, runner)) continue;
            added.push_back(runner);
            trial.push_back(&*view.job(runner).placement);
            if (view.query->feasible_with_release(demand, cand.cap, trial)) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) continue;

        // Feasibility is monotone in released GPUs, so one forward pruning
        // pass yields a minimal set.
        for (size_t i = 0; i < added.size();) {
            std::vector<const Placement*> without = released;
            for (size_t k = 0; k < added.size(); ++k) {
                if (k != i) without.push_back(&*view.job(added[k]).placement);
            }
            if (view.query->feasible_with_release(demand, cand.cap, without)) {
                added.erase(added.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }
        for (int runner : added) {
            victims.push_back(runner);
            released.push_back(&*view.job(runner).placement);
        }
    }
    return victims;
}

} // namespace dallysim
