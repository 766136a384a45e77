#include "dallysim/engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dallysim/errors.hpp"

namespace dallysim {

Simulation::Simulation(std::vector<JobSpec> jobs, const ProfileTable& profiles,
                       ClusterTopology topo, Policy& policy, LatencyModel latency,
                       SimConfig config)
    : topo_(topo),
      policy_(&policy),
      latency_(latency),
      config_(config),
      ledger_((topo.validate(), topo)),
      query_(ledger_, topo_) {
    if (config_.round_period <= 0.0) {
        throw ConfigError("engine: round_period must be > 0");
    }
    if (config_.checkpoint_restore_overhead < 0.0) {
        throw ConfigError("engine: restore overhead must be >= 0");
    }
    states_.reserve(jobs.size());
    for (auto& spec : jobs) {
        spec.validate();
        if (spec.gpu_demand > topo_.total_gpus()) {
            throw InfeasibleDemandError(
                fmt::format("job {}: demand {} exceeds total cluster GPUs {}", spec.job_id,
                            spec.gpu_demand, topo_.total_gpus()));
        }
        JobState state;
        state.profile = &profiles.at(spec.model_name);
        state.spec = std::move(spec);
        states_.push_back(std::move(state));
    }
}

void Simulation::set_event_observer(std::function<void(const Simulation&)> observer) {
    observer_ = std::move(observer);
}

EngineView Simulation::view() const {
    EngineView v;
    v.now = now_;
    v.topo = &topo_;
    v.jobs = {states_.data(), states_.size()};
    v.query = &query_;
    return v;
}

void Simulation::push_event(double time, EventKind kind, int job, long long epoch) {
    events_.push(SimEvent{time, kind, seq_++, job, epoch});
}

void Simulation::record_utilization() {
    const double fraction =
        static_cast<double>(busy_gpus_) / static_cast<double>(topo_.total_gpus());
    utilization_series_.emplace_back(now_, last_busy_fraction_);
    utilization_series_.emplace_back(now_, fraction);
    last_busy_fraction_ = fraction;
}

void Simulation::remove_id(std::vector<int>& ids, int job) {
    const auto it = std::find(ids.begin(), ids.end(), job);
    if (it == ids.end()) {
        throw std::logic_error(fmt::format("engine: job index {} missing from queue", job));
    }
    ids.erase(it);
}

void Simulation::throw_horizon(double event_time) const {
    std::string stuck;
    for (const auto& s : states_) {
        if (s.phase == Phase::Done) continue;
        if (!stuck.empty()) stuck += ", ";
        stuck += fmt::format("{}({})", s.spec.job_id, phase_name(s.phase));
    }
    throw HorizonError(fmt::format(
        "simulated time {} exceeds horizon guard {}; jobs not done: {}", event_time,
        config_.horizon_guard, stuck.empty() ? "<none>" : stuck));
}

MetricsReport Simulation::run() {
    const int n = static_cast<int>(states_.size());
    min_arrival_ = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0 || states_[static_cast<size_t>(i)].spec.arrival_time < min_arrival_) {
            min_arrival_ = states_[static_cast<size_t>(i)].spec.arrival_time;
        }
    }
    utilization_series_.emplace_back(min_arrival_, 0.0);
    jobs_remaining_series_.emplace_back(min_arrival_, n);

    for (int i = 0; i < n; ++i) {
        push_event(states_[static_cast<size_t>(i)].spec.arrival_time, EventKind::Arrival, i);
    }
    if (n > 0) push_event(0.0, EventKind::Round);

    while (done_count_ < n && !events_.empty()) {
        const SimEvent ev = events_.top();
        events_.pop();
        if (ev.time > config_.horizon_guard) throw_horizon(ev.time);
        now_ = ev.time;
        switch (ev.kind) {
        case EventKind::Arrival:
            on_arrival(ev.job);
            break;
        case EventKind::Round:
            on_round(true);
            break;
        case EventKind::TriggeredRound:
            triggered_round_at_ = -1.0;
            on_round(false);
            break;
        case EventKind::Completion:
            on_completion(ev.job, ev.epoch);
            break;
        }
        if (observer_) observer_(*this);
    }
    if (done_count_ < n) {
        throw std::logic_error("engine: event queue drained with jobs outstanding");
    }
    return finalize(jobs(), utilization_series_, jobs_remaining_series_);
}

void Simulation::on_arrival(int job) {
    JobState& state = states_[static_cast<size_t>(job)];
    if (state.phase != Phase::Pending) {
        throw std::logic_error(fmt::format("engine: duplicate arrival for job {}", job));
    }
    state.phase = Phase::Waiting;
    state.phase_entry = now_;
    state.last_assignment_ref = now_;
    waiting_.insert(std::lower_bound(waiting_.begin(), waiting_.end(), job), job);
}

void Simulation::on_round(bool periodic) {
    const EngineView v = view();
    policy_->begin_round(v);

    for (int victim : policy_->select_victims(v, running_, waiting_)) {
        preempt_job(victim);
    }

    if (policy_->migration_due()) run_migration_pass();

    for (int job : policy_->priority_order(view(), waiting_)) {
        JobState& state = states_[static_cast<size_t>(job)];
        if (state.phase != Phase::Waiting) continue;
        const TierAvail avail = query_.availability(state.spec.gpu_demand);
        if (!avail.any()) continue;
        const OfferDecision decision = policy_->on_offer(view(), job, avail);
        const auto cap = decision_tier(decision);
        if (!cap) continue;
        const auto placement = find_placement(state.spec.gpu_demand, *cap, ledger_, topo_);
        if (!placement) {
            throw std::logic_error(
                fmt::format("engine: policy accepted tier {} with no feasible placement",
                            tier_name(*cap)));
        }
        const double waited = now_ - state.last_assignment_ref;
        start_segment(job, *placement);
        policy_->on_accept(view(), job, *cap, waited);
    }

    if (periodic && done_count_ < static_cast<int>(states_.size())) {
        push_event(now_ + config_.round_period, EventKind::Round);
    }
}

void Simulation::run_migration_pass() {
    std::vector<int> order = fifo_order(view(), running_);
    for (int job : order) {
        JobState& state = states_[static_cast<size_t>(job)];
        if (state.phase != Phase::Running) continue;
        const auto cap = policy_->migration_target_cap(state);
        if (!cap) continue;
        // Decided against free GPUs only, before the job's own are released.
        const auto target = find_placement(state.spec.gpu_demand, *cap, ledger_, topo_);
        if (!target || target->tier >= state.placement->tier) continue;
        preempt_job(job);
        if (state.phase != Phase::Waiting) continue; // finished at the preemption instant
        start_segment(job, *target);
    }
}

namespace {
// Arrival order, ties by id; reuses the baseline helper.
}

void Simulation::start_segment(int job, const Placement& placement) {
    JobState& state = states_[static_cast<size_t>(job)];
    if (state.phase != Phase::Waiting) {
        throw std::logic_error(
            fmt::format("engine: starting segment for non-waiting job {}", state.spec.job_id));
    }
    if (placement.total_gpus() != state.spec.gpu_demand) {
        throw std::logic_error(fmt::format("engine: placement holds {} GPUs, job {} demands {}",
                                           placement.total_gpus(), state.spec.job_id,
                                           state.spec.gpu_demand));
    }
    ledger_.allocate(placement);
    busy_gpus_ += state.spec.gpu_demand;
    record_utilization();

    state.wait_time_accum += now_ - state.phase_entry;
    const double comm = latency_.comm_latency(*state.profile, placement, topo_,
                                              state.spec.compute_time_per_iter);
    state.comm_per_iter_current = comm;
    state.per_iter_time_current = state.spec.compute_time_per_iter + comm;
    state.placement = placement;
    state.run_start = now_;
    state.compute_start = now_ + config_.checkpoint_restore_overhead;
    state.placement_epoch += 1;
    state.phase = Phase::Running;
    state.phase_entry = now_;
    if (state.first_start < 0.0) state.first_start = now_;
    state.tier_history.emplace_back(now_, placement.tier);

    const double completion_at =
        state.compute_start +
        static_cast<double>(state.remaining_iterations()) * state.per_iter_time_current;
    push_event(completion_at, EventKind::Completion, job, state.placement_epoch);

    remove_id(waiting_, job);
    running_.insert(std::lower_bound(running_.begin(), running_.end(), job), job);
}

void Simulation::preempt_job(int job) {
    JobState& state = states_[static_cast<size_t>(job)];
    if (state.phase != Phase::Running) {
        throw std::logic_error(
            fmt::format("engine: preempting non-running job {}", state.spec.job_id));
    }
    const long long progressed = segment_iterations(state, now_);
    state.iterations_completed += progressed;
    state.comm_time_accum += static_cast<double>(progressed) * state.comm_per_iter_current;
    state.run_time_accum += now_ - state.run_start;

    ledger_.release(*state.placement);
    busy_gpus_ -= state.spec.gpu_demand;
    record_utilization();
    state.placement.reset();
    state.placement_epoch += 1; // invalidates the pending completion event
    state.num_preemptions += 1;
    remove_id(running_, job);

    if (state.remaining_iterations() == 0) {
        // Preempted at the exact completion boundary: the work is done.
        finish_job(job);
        return;
    }
    state.phase = Phase::Waiting;
    state.phase_entry = now_;
    state.last_assignment_ref = now_;
    waiting_.insert(std::lower_bound(waiting_.begin(), waiting_.end(), job), job);
}

void Simulation::finish_job(int job) {
    JobState& state = states_[static_cast<size_t>(job)];
    state.phase = Phase::Done;
    state.phase_entry = now_;
    state.completion_time = now_;
    done_count_ += 1;
    jobs_remaining_series_.emplace_back(now_, static_cast<long long>(states_.size()) -
                                                  done_count_);
    if (done_count_ < static_cast<int>(states_.size())) trigger_round();
}

void Simulation::trigger_round() {
    if (triggered_round_at_ == now_) return;
    push_event(now_, EventKind::TriggeredRound);
    triggered_round_at_ = now_;
}

void Simulation::on_completion(int job, long long epoch) {
    JobState& state = states_[static_cast<size_t>(job)];
    if (epoch != state.placement_epoch) return; // stale: superseded by a preemption
    if (state.phase != Phase::Running) {
        throw std::logic_error(
            fmt::format("engine: completion for non-running job {}", state.spec.job_id));
    }
    const long long remaining = state.remaining_iterations();
    state.iterations_completed = state.spec.total_expected_iterations;
    state.comm_time_accum += static_cast<double>(remaining) * state.comm_per_iter_current;
    state.run_time_accum += now_ - state.run_start;

    ledger_.release(*state.placement);
    busy_gpus_ -= state.spec.gpu_demand;
    record_utilization();
    state.placement.reset();
    state.placement_epoch += 1;
    remove_id(running_, job);
    finish_job(job);
}

MetricsReport run_simulation(std::vector<JobSpec> jobs, const ProfileTable& profiles,
                             const ClusterTopology& topo, Policy& policy, LatencyModel latency,
                             const SimConfig& config) {
    Simulation sim(std::move(jobs), profiles, topo, policy, latency, config);
    return sim.run();
}

} // namespace dallysim
