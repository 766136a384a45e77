#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "dallysim/metrics.hpp"
#include "dallysim/policy.hpp"

namespace dallysim {

struct SimConfig {
    double round_period = 360.0;              // simulated seconds between offers
    double checkpoint_restore_overhead = 0.0; // paid at every segment start
    uint64_t rng_seed = 0;
    double horizon_guard = 1e9; // abort past this simulated time
};

enum class EventKind { Arrival = 0, Round = 1, Completion = 2, TriggeredRound = 3 };

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::Round;
    long long seq = 0; // monotonic tiebreaker
    int job = -1;
    long long epoch = 0; // completion staleness guard
};

// Deterministic discrete-event core. Single-threaded per run; independent
// runs can execute concurrently.
class Simulation {
public:
    Simulation(std::vector<JobSpec> jobs, const ProfileTable& profiles, ClusterTopology topo,
               Policy& policy, LatencyModel latency, SimConfig config);

    MetricsReport run();

    // Test hook invoked after every processed event.
    void set_event_observer(std::function<void(const Simulation&)> observer);

    double now() const { return now_; }
    std::span<const JobState> jobs() const { return {states_.data(), states_.size()}; }
    const CapacityLedger& ledger() const { return ledger_; }
    const ClusterTopology& topo() const { return topo_; }
    int busy_gpus() const { return busy_gpus_; }

private:
    struct EventAfter {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.kind != b.kind) return a.kind > b.kind;
            return a.seq > b.seq;
        }
    };

    EngineView view() const;
    void push_event(double time, EventKind kind, int job = -1, long long epoch = 0);
    void on_arrival(int job);
    void on_round(bool periodic);
    void on_completion(int job, long long epoch);
    void start_segment(int job, const Placement& placement);
    void preempt_job(int job);
    void run_migration_pass();
    void finish_job(int job);
    void trigger_round();
    void record_utilization();
    void remove_id(std::vector<int>& ids, int job);
    [[noreturn]] void throw_horizon(double event_time) const;

    ClusterTopology topo_;
    Policy* policy_;
    LatencyModel latency_;
    SimConfig config_;
    std::vector<JobState> states_;
    CapacityLedger ledger_;
    PlacementQuery query_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> events_;
    std::vector<int> waiting_; // job ids, ascending
    std::vector<int> running_; // job ids, ascending
    double now_ = 0.0;
    long long seq_ = 0;
    int done_count_ = 0;
    int busy_gpus_ = 0;
    double min_arrival_ = 0.0;
    double triggered_round_at_ = -1.0;
    double last_busy_fraction_ = 0.0;
    std::vector<std::pair<double, double>> utilization_series_;
    std::vector<std::pair<double, long long>> jobs_remaining_series_;
    std::function<void(const Simulation&)> observer_;
};

// One-call wrapper around Simulation for single runs.
MetricsReport run_simulation(std::vector<JobSpec> jobs, const ProfileTable& profiles,
                             const ClusterTopology& topo, Policy& policy, LatencyModel latency,
                             const SimConfig& config);

} // namespace dallysim
