#pragma once

#include <span>
#include <string>
#include <vector>

#include "dallysim/policy.hpp"

namespace dallysim {

struct JobRecord {
    std::string job_id;
    double arrival = 0.0;
    double first_start = 0.0;
    double completion = 0.0;
    double jct = 0.0;
    double queueing_delay = 0.0;
    double comm_latency_total = 0.0;
    int num_preemptions = 0;
    std::vector<std::pair<double, Tier>> tier_history;
};

// Percentiles are nearest-rank on the sorted sample.
struct StatSummary {
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
};

StatSummary summarize(std::vector<double> values);
double nearest_rank_percentile(const std::vector<double>& sorted_values, double percentile);

struct MetricsReport {
    double makespan = 0.0;
    StatSummary jct_stats;
    StatSummary queueing_stats;
    StatSummary comm_latency_stats;
    std::vector<std::pair<double, double>> utilization_series;     // (time, busy fraction)
    std::vector<std::pair<double, long long>> jobs_remaining_series; // (time, count)
    std::vector<JobRecord> records;
};

// Builds the end-of-run report. Throws IncompleteRunError if any job is not
// Done.
MetricsReport finalize(std::span<const JobState> jobs,
                       std::vector<std::pair<double, double>> utilization_series,
                       std::vector<std::pair<double, long long>> jobs_remaining_series);

// Writes summary.json, jobs.csv, jct_cdf.csv, utilization.csv and
// jobs_remaining.csv under out_dir (created if missing). Numbers are fixed at
// 6 significant digits so reruns diff cleanly.
void write_outputs(const MetricsReport& report, const std::string& out_dir);

} // namespace dallysim
