#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dallysim/latency.hpp"

namespace dallysim {

// Immutable trace-derived job description.
struct JobSpec {
    std::string job_id;
    double arrival_time = 0.0; // seconds
    std::string model_name;
    int gpu_demand = 1;
    long long total_expected_iterations = 1;
    double compute_time_per_iter = 0.0; // seconds

    void validate() const; // throws ValidationError
};

enum class ArrivalMode { Batch, Poisson };

struct WorkloadSpec {
    std::vector<JobSpec> jobs;
    ArrivalMode arrival_mode = ArrivalMode::Batch;
    double poisson_rate = 0.0; // jobs per second
    uint64_t seed = 0;
};

// Parses a trace CSV with header
// job_id,arrival_time_s,model,gpu_demand,iterations,compute_time_per_iter_s
// Jobs are returned in file order. Every model must exist in `profiles`.
std::vector<JobSpec> load_trace(const std::string& path, const ProfileTable& profiles);

void write_trace(const std::vector<JobSpec>& jobs, const std::string& path);

// Replaces arrival times with a seeded homogeneous Poisson process in
// job-list order; the result is sorted by arrival time.
std::vector<JobSpec> poissonize(std::vector<JobSpec> jobs, double rate, uint64_t seed);

// Batch mode zeroes every arrival time (warning on stderr if any row had a
// nonzero arrival); Poisson mode delegates to poissonize.
std::vector<JobSpec> apply_arrival_mode(std::vector<JobSpec> jobs, ArrivalMode mode,
                                        double rate, uint64_t seed);

// Communication-free run time: iterations x compute time per iteration.
double ideal_run_time(const JobSpec& spec);

} // namespace dallysim
