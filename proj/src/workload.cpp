#include "dallysim/workload.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dallysim/csv.hpp"
#include "dallysim/errors.hpp"
#include "dallysim/rng.hpp"

namespace dallysim {

void JobSpec::validate() const {
    if (job_id.empty()) throw ValidationError("job: empty job_id");
    if (gpu_demand < 1) {
        throw ValidationError(fmt::format("job {}: gpu_demand must be >= 1", job_id));
    }
    if (total_expected_iterations < 1) {
        throw ValidationError(fmt::format("job {}: iterations must be >= 1", job_id));
    }
    if (compute_time_per_iter <= 0.0) {
        throw ValidationError(fmt::format("job {}: compute_time_per_iter must be > 0", job_id));
    }
    if (arrival_time < 0.0) {
        throw ValidationError(fmt::format("job {}: arrival_time must be >= 0", job_id));
    }
}

std::vector<JobSpec> load_trace(const std::string& path, const ProfileTable& profiles) {
    std::vector<JobSpec> jobs;
    std::set<std::string> ids;
    read_csv(path,
             {"job_id", "arrival_time_s", "model", "gpu_demand", "iterations",
              "compute_time_per_iter_s"},
             [&](int line, const std::vector<std::string>& f) {
                 JobSpec spec;
                 spec.job_id = f[0];
                 spec.arrival_time = parse_double_field(f[1], line, "arrival_time_s");
                 spec.model_name = to_lower(f[2]);
                 spec.gpu_demand = static_cast<int>(parse_int_field(f[3], line, "gpu_demand"));
                 spec.total_expected_iterations = parse_int_field(f[4], line, "iterations");
                 spec.compute_time_per_iter =
                     parse_double_field(f[5], line, "compute_time_per_iter_s");
                 try {
                     spec.validate();
                 } catch (const ValidationError& e) {
                     throw ParseError(fmt::format("{}:{}: {}", path, line, e.what()));
                 }
                 if (!profiles.contains(spec.model_name)) {
                     throw MissingProfileError(fmt::format("{}:{}: no profile for model '{}'",
                                                           path, line, spec.model_name));
                 }
                 if (!ids.insert(spec.job_id).second) {
                     throw ParseError(fmt::format("{}:{}: duplicate job_id '{}'", path, line,
                                                  spec.job_id));
                 }
                 jobs.push_back(std::move(spec));
             });
    return jobs;
}

void write_trace(const std::vector<JobSpec>& jobs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError(fmt::format("{}: cannot open for writing", path));
    out << "job_id,arrival_time_s,model,gpu_demand,iterations,compute_time_per_iter_s\n";
    for (const auto& j : jobs) {
        out << fmt::format("{},{:.17g},{},{},{},{:.17g}\n", j.job_id, j.arrival_time,
                           j.model_name, j.gpu_demand, j.total_expected_iterations,
                           j.compute_time_per_iter);
    }
    if (!out) throw SimError(fmt::format("{}: write failed", path));
}

std::vector<JobSpec> poissonize(std::vector<JobSpec> jobs, double rate, uint64_t seed) {
    if (rate <= 0.0) throw ValidationError("poissonize: rate must be > 0");
    std::mt19937_64 rng(seed);
    double t = 0.0;
    for (auto& j : jobs) {
        t += exp_draw(rng, rate);
        j.arrival_time = t;
    }
    std::stable_sort(jobs.begin(), jobs.end(), [](const JobSpec& a, const JobSpec& b) {
        return a.arrival_time < b.arrival_time;
    });
    return jobs;
}

std::vector<JobSpec> apply_arrival_mode(std::vector<JobSpec> jobs, ArrivalMode mode,
                                        double rate, uint64_t seed) {
    if (mode == ArrivalMode::Poisson) {
        return poissonize(std::move(jobs), rate, seed);
    }
    bool warned = false;
    for (auto& j : jobs) {
        if (j.arrival_time != 0.0 && !warned) {
            fmt::print(stderr, "warning: batch mode ignores trace arrival times (job {} at {} s)\n",
                       j.job_id, j.arrival_time);
            warned = true;
        }
        j.arrival_time = 0.0;
    }
    return jobs;
}

double ideal_run_time(const JobSpec& spec) {
    return static_cast<double>(spec.total_expected_iterations) * spec.compute_time_per_iter;
}

} // namespace dallysim
