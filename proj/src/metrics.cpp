#include "dallysim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "dallysim/errors.hpp"

namespace dallysim {

double nearest_rank_percentile(const std::vector<double>& sorted_values, double percentile) {
    if (sorted_values.empty()) return 0.0;
    const auto n = static_cast<double>(sorted_values.size());
    auto rank = static_cast<size_t>(std::ceil(percentile / 100.0 * n));
    if (rank < 1) rank = 1;
    if (rank > sorted_values.size()) rank = sorted_values.size();
    return sorted_values[rank - 1];
}

StatSummary summarize(std::vector<double> values) {
    StatSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.median = nearest_rank_percentile(values, 50.0);
    s.p95 = nearest_rank_percentile(values, 95.0);
    s.p99 = nearest_rank_percentile(values, 99.0);
    return s;
}

MetricsReport finalize(std::span<const JobState> jobs,
                       std::vector<std::pair<double, double>> utilization_series,
                       std::vector<std::pair<double, long long>> jobs_remaining_series) {
    MetricsReport report;
    std::vector<double> jcts, queueing, comm;
    double min_arrival = 0.0;
    double max_completion = 0.0;
    bool first = true;
    for (const JobState& job : jobs) {
        if (job.phase != Phase::Done) {
            throw IncompleteRunError(fmt::format("job {} is {} at finalize time",
                                                 job.spec.job_id, phase_name(job.phase)));
        }
        JobRecord rec;
        rec.job_id = job.spec.job_id;
        rec.arrival = job.spec.arrival_time;
        rec.first_start = job.first_start;
        rec.completion = job.completion_time;
        rec.jct = job.completion_time - job.spec.arrival_time;
        rec.queueing_delay = job.wait_time_accum;
        rec.comm_latency_total = job.comm_time_accum;
        rec.num_preemptions = job.num_preemptions;
        rec.tier_history = job.tier_history;
        jcts.push_back(rec.jct);
        queueing.push_back(rec.queueing_delay);
        comm.push_back(rec.comm_latency_total);
        if (first || rec.arrival < min_arrival) min_arrival = rec.arrival;
        if (first || rec.completion > max_completion) max_completion = rec.completion;
        first = false;
        report.records.push_back(std::move(rec));
    }
    report.makespan = first ? 0.0 : max_completion - min_arrival;
    report.jct_stats = summarize(std::move(jcts));
    report.queueing_stats = summarize(std::move(queueing));
    report.comm_latency_stats = summarize(std::move(comm));
    report.utilization_series = std::move(utilization_series);
    report.jobs_remaining_series = std::move(jobs_remaining_series);
    return report;
}

namespace {

std::string num(double v) {
    return fmt::format("{:.6g}", v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SimError(fmt::format("{}: cannot open for writing", path.string()));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw SimError(fmt::format("{}: write failed", path.string()));
}

void write_stats(std::ofstream& out, const char* key, const StatSummary& s, bool trailing_comma) {
    out << fmt::format("  \"{}\": {{\"mean\": {}, \"median\": {}, \"p95\": {}, \"p99\": {}}}{}\n",
                       key, num(s.mean), num(s.median), num(s.p95), num(s.p99),
                       trailing_comma ? "," : "");
}

} // namespace

void write_outputs(const MetricsReport& report, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw SimError(fmt::format("{}: cannot create directory: {}", out_dir, ec.message()));

    {
        const auto path = dir / "summary.json";
        auto out = open_out(path);
        out << "{\n";
        out << fmt::format("  \"makespan\": {},\n", num(report.makespan));
        write_stats(out, "jct_stats", report.jct_stats, true);
        write_stats(out, "queueing_stats", report.queueing_stats, true);
        write_stats(out, "comm_latency_stats", report.comm_latency_stats, false);
        out << "}\n";
        finish(out, path);
    }
    {
        const auto path = dir / "jobs.csv";
        auto out = open_out(path);
        out << "# tier_history holds time:tier pairs separated by '|'\n";
        out << "job_id,arrival_s,first_start_s,completion_s,jct_s,queueing_delay_s,"
               "comm_latency_s,num_preemptions,tier_history\n";
        for (const auto& r : report.records) {
            std::string history;
            for (size_t i = 0; i < r.tier_history.size(); ++i) {
                if (i > 0) history += '|';
                history += fmt::format("{}:{}", num(r.tier_history[i].first),
                                       tier_name(r.tier_history[i].second));
            }
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.job_id, num(r.arrival),
                               num(r.first_start), num(r.completion), num(r.jct),
                               num(r.queueing_delay), num(r.comm_latency_total),
                               r.num_preemptions, history);
        }
        finish(out, path);
    }
    {
        const auto path = dir / "jct_cdf.csv";
        auto out = open_out(path);
        out << "# percentile convention: nearest-rank\n";
        out << "jct_s,cum_fraction\n";
        std::vector<double> jcts;
        for (const auto& r : report.records) jcts.push_back(r.jct);
        std::sort(jcts.begin(), jcts.end());
        for (size_t i = 0; i < jcts.size(); ++i) {
            const double frac = static_cast<double>(i + 1) / static_cast<double>(jcts.size());
            out << fmt::format("{},{}\n", num(jcts[i]), num(frac));
        }
        finish(out, path);
    }
    {
        const auto path = dir / "utilization.csv";
        auto out = open_out(path);
        out << "time_s,busy_fraction\n";
        for (const auto& [t, u] : report.utilization_series) {
            out << fmt::format("{},{}\n", num(t), num(u));
        }
        finish(out, path);
    }
    {
        const auto path = dir / "jobs_remaining.csv";
        auto out = open_out(path);
        out << "time_s,jobs_remaining\n";
        for (const auto& [t, n] : report.jobs_remaining_series) {
            out << fmt::format("{},{}\n", num(t), n);
        }
        finish(out, path);
    }
}

} // namespace dallysim
