#include "dallysim/latency.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "dallysim/csv.hpp"
#include "dallysim/errors.hpp"

namespace dallysim {

ProfileTable ProfileTable::load(const std::string& path) {
    ProfileTable table;
    read_csv(path,
             {"model", "machine_frac", "rack_frac", "network_frac", "gradient_bytes", "skew"},
             [&](int line, const std::vector<std::string>& f) {
                 ModelProfile p;
                 p.model_name = to_lower(f[0]);
                 if (p.model_name.empty()) {
                     throw ParseError(fmt::format("{}:{}: empty model name", path, line));
                 }
                 p.comm_fraction[0] = parse_double_field(f[1], line, "machine_frac");
                 p.comm_fraction[1] = parse_double_field(f[2], line, "rack_frac");
                 p.comm_fraction[2] = parse_double_field(f[3], line, "network_frac");
                 for (double frac : p.comm_fraction) {
                     if (frac < 0.0) {
                         throw ParseError(fmt::format("{}:{}: negative comm fraction", path, line));
                     }
                 }
                 if (!f[4].empty()) {
                     const double bytes = parse_double_field(f[4], line, "gradient_bytes");
                     if (bytes <= 0.0) {
                         throw ParseError(fmt::format("{}:{}: gradient_bytes must be > 0", path, line));
                     }
                     p.gradient_bytes = bytes;
                 }
                 const std::string skew = to_lower(f[5]);
                 if (skew == "high") {
                     p.skew = SkewClass::High;
                 } else if (skew == "low") {
                     p.skew = SkewClass::Low;
                 } else {
                     throw ParseError(fmt::format("{}:{}: skew must be 'high' or 'low', got '{}'",
                                                  path, line, f[5]));
                 }
                 if (table.contains(p.model_name)) {
                     throw ParseError(fmt::format("{}:{}: duplicate model '{}'", path, line,
                                                  p.model_name));
                 }
                 table.add(std::move(p));
             });
    return table;
}

void ProfileTable::add(ModelProfile profile) {
    const std::string key = to_lower(profile.model_name);
    profiles_[key] = std::move(profile);
}

bool ProfileTable::contains(const std::string& model_name) const {
    return profiles_.count(to_lower(model_name)) > 0;
}

const ModelProfile& ProfileTable::at(const std::string& model_name) const {
    const auto it = profiles_.find(to_lower(model_name));
    if (it == profiles_.end()) {
        throw MissingProfileError(fmt::format("no profile for model '{}'", model_name));
    }
    return it->second;
}

namespace {

double ring_stage_cost(int n, double gradient_bytes, const TierLink& link) {
    if (n <= 1) return 0.0;
    if (link.bandwidth_gbps <= 0.0) {
        throw ConfigError("all-reduce cost: stage bandwidth must be > 0");
    }
    const double alpha = link.latency_us * 1e-6;
    const double bytes_per_s = link.bandwidth_gbps * 1e9 / 8.0;
    return 2.0 * (n - 1) * alpha +
           2.0 * (static_cast<double>(n - 1) / n) * gradient_bytes / bytes_per_s;
}

} // namespace

double hierarchical_allreduce_cost(double gradient_bytes, const Placement& placement,
                                   const ClusterTopology& topo) {
    if (gradient_bytes <= 0.0) {
        throw ValidationError("all-reduce cost: gradient_bytes must be > 0");
    }
    derive_tier(placement); // rejects empty placements

    int max_slot_gpus = 0;
    std::map<int, std::set<int>> machines_by_rack;
    for (const auto& s : placement.slots) {
        max_slot_gpus = std::max(max_slot_gpus, s.gpus);
        machines_by_rack[s.rack].insert(s.machine);
    }
    size_t max_machines_in_rack = 0;
    for (const auto& [rack, machines] : machines_by_rack) {
        max_machines_in_rack = std::max(max_machines_in_rack, machines.size());
    }
    const int n1 = max_slot_gpus;
    const int n2 = static_cast<int>(max_machines_in_rack);
    const int n3 = static_cast<int>(machines_by_rack.size());

    return ring_stage_cost(n1, gradient_bytes, topo.machine_link) +
           ring_stage_cost(n2, gradient_bytes, topo.rack_link) +
           ring_stage_cost(n3, gradient_bytes, topo.network_link);
}

double LatencyModel::comm_latency(const ModelProfile& profile, const Placement& placement,
                                  const ClusterTopology& topo,
                                  double compute_time_per_iter) const {
    if (compute_time_per_iter <= 0.0) {
        throw ValidationError("comm_latency: compute_time_per_iter must be > 0");
    }
    const Tier tier = derive_tier(placement);
    switch (variant) {
    case LatencyVariant::ProfileTable:
        return compute_time_per_iter * profile.fraction(tier);
    case LatencyVariant::AnalyticalAllReduce:
        if (!profile.gradient_bytes) {
            throw ConfigError(fmt::format(
                "model '{}' has no gradient_bytes; required by the analytical latency model",
                profile.model_name));
        }
        return hierarchical_allreduce_cost(*profile.gradient_bytes, placement, topo);
    }
    throw std::logic_error("unreachable latency variant");
}

} // namespace dallysim
