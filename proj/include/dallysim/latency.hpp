#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "dallysim/topology.hpp"

namespace dallysim {

enum class SkewClass { High, Low };

// Per-model communication characteristics. comm_fraction[t] is the
// communication time at tier t as a fraction of compute time
// (1.16 means 116% of compute).
struct ModelProfile {
    std::string model_name;
    std::array<double, 3> comm_fraction{0.0, 0.0, 0.0}; // indexed by Tier
    std::optional<double> gradient_bytes;
    SkewClass skew = SkewClass::Low;

    double fraction(Tier t) const { return comm_fraction[static_cast<size_t>(t)]; }
};

// Model profiles keyed by lowercased model name, loaded from CSV with header
// model,machine_frac,rack_frac,network_frac,gradient_bytes,skew
class ProfileTable {
public:
    static ProfileTable load(const std::string& path);

    void add(ModelProfile profile);
    bool contains(const std::string& model_name) const;
    const ModelProfile& at(const std::string& model_name) const; // MissingProfileError
    size_t size() const { return profiles_.size(); }

private:
    std::map<std::string, ModelProfile> profiles_;
};

enum class LatencyVariant { ProfileTable, AnalyticalAllReduce };

// Cost of a staged ring all-reduce over the placement's three tiers:
// intra-machine over the largest slot, inter-machine within the widest
// involved rack, inter-rack over the involved racks. Each stage with n > 1
// contributes 2(n-1)*alpha + 2*((n-1)/n)*S/B; stages with n = 1 are free.
double hierarchical_allreduce_cost(double gradient_bytes, const Placement& placement,
                                   const ClusterTopology& topo);

// Per-iteration communication latency of a job under a placement.
struct LatencyModel {
    LatencyVariant variant = LatencyVariant::ProfileTable;

    double comm_latency(const ModelProfile& profile, const Placement& placement,
                        const ClusterTopology& topo, double compute_time_per_iter) const;
};

} // namespace dallysim
