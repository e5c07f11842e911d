#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mcprobe/routes.hpp"
#include "mcprobe/topology.hpp"

namespace mcprobe {

struct RateRange {
    double lo = 0;
    double hi = 0;
};

struct LossSpec {
    int high_loss_count = 1;
    RateRange high{0.15, 0.2};
    RateRange light{0.0, 0.0};
    /// When non-empty, these links are the high-loss set and
    /// high_loss_count is ignored.
    std::vector<DirectedLink> explicit_high;
};

/// Throws ConfigError unless 0 <= lo <= hi <= 1 for both ranges and the
/// count is non-negative.
void validate(const LossSpec& spec);

struct LossModel {
    std::vector<double> rate;  // by directed-link index
    std::vector<DirectedLink> truth;  // ascending

    [[nodiscard]] double operator[](DirectedLink d) const { return rate[static_cast<std::size_t>(d.index())]; }
};

/// splitmix64 finalizer; used to derive independent per-trial streams.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

[[nodiscard]] LossModel make_loss_model(const Topology& t, const LossSpec& spec, std::uint64_t seed);

/// Probe arrivals per tree node (i.e. per port at the head of its link).
struct FlowStats {
    std::int64_t packets_sent = 0;  // root port count
    std::vector<std::int64_t> count;  // by tree node
    std::vector<double> expected;  // filled by expected_counts() only
};

/// Binomial thinning down the tree, children thinned independently.
[[nodiscard]] FlowStats simulate_probing(const RouteTree& rt, const LossModel& lm, std::int64_t packets,
                                         std::uint64_t seed);
/// Noise-free counts: N times the survival product along the path. Integer
/// counts are the rounded reals.
[[nodiscard]] FlowStats expected_counts(const RouteTree& rt, const LossModel& lm, std::int64_t packets);

/// "port,count" rows, root first.
void write_flow_stats_csv(std::ostream& out, const FlowStats& fs, const RouteTree& rt, const Topology& t);

}  // namespace mcprobe
