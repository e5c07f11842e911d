#include "mcprobe/probesim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "mcprobe/errors.hpp"

namespace mcprobe {

namespace {

void check_range(const RateRange& r, const char* what)
{
    if (!(r.lo >= 0.0 && r.lo <= r.hi && r.hi <= 1.0))
        throw ConfigError(fmt::format("{} loss range [{}, {}] must satisfy 0 <= lo <= hi <= 1", what, r.lo, r.hi));
}

double draw(std::mt19937_64& rng, const RateRange& r)
{
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

}  // namespace

void validate(const LossSpec& spec)
{
    check_range(spec.high, "high");
    check_range(spec.light, "light");
    if (spec.high_loss_count < 0) throw ConfigError("high-loss count must be non-negative");
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

LossModel make_loss_model(const Topology& t, const LossSpec& spec, std::uint64_t seed)
{
    validate(spec);
    const int n = static_cast<int>(t.directed_link_count());
    std::mt19937_64 rng(seed);
    LossModel lm;
    lm.rate.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<int> high;
    if (!spec.explicit_high.empty()) {
        for (const auto& d : spec.explicit_high) {
            if (d.link < 0 || d.index() >= n) throw ConfigError(fmt::format("high-loss link {} out of range", d.link));
            high.push_back(d.index());
        }
        std::sort(high.begin(), high.end());
        if (std::adjacent_find(high.begin(), high.end()) != high.end())
            throw ConfigError("duplicate explicit high-loss link");
    } else {
        if (spec.high_loss_count > n)
            throw ConfigError(fmt::format("{} high-loss links requested but only {} directed links exist",
                                          spec.high_loss_count, n));
        // Partial Fisher-Yates: uniform placement without replacement.
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < spec.high_loss_count; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        high.assign(pool.begin(), pool.begin() + spec.high_loss_count);
        std::sort(high.begin(), high.end());
    }

    for (int i : high) {
        lm.rate[i] = draw(rng, spec.high);
        lm.truth.push_back(DirectedLink::from_index(i));
    }
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(high.begin(), high.end(), i)) lm.rate[i] = draw(rng, spec.light);
    return lm;
}

FlowStats simulate_probing(const RouteTree& rt, const LossModel& lm, std::int64_t packets, std::uint64_t seed)
{
    if (packets < 1) throw ConfigError("at least one probe packet is required");
    std::mt19937_64 rng(seed);
    FlowStats fs;
    fs.packets_sent = packets;
    fs.count.assign(rt.size(), 0);
    // Preorder: a parent's count is final before any child is drawn.
    for (std::size_t i = 0; i < rt.size(); ++i) {
        const auto& node = rt.node(static_cast<int>(i));
        const std::int64_t above = node.parent < 0 ? packets : fs.count[node.parent];
        const double keep = 1.0 - lm[node.link];
        if (above == 0 || keep <= 0.0) {
            fs.count[i] = 0;
        } else if (keep >= 1.0) {
            fs.count[i] = above;
        } else {
            fs.count[i] = std::binomial_distribution<std::int64_t>(above, keep)(rng);
        }
    }
    return fs;
}

FlowStats expected_counts(const RouteTree& rt, const LossModel& lm, std::int64_t packets)
{
    if (packets < 1) throw ConfigError("at least one probe packet is required");
    FlowStats fs;
    fs.packets_sent = packets;
    fs.count.assign(rt.size(), 0);
    fs.expected.assign(rt.size(), 0.0);
    for (std::size_t i = 0; i < rt.size(); ++i) {
        const auto& node = rt.node(static_cast<int>(i));
        const double above = node.parent < 0 ? static_cast<double>(packets) : fs.expected[node.parent];
        fs.expected[i] = above * (1.0 - lm[node.link]);
        fs.count[i] = std::llround(fs.expected[i]);
    }
    return fs;
}

void write_flow_stats_csv(std::ostream& out, const FlowStats& fs, const RouteTree& rt, const Topology& t)
{
    out << "port,count\n";
    out << t.port_label(PortId::root()) << ',' << fs.packets_sent << '\n';
    for (std::size_t i = 0; i < rt.size(); ++i)
        out << t.port_label(rt.port(static_cast<int>(i))) << ',' << fs.count[i] << '\n';
}

}  // namespace mcprobe
