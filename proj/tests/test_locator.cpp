#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "mcprobe/analysis.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/locator.hpp"

using namespace mcprobe;

namespace {

const std::vector<RouteParams> kSchemes = {
    {Scheme::unicursal, 8}, {Scheme::bbt_t1, 8}, {Scheme::bbt_t2, 8}, {Scheme::bbt_t1, 4},
    {Scheme::bbt_t2, 4},    {Scheme::spt_m1, 8}, {Scheme::spt_m2, 8},
};

LossModel single(const Topology& t, DirectedLink d, double rate)
{
    LossSpec spec;
    spec.high = {rate, rate};
    spec.explicit_high = {d};
    return make_loss_model(t, spec, 0);
}

LocateReport run_exact(const RouteTree& rt, const LossModel& lm, double h = 0.1)
{
    const auto fs = expected_counts(rt, lm, 100000);
    FlowStatsSource src(fs, true);
    StatsOracle oracle(rt, src);
    return locate(rt, oracle, {h});
}

class Failing final : public StatsSource {
public:
    explicit Failing(int budget) : budget_(budget) {}
    double count(int) override
    {
        if (budget_-- <= 0) throw std::runtime_error("switch unreachable");
        return 100.0;
    }

private:
    int budget_;
};

}  // namespace

TEST_CASE("range plr")
{
    CHECK(*range_plr(100000, 100000) == 0.0);
    CHECK(*range_plr(100000, 83000) == doctest::Approx(0.17));
    CHECK_FALSE(range_plr(0, 0));
    bool odd = false;
    CHECK(*range_plr(100, 120, &odd) == 0.0);
    CHECK(odd);
}

TEST_CASE("oracle caching")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t2, 8});
    const auto fs = expected_counts(rt, single(t, {0, Direction::forward}, 0.0), 1000);
    FlowStatsSource src(fs, true);
    StatsOracle oracle(rt, src);
    oracle.query(-1, QueryReason::root);
    oracle.query(3, QueryReason::midpoint);
    oracle.query(-1, QueryReason::root);
    oracle.query(3, QueryReason::midpoint);
    CHECK(oracle.access_count() == 2);
    CHECK(oracle.cached(3));
    CHECK_FALSE(oracle.cached(4));
}

TEST_CASE("zero loss needs only root and leaves")
{
    const auto t = ideal_topology();
    for (const auto& p : kSchemes) {
        const auto rt = build_route(t, p);
        LossSpec spec;
        spec.high_loss_count = 0;
        const auto report = run_exact(rt, make_loss_model(t, spec, 1));
        CHECK(report.found.empty());
        CHECK(report.access_count == 1 + static_cast<int>(rt.leaves().size()));
        CHECK(report.trace.front().reason == QueryReason::root);
        for (std::size_t i = 1; i < report.trace.size(); ++i) CHECK(report.trace[i].reason == QueryReason::leaf);
    }
}

TEST_CASE("exhaustive single placements are located exactly")
{
    const auto t = ideal_topology();
    for (const auto& p : kSchemes) {
        CAPTURE(route_name(p));
        const auto rt = build_route(t, p);
        const int B = static_cast<int>(rt.leaves().size());
        for (const auto& d : t.directed_links()) {
            const auto lm = single(t, d, 0.2);
            const auto report = run_exact(rt, lm);
            REQUIRE(report.found.size() == 1);
            CHECK(report.found[0].link == d);
            CHECK(report.found[0].rate == doctest::Approx(0.2));
            CHECK(report.unresolved.empty());
            // Bound: root + leaves + both ends of the segment + log2 s midpoints.
            const auto node = *rt.node_for(d);
            const auto seg = rt.segments()[rt.node(node).segment];
            const int s = static_cast<int>(seg.nodes.size());
            CHECK(report.access_count <= 1 + B + 2 + static_cast<int>(std::ceil(std::log2(s))));
        }
    }
}

TEST_CASE("reported rate comes from the two adjacent ports")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t1, 8});
    LossSpec spec;
    spec.high_loss_count = 2;
    spec.light = {0.0, 0.02};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto lm = make_loss_model(t, spec, seed);
        const auto fs = simulate_probing(rt, lm, 100000, seed);
        FlowStatsSource src(fs);
        StatsOracle oracle(rt, src);
        const auto report = locate(rt, oracle);
        for (const auto& f : report.found) {
            const int parent = rt.node(f.position).parent;
            const double above = parent < 0 ? fs.packets_sent : fs.count[parent];
            CHECK(f.rate == doctest::Approx(1.0 - fs.count[f.position] / above));
            CHECK(f.rate > 0.1);
        }
    }
}

TEST_CASE("noisy counts never crash and only report lossy links")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto t = testing::random_graph(seed);
        const auto rt = build_route(t, {Scheme::bbt_t1, 4});
        LossSpec spec;
        spec.high_loss_count = 2;
        spec.high = {0.3, 0.9};
        spec.light = {0.0, 0.09};
        const auto lm = make_loss_model(t, spec, seed);
        const auto fs = simulate_probing(rt, lm, 200, seed);
        FlowStatsSource src(fs);
        StatsOracle oracle(rt, src);
        const auto report = locate(rt, oracle);
        CHECK_FALSE(report.aborted);
        for (const auto& f : report.found) CHECK(f.rate > 0.1);
        CHECK(report.access_count == static_cast<int>(report.access_sequence.size()));
    }
}

TEST_CASE("shared port is queried before any midpoint")
{
    // Two lossy links below the same branch node of the first backbone.
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t1, 8});
    const auto paths = rt.terminal_paths();
    // The last path runs the whole backbone; lose links deep in it and in the
    // second-to-last one after their common prefix.
    LossSpec spec;
    spec.high = {0.2, 0.2};
    spec.explicit_high = {paths[3].links[26], paths[2].links[27]};
    const auto report = run_exact(rt, make_loss_model(t, spec, 0));
    CHECK(report.found.size() == 2);
    std::size_t shared = report.trace.size();
    std::size_t midpoint = report.trace.size();
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        if (report.trace[i].reason == QueryReason::shared_port && shared == report.trace.size()) shared = i;
        if (report.trace[i].reason == QueryReason::midpoint && midpoint == report.trace.size()) midpoint = i;
    }
    CHECK(shared < midpoint);
}

TEST_CASE("single lossy path stays below its nearest branch port")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t1, 8});
    const auto last = rt.leaves().back();
    const auto lm = single(t, rt.node(last).link, 0.2);
    const auto report = run_exact(rt, lm);
    // Branch point of the last path: parent of its final segment.
    const auto& seg = rt.segments()[rt.node(last).segment];
    const int branch = rt.node(seg.nodes.front()).parent;
    for (const auto& rec : report.trace) {
        if (rec.reason == QueryReason::root || rec.reason == QueryReason::leaf) continue;
        CHECK(rt.is_ancestor(branch, rec.position));
    }
    CHECK(access_order_trace(report, rt, t).find("branch-port") != std::string::npos);
}

TEST_CASE("oracle failure aborts with a partial report")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t2, 8});
    Failing src(3);
    StatsOracle oracle(rt, src);
    const auto report = locate(rt, oracle);
    CHECK(report.aborted);
    CHECK(report.access_count == 3);
    CHECK(report.error == "switch unreachable");
    CHECK_THROWS_AS((void)locate(rt, oracle, {1.5}), ConfigError);
}

TEST_CASE("dead upstream ranges are surfaced")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::unicursal, 8});
    LossSpec spec;
    spec.high = {1.0, 1.0};
    spec.explicit_high = {rt.node(10).link, rt.node(40).link};
    const auto report = run_exact(rt, make_loss_model(t, spec, 0));
    REQUIRE(report.found.size() == 1);
    CHECK(report.found[0].link == rt.node(10).link);
    CHECK_FALSE(report.unresolved.empty());
}
