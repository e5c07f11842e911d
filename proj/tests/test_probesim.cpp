#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/probesim.hpp"

using namespace mcprobe;

namespace {

LossModel flat(const Topology& t, double rate)
{
    LossModel lm;
    lm.rate.assign(t.directed_link_count(), rate);
    return lm;
}

}  // namespace

TEST_CASE("loss model placement")
{
    const auto t = ideal_topology();
    LossSpec spec;  // 1 high-loss link in [0.15, 0.2], no light loss
    const auto lm = make_loss_model(t, spec, 42);
    REQUIRE(lm.truth.size() == 1);
    int lossy = 0;
    for (double r : lm.rate) {
        if (r == 0.0) continue;
        ++lossy;
        CHECK(r >= 0.15);
        CHECK(r <= 0.2);
    }
    CHECK(lossy == 1);
    CHECK(lm[lm.truth[0]] >= 0.15);

    spec.high_loss_count = 0;
    const auto none = make_loss_model(t, spec, 1);
    CHECK(std::all_of(none.rate.begin(), none.rate.end(), [](double r) { return r == 0.0; }));

    spec.high_loss_count = 4;
    spec.light = {0.0, 0.02};
    const auto a = make_loss_model(t, spec, 9);
    const auto b = make_loss_model(t, spec, 9);
    CHECK(a.rate == b.rate);
    CHECK(a.truth == b.truth);
    CHECK(a.truth.size() == 4);

    spec.high_loss_count = 57;
    CHECK_THROWS_AS((void)make_loss_model(t, spec, 1), ConfigError);
    spec.high_loss_count = 1;
    spec.light = {0.3, 0.2};
    CHECK_THROWS_AS((void)make_loss_model(t, spec, 1), ConfigError);
}

TEST_CASE("lossless and absorbing links")
{
    const auto t = ideal_topology();
    const auto rt = build_route(t, {Scheme::bbt_t2, 8});
    const auto fs = simulate_probing(rt, flat(t, 0.0), 100000, 3);
    CHECK(fs.packets_sent == 100000);
    CHECK(std::all_of(fs.count.begin(), fs.count.end(), [](auto c) { return c == 100000; }));

    auto lm = flat(t, 0.0);
    const int victim = 3;
    lm.rate[rt.node(victim).link.index()] = 1.0;
    const auto cut = simulate_probing(rt, lm, 1000, 3);
    for (int i = 0; i < static_cast<int>(rt.size()); ++i)
        CHECK((cut.count[i] == 0) == rt.is_ancestor(victim, i));
}

TEST_CASE("binomial thinning statistics")
{
    const auto t = testing::from_edges("A B\nB C\nC D\n", "A");
    const auto rt = build_unicursal(t);
    auto lm = flat(t, 0.0);
    lm.rate[rt.node(0).link.index()] = 0.17;
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto fs = simulate_probing(rt, lm, 100000, seed);
        if (std::abs(fs.count[0] - 83000.0) <= 1000.0) ++inside;
    }
    CHECK(inside >= 198);

    // Per-packet fate on a 3-link path is multinomial; chi-square with 3
    // degrees of freedom against the 99% quantile.
    lm = flat(t, 0.0);
    const double rates[] = {0.1, 0.2, 0.3};
    for (int i = 0; i < 3; ++i) lm.rate[rt.node(i).link.index()] = rates[i];
    const double p[] = {0.1, 0.9 * 0.2, 0.9 * 0.8 * 0.3, 0.9 * 0.8 * 0.7};
    const int N = 10000;
    int accepted = 0;
    const int runs = 200;
    for (int seed = 0; seed < runs; ++seed) {
        const auto fs = simulate_probing(rt, lm, N, static_cast<std::uint64_t>(seed));
        const double obs[] = {static_cast<double>(N - fs.count[0]), static_cast<double>(fs.count[0] - fs.count[1]),
                              static_cast<double>(fs.count[1] - fs.count[2]), static_cast<double>(fs.count[2])};
        double chi = 0;
        for (int k = 0; k < 4; ++k) chi += (obs[k] - N * p[k]) * (obs[k] - N * p[k]) / (N * p[k]);
        if (chi < 11.345) ++accepted;
    }
    CHECK(accepted >= runs * 95 / 100);
}

TEST_CASE("expected counts")
{
    const auto t = testing::from_edges("A B\nB C\n", "A");
    const auto rt = build_unicursal(t);
    auto lm = flat(t, 0.0);
    lm.rate[rt.node(0).link.index()] = 0.1;
    lm.rate[rt.node(1).link.index()] = 0.1;
    const auto fs = expected_counts(rt, lm, 1000);
    CHECK(fs.expected[1] == doctest::Approx(810.0));
    CHECK(fs.count[1] == 810);

    const auto ideal = ideal_topology();
    const auto tree = build_bbt(ideal, BbtVariant::t1, 8);
    auto hl = flat(ideal, 0.0);
    const int victim = 5;
    hl.rate[tree.node(victim).link.index()] = 0.2;
    const auto e = expected_counts(tree, hl, 100000);
    for (int i = 0; i < static_cast<int>(tree.size()); ++i)
        CHECK(e.expected[i] == doctest::Approx(tree.is_ancestor(victim, i) ? 80000.0 : 100000.0));

    // Mean of the sampler agrees with the oracle within three standard errors.
    auto small = flat(t, 0.0);
    small.rate[rt.node(0).link.index()] = 0.3;
    small.rate[rt.node(2).link.index()] = 0.05;
    const int seeds = 200;
    std::vector<double> sum(rt.size(), 0.0);
    std::vector<double> sq(rt.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const auto fs2 = simulate_probing(rt, small, 5000, static_cast<std::uint64_t>(s));
        for (std::size_t i = 0; i < rt.size(); ++i) {
            sum[i] += fs2.count[i];
            sq[i] += static_cast<double>(fs2.count[i]) * fs2.count[i];
        }
    }
    const auto want = expected_counts(rt, small, 5000);
    for (std::size_t i = 0; i < rt.size(); ++i) {
        const double mean = sum[i] / seeds;
        const double var = sq[i] / seeds - mean * mean;
        CHECK(std::abs(mean - want.expected[i]) <= 3.0 * std::sqrt(var / seeds) + 1e-9);
    }
}

TEST_CASE("counts never increase downstream")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = testing::random_graph(seed);
        const auto rt = build_route(t, {Scheme::bbt_t1, 5});
        LossSpec spec;
        spec.high_loss_count = 3;
        spec.light = {0.0, 0.05};
        const auto fs = simulate_probing(rt, make_loss_model(t, spec, seed), 20000, seed);
        for (int i = 0; i < static_cast<int>(rt.size()); ++i) {
            const int parent = rt.node(i).parent;
            CHECK(fs.count[i] <= (parent < 0 ? fs.packets_sent : fs.count[parent]));
        }
    }
}

TEST_CASE("flow stats csv")
{
    const auto t = testing::triangle();
    const auto rt = build_unicursal(t);
    std::ostringstream out;
    write_flow_stats_csv(out, simulate_probing(rt, flat(t, 0.0), 10, 1), rt, t);
    const auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 8);
    CHECK(text.find("root@A,10") != std::string::npos);
}

TEST_CASE("seed mixing separates streams")
{
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(5, 7) == mix_seed(5, 7));
}
