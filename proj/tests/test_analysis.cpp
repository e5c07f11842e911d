#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mcprobe/analysis.hpp"
#include "mcprobe/errors.hpp"

using namespace mcprobe;

namespace {

double sweep_mean(const Topology& t, const RouteTree& rt)
{
    double sum = 0;
    const auto sweep = single_placement_sweep(t, rt, 0.2, 0.1);
    for (const auto& o : sweep) sum += o.accesses;
    return sum / static_cast<double>(sweep.size());
}

}  // namespace

TEST_CASE("segment access formula")
{
    CHECK(f_seg(8) == 5.0);
    CHECK(f_seg(1) == 2.0);
    CHECK(f_seg(6) == doctest::Approx(2.0 + std::log2(6.0)).epsilon(1e-12));
    for (int k = 0; k <= 16; ++k) CHECK(f_seg(std::ldexp(1.0, k)) == 2.0 + k);
    CHECK_THROWS_AS((void)f_seg(0.5), DomainError);
}

TEST_CASE("single-backbone formula")
{
    // S = B = 1: root + leaf + a binary search with the root end known.
    const auto uni = make_profile({56}, 1);
    CHECK(f_t1(uni, 56) == doctest::Approx(3.0 + std::log2(56.0)));

    // Four segments of 2^3, two of them branches: the first and the branch
    // terms carry 1 + k, the middle one 2 + k.
    const auto even = make_profile({8, 8, 8, 8}, 2);
    const double k = 3;
    const double by_hand = 1 + 2 + 0.25 * (1 + k) + 0.25 * (2 + k) + 2 * 0.25 * (1 + k);
    CHECK(f_t1(even, 32) == doctest::Approx(by_hand));

    CHECK_THROWS_AS((void)f_t1(make_profile({8, 8}, 1), 20), DomainError);
    CHECK_THROWS_AS((void)f_t1(make_profile({8, 8}, 3), 16), DomainError);
}

TEST_CASE("formula agrees with exhaustive location on the ideal topology")
{
    const auto t = ideal_topology();
    for (int L : {8, 4}) {
        CAPTURE(L);
        const auto rt = build_bbt(t, BbtVariant::t1, L);
        const double formula = f_t1(segment_profile(rt), 56);
        CHECK(std::abs(formula - sweep_mean(t, rt)) <= 1.0);
    }
    // T1 with L = 8: 3 backbone segments of 8, 4 branches of 8.
    const auto p = segment_profile(build_bbt(t, BbtVariant::t1, 8));
    CHECK(p.segments == 7);
    CHECK(p.paths == 4);
    CHECK(p.total() == 56);
    CHECK(f_t1(p, 56) == doctest::Approx(5.0 + 30.0 / 7.0));
}

TEST_CASE("segment study")
{
    const auto seven = segment_access_study(56, 7);
    const auto flat = std::find_if(seven.begin(), seven.end(), [](const StudyPoint& p) { return p.stdev == 0.0; });
    REQUIRE(flat != seven.end());
    CHECK(flat->expected == doctest::Approx(5.0));
    for (const auto& p : seven) {
        CHECK(std::accumulate(p.parts.begin(), p.parts.end(), 0) == 56);
        CHECK(p.expected >= flat->expected - 1e-12);
    }
    for (int S : {5, 6, 7}) {
        const auto pts = segment_access_study(56, S);
        const auto best = std::min_element(pts.begin(), pts.end(),
                                           [](const auto& a, const auto& b) { return a.expected < b.expected; });
        const auto calm = std::min_element(pts.begin(), pts.end(),
                                           [](const auto& a, const auto& b) { return a.stdev < b.stdev; });
        CHECK(best->stdev == doctest::Approx(calm->stdev));
    }
    const auto one = segment_access_study(56, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].stdev == 0.0);
    CHECK_THROWS_AS((void)segment_access_study(3, 4), DomainError);
}

TEST_CASE("accuracy and recall")
{
    CHECK(accuracy({true, true, true}) == 1.0);
    CHECK(accuracy(std::vector<bool>(100, false)) == 0.0);
    CHECK(accuracy({true, false, true, false}) == 0.5);
    CHECK_THROWS_AS((void)accuracy({}), DomainError);

    LocateReport r;
    const DirectedLink a{1, Direction::forward};
    const DirectedLink b{2, Direction::reverse};
    r.found = {{b, 5, 0.2}, {a, 3, 0.2}};
    CHECK(exact_match(r, {a, b}));
    CHECK_FALSE(exact_match(r, {a}));
    CHECK(recall(r, {a, DirectedLink{9, Direction::forward}}) == 0.5);
    r.unresolved.push_back({});
    CHECK_FALSE(exact_match(r, {a, b}));
}
