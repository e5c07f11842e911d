#include "mcprobe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "mcprobe/errors.hpp"

namespace mcprobe {

namespace {

double population_stdev(const std::vector<int>& xs)
{
    if (xs.empty()) return 0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0;
    for (int x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

double f_seg(double s)
{
    if (!(s >= 1.0)) throw DomainError(fmt::format("segment length {} is below 1", s));
    return 2.0 + std::log2(s);
}

int SegmentProfile::total() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }

SegmentProfile make_profile(std::vector<int> lengths, int paths)
{
    SegmentProfile p;
    p.segments = static_cast<int>(lengths.size());
    p.paths = paths;
    p.stdev = population_stdev(lengths);
    p.lengths = std::move(lengths);
    return p;
}

SegmentProfile segment_profile(const RouteTree& rt)
{
    std::vector<int> lengths;
    int branches = 0;
    for (const auto& s : rt.segments()) {
        lengths.push_back(static_cast<int>(s.nodes.size()));
        if (s.kind == SegmentKind::branch) ++branches;
    }
    return make_profile(std::move(lengths), branches);
}

double f_t1(const SegmentProfile& profile, int n)
{
    const int S = profile.segments;
    const int B = profile.paths;
    if (n < 1 || S < 1 || B < 1 || B > S || static_cast<int>(profile.lengths.size()) != S)
        throw DomainError("segment profile is inconsistent");
    if (profile.total() != n) throw DomainError(fmt::format("segment lengths sum to {}, expected {}", profile.total(), n));
    for (int s : profile.lengths)
        if (s < 1) throw DomainError("segment of length 0");

    double sum = 1.0 + B;
    for (int i = 1; i <= S; ++i) {
        const double s = profile.lengths[i - 1];
        const double w = s / n;
        if (i > S - B)
            sum += w * (1.0 + std::log2(s));  // leaf end already known
        else if (i == 1)
            sum += w * (1.0 + std::log2(s));  // root end already known
        else
            sum += w * f_seg(s);
    }
    return sum;
}

std::vector<StudyPoint> segment_access_study(int n, int segments)
{
    if (segments < 1 || n < segments) throw DomainError("need n >= S >= 1");
    std::vector<StudyPoint> out;
    std::vector<int> parts;
    // Parts in non-increasing order, each <= cap.
    auto rec = [&](auto&& self, int left, int slots, int cap) -> void {
        if (slots == 0) {
            if (left != 0) return;
            StudyPoint p;
            p.parts = parts;
            p.stdev = population_stdev(parts);
            for (int s : parts) p.expected += static_cast<double>(s) / n * f_seg(s);
            out.push_back(std::move(p));
            return;
        }
        const int hi = std::min(cap, left - (slots - 1));
        const int lo = (left + slots - 1) / slots;  // ceil: the rest cannot exceed this part
        for (int s = hi; s >= lo; --s) {
            parts.push_back(s);
            self(self, left - s, slots - 1, s);
            parts.pop_back();
        }
    };
    rec(rec, n, segments, n);
    return out;
}

bool exact_match(const LocateReport& report, const std::vector<DirectedLink>& truth)
{
    if (report.aborted || !report.unresolved.empty()) return false;
    auto want = truth;
    std::sort(want.begin(), want.end());
    return report.found_links() == want;
}

double recall(const LocateReport& report, const std::vector<DirectedLink>& truth)
{
    if (truth.empty()) return 1.0;
    const auto found = report.found_links();
    const auto hits = std::count_if(truth.begin(), truth.end(),
                                    [&](const DirectedLink& d) { return std::binary_search(found.begin(), found.end(), d); });
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double accuracy(const std::vector<bool>& exact)
{
    if (exact.empty()) throw DomainError("accuracy of zero trials");
    return static_cast<double>(std::count(exact.begin(), exact.end(), true)) / static_cast<double>(exact.size());
}

std::vector<PlacementOutcome> single_placement_sweep(const Topology& t, const RouteTree& rt, double rate,
                                                     double threshold, std::int64_t packets)
{
    std::vector<PlacementOutcome> out;
    for (const auto& d : t.directed_links()) {
        LossSpec spec;
        spec.high = {rate, rate};
        spec.explicit_high = {d};
        const auto lm = make_loss_model(t, spec, 0);
        const auto fs = expected_counts(rt, lm, packets);
        FlowStatsSource source(fs, true);
        StatsOracle oracle(rt, source);
        const auto report = locate(rt, oracle, {threshold});
        out.push_back({d, report.access_count, exact_match(report, lm.truth)});
    }
    return out;
}

}  // namespace mcprobe
