#pragma once

#include <vector>

#include "mcprobe/locator.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

/// Expected port queries to isolate one lossy link in a segment of s links:
/// the two endpoints plus log2(s) midpoints. Throws DomainError for s < 1.
[[nodiscard]] double f_seg(double s);

struct SegmentProfile {
    std::vector<int> lengths;  // by segment index; branch segments last
    int segments = 0;  // S
    int paths = 0;  // B
    double stdev = 0;  // population
    [[nodiscard]] int total() const;
};

[[nodiscard]] SegmentProfile segment_profile(const RouteTree& rt);
/// Builds a profile from raw lengths; the last `paths` entries are branches.
[[nodiscard]] SegmentProfile make_profile(std::vector<int> lengths, int paths);

/// Mean accesses for one uniformly placed lossy link on a single-backbone
/// tree. The first segment's root endpoint and every leaf are pre-queried.
/// Throws DomainError unless the lengths sum to n and 1 <= B <= S.
[[nodiscard]] double f_t1(const SegmentProfile& profile, int n);

struct StudyPoint {
    std::vector<int> parts;  // non-increasing
    double stdev = 0;
    double expected = 0;  // sum of (s_i / n) * f_seg(s_i)
};

/// Every partition of n into S positive parts.
[[nodiscard]] std::vector<StudyPoint> segment_access_study(int n, int segments);

/// Found set equals truth and nothing was left unresolved.
[[nodiscard]] bool exact_match(const LocateReport& report, const std::vector<DirectedLink>& truth);
/// Share of truth that was found; 1 when truth is empty.
[[nodiscard]] double recall(const LocateReport& report, const std::vector<DirectedLink>& truth);
/// Fraction of true flags. Throws DomainError on an empty list.
[[nodiscard]] double accuracy(const std::vector<bool>& exact);

struct PlacementOutcome {
    DirectedLink link;
    int accesses = 0;
    bool exact = false;
};

/// Places a single lossy link of `rate` on every directed link in turn and
/// locates it from noise-free counts with zero background loss.
[[nodiscard]] std::vector<PlacementOutcome> single_placement_sweep(const Topology& t, const RouteTree& rt,
                                                                   double rate, double threshold,
                                                                   std::int64_t packets = 100000);

}  // namespace mcprobe
