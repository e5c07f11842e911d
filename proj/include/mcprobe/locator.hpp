#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcprobe/probesim.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

/// Where port counts come from. Positions are tree node indices; -1 is the
/// root port. Implementations may throw to signal a failed query.
class StatsSource {
public:
    virtual ~StatsSource() = default;
    virtual double count(int position) = 0;
};

/// Serves a FlowStats snapshot; `exact` selects the real-valued expected
/// counts (only present when produced by expected_counts()).
class FlowStatsSource final : public StatsSource {
public:
    explicit FlowStatsSource(const FlowStats& fs, bool exact = false);
    double count(int position) override;

private:
    const FlowStats& fs_;
    bool exact_;
};

enum class QueryReason { root, leaf, shared_port, branch_port, midpoint };
[[nodiscard]] std::string_view to_string(QueryReason r);

struct TraceRecord {
    int step = 0;  // 1-based
    int position = -1;
    QueryReason reason = QueryReason::root;
    double count = 0;
    int access_total = 0;
};

/// Caching front end: only the first query of a port is an access.
class StatsOracle {
public:
    StatsOracle(const RouteTree& rt, StatsSource& source);

    double query(int position, QueryReason reason);
    [[nodiscard]] bool cached(int position) const;
    [[nodiscard]] int access_count() const { return static_cast<int>(trace_.size()); }
    [[nodiscard]] const std::vector<TraceRecord>& trace() const { return trace_; }

private:
    StatsSource& source_;
    std::vector<std::optional<double>> cache_;  // position + 1
    std::vector<TraceRecord> trace_;
};

/// PLR of the range between two ports, 1 - r_j / r_i clamped to [0, 1].
/// Empty when r_i == 0. Sets *inconsistent when r_j > r_i.
[[nodiscard]] std::optional<double> range_plr(double r_i, double r_j, bool* inconsistent = nullptr);

struct Range {
    int upstream = -1;  // tree position; -1 = root port
    int downstream = -1;
    std::vector<DirectedLink> links;
};

struct FoundLink {
    DirectedLink link;
    int position = -1;
    double rate = 0;
};

struct LocateReport {
    std::vector<FoundLink> found;  // discovery order
    std::vector<Range> unresolved;
    int access_count = 0;
    std::vector<PortId> access_sequence;
    std::vector<TraceRecord> trace;
    std::vector<std::string> warnings;
    bool aborted = false;
    std::string error;

    /// Found links, ascending.
    [[nodiscard]] std::vector<DirectedLink> found_links() const;
};

struct LocateOptions {
    double threshold = 0.1;
};

/// Sequential access-order search for links whose loss exceeds the threshold.
[[nodiscard]] LocateReport locate(const RouteTree& rt, StatsOracle& oracle, const LocateOptions& opts = {});

/// One line per query: step, port, reason, count, running access total.
[[nodiscard]] std::string access_order_trace(const LocateReport& report, const RouteTree& rt, const Topology& t);
/// Array of {step, port, reason, count, access_total} records.
void write_trace_json(std::ostream& out, const LocateReport& report, const RouteTree& rt, const Topology& t);

}  // namespace mcprobe
