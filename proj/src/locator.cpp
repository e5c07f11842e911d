#include "mcprobe/locator.hpp"

#include <algorithm>
#include <fmt/format.h>

#include <ostream>

#include "json.hpp"
#include "mcprobe/errors.hpp"

namespace mcprobe {

FlowStatsSource::FlowStatsSource(const FlowStats& fs, bool exact) : fs_(fs), exact_(exact)
{
    if (exact_ && fs_.expected.size() != fs_.count.size())
        throw ConfigError("exact counts requested from simulated flow stats");
}

double FlowStatsSource::count(int position)
{
    if (position < 0) return static_cast<double>(fs_.packets_sent);
    const auto i = static_cast<std::size_t>(position);
    return exact_ ? fs_.expected.at(i) : static_cast<double>(fs_.count.at(i));
}

std::string_view to_string(QueryReason r)
{
    switch (r) {
    case QueryReason::root: return "root";
    case QueryReason::leaf: return "leaf";
    case QueryReason::shared_port: return "shared-port";
    case QueryReason::branch_port: return "branch-port";
    case QueryReason::midpoint: return "midpoint";
    }
    return "?";
}

StatsOracle::StatsOracle(const RouteTree& rt, StatsSource& source) : source_(source), cache_(rt.size() + 1) {}

double StatsOracle::query(int position, QueryReason reason)
{
    auto& slot = cache_.at(static_cast<std::size_t>(position + 1));
    if (slot) return *slot;
    slot = source_.count(position);
    const int step = static_cast<int>(trace_.size()) + 1;
    trace_.push_back({step, position, reason, *slot, step});
    return *slot;
}

bool StatsOracle::cached(int position) const { return cache_.at(static_cast<std::size_t>(position + 1)).has_value(); }

std::optional<double> range_plr(double r_i, double r_j, bool* inconsistent)
{
    if (inconsistent != nullptr) *inconsistent = r_j > r_i;
    if (r_i <= 0.0) return std::nullopt;
    return std::clamp(1.0 - r_j / r_i, 0.0, 1.0);
}

std::vector<DirectedLink> LocateReport::found_links() const
{
    std::vector<DirectedLink> out;
    out.reserve(found.size());
    for (const auto& f : found) out.push_back(f.link);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

class Locator {
public:
    Locator(const RouteTree& rt, StatsOracle& oracle, double h, LocateReport& report)
        : rt_(rt), oracle_(oracle), h_(h), report_(report), resolved_(rt.size(), 0), subtree_end_(rt.size())
    {
        // Preorder storage: a subtree is a contiguous index range.
        for (int i = static_cast<int>(rt.size()) - 1; i >= 0; --i) {
            int end = i + 1;
            for (int c : rt.node(i).children) end = std::max(end, subtree_end_[c]);
            subtree_end_[i] = end;
        }
    }

    void run()
    {
        const double root = oracle_.query(-1, QueryReason::root);
        for (int leaf : rt_.leaves()) oracle_.query(leaf, QueryReason::leaf);
        std::vector<int> lossy;
        for (int leaf : rt_.leaves())
            if (lossy_below(root, leaf)) lossy.push_back(leaf);
        mark_quiet_leaves(-1, lossy);
        search(-1, lossy);
    }

private:
    int begin_of(int u) const { return u + 1; }
    int end_of(int u) const { return u < 0 ? static_cast<int>(rt_.size()) : subtree_end_[u]; }
    bool under(int n, int u) const { return n >= begin_of(u) && n < end_of(u); }

    double count(int p) { return oracle_.query(p, QueryReason::midpoint); }

    bool lossy_below(double upper, int leaf)
    {
        const auto plr = range_plr(upper, oracle_.query(leaf, QueryReason::leaf));
        return plr && *plr > h_;
    }

    void resolve(std::span<const int> nodes)
    {
        for (int n : nodes) resolved_[n] = 1;
    }

    // A leaf whose path from `u` shows no loss clears every link on it.
    void mark_quiet_leaves(int u, const std::vector<int>& lossy)
    {
        for (int leaf : rt_.leaves())
            if (under(leaf, u) && !std::binary_search(lossy.begin(), lossy.end(), leaf)) resolve(rt_.chain(u, leaf));
    }

    void search(int u, const std::vector<int>& lossy)
    {
        if (lossy.empty()) return;
        if (lossy.size() == 1) {
            narrow_and_search(u, lossy.front());
            return;
        }
        // Port shared by the most lossy terminal paths; deepest, then lowest
        // link index on ties.
        int best = -2;
        int best_score = 1;
        for (int p = begin_of(u); p < end_of(u); ++p) {
            if (rt_.node(p).children.empty()) continue;
            const int score = static_cast<int>(
                std::count_if(lossy.begin(), lossy.end(), [&](int leaf) { return under(leaf, p); }));
            if (score < 2) continue;
            const bool better = score > best_score ||
                                (score == best_score && (rt_.node(p).depth > rt_.node(best).depth ||
                                                         (rt_.node(p).depth == rt_.node(best).depth &&
                                                          rt_.node(p).link.index() < rt_.node(best).link.index())));
            if (best < 0 || better) {
                best = p;
                best_score = score;
            }
        }
        if (best < 0) {
            for (int leaf : lossy) narrow_and_search(u, leaf);
            return;
        }

        const int p = best;
        const double at_p = oracle_.query(p, QueryReason::shared_port);
        const auto upper_plr = range_plr(oracle_.query(u, QueryReason::shared_port), at_p);
        if (upper_plr && *upper_plr > h_)
            narrow_and_search(u, p);
        else if (upper_plr)
            resolve(rt_.chain(u, p));

        std::vector<int> inner;
        std::vector<int> rest;
        for (int leaf : lossy)
            if (under(leaf, p)) inner.push_back(leaf);
            else rest.push_back(leaf);
        if (at_p <= 0.0) {
            for (int leaf : inner) unresolved(p, leaf);
        } else {
            std::vector<int> lossy_p;
            for (int leaf : rt_.leaves())
                if (under(leaf, p) && lossy_below(at_p, leaf)) lossy_p.push_back(leaf);
            mark_quiet_leaves(p, lossy_p);
            search(p, lossy_p);
        }
        search(u, rest);
    }

    // Search the unresolved stretch of u -> target: everything between the
    // target and the nearest cleared link above it.
    void narrow_and_search(int u, int target)
    {
        const auto chain = rt_.chain(u, target);
        const auto first = std::find_if(chain.begin(), chain.end(), [&](int n) { return resolved_[n] == 0; });
        if (first == chain.end()) {
            report_.warnings.push_back(fmt::format("lossy range ending at position {} has no unresolved link", target));
            return;
        }
        const int upper = first == chain.begin() ? u : *(first - 1);
        oracle_.query(upper, QueryReason::branch_port);
        binary_search(upper, target, std::vector<int>(first, chain.end()));
    }

    void binary_search(int upper, int lower, const std::vector<int>& links)
    {
        const double cu = oracle_.query(upper, QueryReason::midpoint);
        const double cl = oracle_.query(lower, QueryReason::midpoint);
        bool inconsistent = false;
        const auto plr = range_plr(cu, cl, &inconsistent);
        if (inconsistent)
            report_.warnings.push_back(
                fmt::format("count rises from {} to {} between positions {} and {}", cu, cl, upper, lower));
        if (!plr) {
            unresolved(upper, lower);
            return;
        }
        if (*plr <= h_) {
            resolve(links);
            return;
        }
        if (links.size() == 1) {
            report_.found.push_back({rt_.node(lower).link, lower, *plr});
            resolve(links);
            return;
        }
        const std::size_t half = links.size() / 2;
        const int mid = links[half - 1];
        count(mid);
        binary_search(upper, mid, std::vector<int>(links.begin(), links.begin() + static_cast<std::ptrdiff_t>(half)));
        binary_search(mid, lower, std::vector<int>(links.begin() + static_cast<std::ptrdiff_t>(half), links.end()));
    }

    void unresolved(int upper, int lower)
    {
        Range r{upper, lower, {}};
        for (int n : rt_.chain(upper, lower)) r.links.push_back(rt_.node(n).link);
        report_.unresolved.push_back(std::move(r));
    }

    const RouteTree& rt_;
    StatsOracle& oracle_;
    double h_;
    LocateReport& report_;
    std::vector<char> resolved_;
    std::vector<int> subtree_end_;
};

}  // namespace

LocateReport locate(const RouteTree& rt, StatsOracle& oracle, const LocateOptions& opts)
{
    if (!(opts.threshold > 0.0 && opts.threshold < 1.0)) throw ConfigError("threshold must lie strictly between 0 and 1");
    LocateReport report;
    try {
        Locator(rt, oracle, opts.threshold, report).run();
    } catch (const std::exception& e) {
        report.aborted = true;
        report.error = e.what();
    }
    report.access_count = oracle.access_count();
    report.trace = oracle.trace();
    for (const auto& rec : report.trace)
        report.access_sequence.push_back(rec.position < 0 ? PortId::root() : rt.port(rec.position));
    return report;
}

std::string access_order_trace(const LocateReport& report, const RouteTree& rt, const Topology& t)
{
    std::string out;
    for (const auto& rec : report.trace) {
        const PortId port = rec.position < 0 ? PortId::root() : rt.port(rec.position);
        out += fmt::format("{:>4} {:<28} {:<12} {:>12} {:>4}\n", rec.step, t.port_label(port), to_string(rec.reason),
                           rec.count, rec.access_total);
    }
    if (report.aborted) out += fmt::format("aborted: {}\n", report.error);
    return out;
}

void write_trace_json(std::ostream& out, const LocateReport& report, const RouteTree& rt, const Topology& t)
{
    auto records = nlohmann::ordered_json::array();
    for (const auto& rec : report.trace) {
        const PortId port = rec.position < 0 ? PortId::root() : rt.port(rec.position);
        records.push_back({{"step", rec.step},
                           {"port", t.port_label(port)},
                           {"reason", std::string(to_string(rec.reason))},
                           {"count", rec.count},
                           {"access_total", rec.access_total}});
    }
    out << records.dump(2) << '\n';
}

}  // namespace mcprobe
