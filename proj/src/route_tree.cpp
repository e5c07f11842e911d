#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "mcprobe/errors.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::unicursal: return "unicursal";
    case Scheme::bbt_t1: return "bbt_t1";
    case Scheme::bbt_t2: return "bbt_t2";
    case Scheme::spt_m1: return "spt_m1";
    case Scheme::spt_m2: return "spt_m2";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view s)
{
    std::string norm(s);
    std::replace(norm.begin(), norm.end(), '-', '_');
    for (auto scheme : {Scheme::unicursal, Scheme::bbt_t1, Scheme::bbt_t2, Scheme::spt_m1, Scheme::spt_m2})
        if (norm == to_string(scheme)) return scheme;
    return std::nullopt;
}

RouteTree::RouteTree(Scheme scheme, NodeIndex measurement_node, std::span<const Edge> edges)
    : scheme_(scheme), mh_(measurement_node)
{
    const auto n = static_cast<int>(edges.size());
    std::vector<std::vector<int>> kids(edges.size());
    std::vector<int> tops;
    int max_directed = -1;
    for (int i = 0; i < n; ++i) {
        const auto& e = edges[i];
        if (e.link.link < 0) throw ValidationError("route edge without a link");
        max_directed = std::max(max_directed, e.link.index());
        if (e.parent == -1)
            tops.push_back(i);
        else if (e.parent < 0 || e.parent >= n || e.parent == i)
            throw ValidationError(fmt::format("route edge {} has an invalid parent", i));
        else
            kids[e.parent].push_back(i);
    }

    // Renumber in depth-first preorder.
    std::vector<int> new_index(edges.size(), -1);
    nodes_.reserve(edges.size());
    std::vector<std::pair<int, int>> stack;  // (old index, new parent)
    for (auto it = tops.rbegin(); it != tops.rend(); ++it) stack.emplace_back(*it, -1);
    while (!stack.empty()) {
        const auto [old, parent] = stack.back();
        stack.pop_back();
        const int idx = static_cast<int>(nodes_.size());
        new_index[old] = idx;
        TraversalNode node;
        node.link = edges[old].link;
        node.parent = parent;
        node.depth = parent < 0 ? 1 : nodes_[parent].depth + 1;
        nodes_.push_back(std::move(node));
        if (parent < 0)
            root_children_.push_back(idx);
        else
            nodes_[parent].children.push_back(idx);
        for (auto k = kids[old].rbegin(); k != kids[old].rend(); ++k) stack.emplace_back(*k, idx);
    }
    if (static_cast<int>(nodes_.size()) != n) throw ValidationError("route edges contain a parent cycle");

    by_directed_.assign(static_cast<std::size_t>(max_directed + 1), -1);
    for (int i = 0; i < n; ++i) {
        auto& slot = by_directed_[static_cast<std::size_t>(nodes_[i].link.index())];
        if (slot < 0) slot = i;
        if (nodes_[i].children.empty()) leaves_.push_back(i);
    }

    // Maximal unary chains.
    std::vector<Segment> backbone;
    std::vector<Segment> branch;
    for (int i = 0; i < n; ++i) {
        const int p = nodes_[i].parent;
        const bool starts = p < 0 || nodes_[p].children.size() != 1;
        if (!starts) continue;
        Segment seg;
        int cur = i;
        while (true) {
            seg.nodes.push_back(cur);
            if (nodes_[cur].children.size() != 1) break;
            cur = nodes_[cur].children.front();
        }
        seg.kind = nodes_[cur].children.empty() ? SegmentKind::branch : SegmentKind::backbone;
        (seg.kind == SegmentKind::branch ? branch : backbone).push_back(std::move(seg));
    }
    for (auto* group : {&backbone, &branch}) {
        for (auto& seg : *group) {
            seg.index = static_cast<int>(segments_.size()) + 1;
            for (int node : seg.nodes) nodes_[node].segment = seg.index - 1;
            segments_.push_back(std::move(seg));
        }
    }
}

std::optional<int> RouteTree::node_for(DirectedLink d) const
{
    const auto i = static_cast<std::size_t>(d.index());
    if (d.link < 0 || i >= by_directed_.size() || by_directed_[i] < 0) return std::nullopt;
    return by_directed_[i];
}

bool RouteTree::is_ancestor(int ancestor, int n) const
{
    if (ancestor < 0) return true;
    for (int cur = n; cur >= 0; cur = nodes_[cur].parent)
        if (cur == ancestor) return true;
    return false;
}

std::vector<int> RouteTree::chain(int upper, int lower) const
{
    std::vector<int> out;
    for (int cur = lower; cur != upper; cur = nodes_[cur].parent) {
        if (cur < 0) throw StructuralError("chain(): upper is not an ancestor of lower");
        out.push_back(cur);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<TerminalPath> RouteTree::terminal_paths() const
{
    std::vector<TerminalPath> out;
    out.reserve(leaves_.size());
    for (int leaf : leaves_) {
        TerminalPath path;
        path.leaf = leaf;
        for (int node : chain(-1, leaf)) path.links.push_back(nodes_[node].link);
        out.push_back(std::move(path));
    }
    return out;
}

RouteStats route_stats(const RouteTree& rt)
{
    RouteStats s;
    s.paths = static_cast<int>(rt.leaves().size());
    if (s.paths > 0) {
        s.min = rt.node(rt.leaves().front()).depth;
        long total = 0;
        for (int leaf : rt.leaves()) {
            const int d = rt.node(leaf).depth;
            total += d;
            s.min = std::min(s.min, d);
            s.max = std::max(s.max, d);
        }
        s.avg = static_cast<double>(total) / s.paths;
    }
    s.segments = static_cast<int>(rt.segments().size());
    if (s.segments > 0) {
        double mean = 0;
        for (const auto& seg : rt.segments()) mean += static_cast<double>(seg.nodes.size());
        mean /= s.segments;
        double var = 0;
        for (const auto& seg : rt.segments()) var += std::pow(static_cast<double>(seg.nodes.size()) - mean, 2);
        s.segment_stdev = std::sqrt(var / s.segments);
    }
    return s;
}

ValidationReport validate_route(const RouteTree& rt, const Topology& t)
{
    ValidationReport rep;
    std::vector<int> seen(t.directed_link_count(), 0);
    for (std::size_t i = 0; i < rt.size(); ++i) {
        const auto& node = rt.node(static_cast<int>(i));
        if (node.link.link < 0 || static_cast<std::size_t>(node.link.link) >= t.link_count()) {
            ++rep.foreign;
            rep.messages.push_back(fmt::format("node {}: link {} not in topology", i, node.link.link));
            continue;
        }
        ++seen[static_cast<std::size_t>(node.link.index())];
        const NodeIndex tail = t.tail(node.link);
        if (node.parent < 0) {
            if (tail != rt.measurement_node()) {
                ++rep.bad_root_attachments;
                rep.messages.push_back(
                    fmt::format("root child {} does not start at the measurement node", t.label(node.link)));
            }
        } else {
            const auto& parent = rt.node(node.parent);
            if (parent.link.link >= 0 && static_cast<std::size_t>(parent.link.link) < t.link_count() &&
                t.head(parent.link) != tail) {
                ++rep.discontinuities;
                rep.messages.push_back(
                    fmt::format("{} does not continue from {}", t.label(node.link), t.label(parent.link)));
            }
        }
    }
    for (int d = 0; d < static_cast<int>(seen.size()); ++d) {
        const auto link = DirectedLink::from_index(d);
        if (seen[d] == 0) {
            ++rep.missing;
            rep.messages.push_back(fmt::format("{} not covered", t.label(link)));
        } else if (seen[d] > 1) {
            ++rep.duplicated;
            rep.messages.push_back(fmt::format("{} covered {} times", t.label(link), seen[d]));
        }
    }
    return rep;
}

void write_route_report(std::ostream& out, const RouteTree& rt, const Topology& t)
{
    const auto stats = route_stats(rt);
    out << "scheme " << to_string(rt.scheme()) << '\n';
    out << "measurement-node " << t.name(rt.measurement_node()) << '\n';
    out << fmt::format("paths {} avg {} min {} max {}\n", stats.paths, stats.avg, stats.min, stats.max);
    out << fmt::format("segments {} stdev {:.6f}\n", stats.segments, stats.segment_stdev);
    const auto paths = rt.terminal_paths();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        out << fmt::format("path {} len {}:", i, paths[i].length());
        for (const auto& l : paths[i].links) out << ' ' << t.label(l);
        out << '\n';
    }
    for (const auto& seg : rt.segments()) {
        out << fmt::format("segment {} {} len {}:", seg.index, seg.kind == SegmentKind::backbone ? "backbone" : "branch",
                           seg.nodes.size());
        for (int node : seg.nodes) out << ' ' << t.label(rt.node(node).link);
        out << '\n';
    }
}

}  // namespace mcprobe
