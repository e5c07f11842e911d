#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

#include "euler.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/routes.hpp"
#include "tree_builder.hpp"

namespace mcprobe {

namespace {

using Walk = std::vector<DirectedLink>;

Walk reversed_walk(const Walk& w)
{
    Walk out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->reversed());
    return out;
}

// Closed or open trail over `arcs` from `start` (see directed_trail).
Walk trail(const Topology& t, const std::vector<DirectedLink>& arcs, NodeIndex start)
{
    std::vector<detail::Arc> list;
    list.reserve(arcs.size());
    for (const auto& d : arcs) list.push_back({d, t.tail(d), t.head(d)});
    Walk out;
    for (int a : detail::directed_trail(static_cast<int>(t.node_count()), list, start)) out.push_back(list[a].link);
    return out;
}

// Links of `group` on a shortest path from `from` to `to`, directed.
Walk path_within(const Topology& t, const OmittedGroup& group, NodeIndex from, NodeIndex to)
{
    std::vector<LinkId> via(t.node_count(), -1);
    std::vector<char> seen(t.node_count(), 0);
    std::deque<NodeIndex> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        const NodeIndex u = queue.front();
        queue.pop_front();
        for (LinkId l : t.incident(u)) {
            if (!std::binary_search(group.links.begin(), group.links.end(), l)) continue;
            const NodeIndex w = t.link(l).other(u);
            if (seen[w] != 0) continue;
            seen[w] = 1;
            via[w] = l;
            queue.push_back(w);
        }
    }
    if (seen[to] == 0) throw StructuralError("measurement node is not connected to its omitted group");
    Walk path;
    for (NodeIndex v = to; v != from; v = t.link(via[v]).other(v)) path.push_back(t.leaving(via[v], t.link(via[v]).other(v)));
    std::reverse(path.begin(), path.end());
    return path;
}

// Original node from which the reduced walk starts: the measurement node
// when it kept links, else the nearest node that did (ties by name).
NodeIndex effective_start(const Topology& t, const ReducedGraph& r)
{
    const NodeIndex mh = t.measurement_node();
    if (r.degree(r.node_of[mh]) > 0) return mh;
    std::vector<int> dist(t.node_count(), -1);
    std::deque<NodeIndex> queue{mh};
    dist[mh] = 0;
    NodeIndex best = -1;
    while (!queue.empty()) {
        const NodeIndex u = queue.front();
        queue.pop_front();
        if (best >= 0 && dist[u] > dist[best]) break;
        if (r.degree(r.node_of[u]) > 0) {
            if (best < 0 || t.name(u) < t.name(best)) best = u;
            continue;
        }
        for (LinkId l : t.incident(u)) {
            const NodeIndex w = t.link(l).other(u);
            if (dist[w] >= 0) continue;
            dist[w] = dist[u] + 1;
            queue.push_back(w);
        }
    }
    return best;  // -1: nothing left after omission
}

class BbtAssembler {
public:
    BbtAssembler(const Topology& t, const OmissionPlan& plan, int segment_len)
        : t_(t), plan_(plan), len_(segment_len), tb_(t), done_(plan.groups.size(), 0)
    {
    }

    void add_trunk(NodeIndex s0)
    {
        const NodeIndex mh = t_.measurement_node();
        const int g = plan_.group_of_node(mh);
        const auto& group = plan_.groups.at(static_cast<std::size_t>(g));
        const Walk trunk = path_within(t_, group, mh, s0);
        const int end = tb_.add_chain(-1, trunk);

        // Everything else in the group becomes one branch path leaving the
        // trunk end; it finishes back at the measurement node.
        std::vector<DirectedLink> rest;
        for (LinkId l : group.links)
            for (auto dir : {Direction::forward, Direction::reverse}) {
                const DirectedLink d{l, dir};
                if (std::find(trunk.begin(), trunk.end(), d) == trunk.end()) rest.push_back(d);
            }
        trunk_end_ = end;
        trunk_rest_ = trail(t_, rest, s0);
        done_[g] = 1;
    }

    void add_fragment(Walk w) { pending_.push_back(std::move(w)); }

    RouteTree finish(Scheme scheme)
    {
        bool rest_attached = trunk_rest_.empty();
        while (true) {
            bool progress = attach_fragments();
            if (!rest_attached) {
                // The remainder hangs after the first backbone fragments so
                // the backbone keeps the first child slot.
                tb_.add_chain(trunk_end_, trunk_rest_);
                rest_attached = true;
                continue;
            }
            if (progress) continue;
            if (integrate_one_group()) continue;
            break;
        }
        if (!pending_.empty() || std::count(done_.begin(), done_.end(), 0) != 0)
            throw StructuralError("backbone-and-branch assembly could not place every path");
        return tb_.finish(scheme);
    }

private:
    // Root for the measurement node, else the shallowest tree position whose
    // head is `v`; -2 when `v` is not reached yet.
    int shallowest_at(NodeIndex v) const
    {
        if (v == t_.measurement_node()) return -1;
        int best = -2;
        int best_depth = std::numeric_limits<int>::max();
        for (int i = 0; i < tb_.size(); ++i) {
            if (tb_.head(i) != v) continue;
            const int d = tb_.depth(i);
            if (d < best_depth) {
                best = i;
                best_depth = d;
            }
        }
        return best;
    }

    // Chunks `w` into segments of len_ links, grafting each chunk's reverse
    // path at the chunk end before continuing.
    void grow(int at, const Walk& w)
    {
        int pos = at;
        for (std::size_t i = 0; i < w.size(); i += static_cast<std::size_t>(len_)) {
            const auto stop = std::min(w.size(), i + static_cast<std::size_t>(len_));
            const Walk chunk(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(stop));
            const int end = tb_.add_chain(pos, chunk);
            tb_.add_chain(end, reversed_walk(chunk));
            pos = end;
        }
    }

    bool attach_fragments()
    {
        bool any = false;
        for (bool again = true; again;) {
            again = false;
            for (auto it = pending_.begin(); it != pending_.end(); ++it) {
                const int at = shallowest_at(t_.tail(it->front()));
                if (at == -2) continue;
                const Walk w = std::move(*it);
                pending_.erase(it);
                grow(at, w);
                any = again = true;
                break;
            }
        }
        return any;
    }

    enum class Kind { splice = 0, append = 1, branch = 2 };

    bool integrate_one_group()
    {
        using Key = std::tuple<bool, int, std::string, int, int, int>;
        const int current_max = tb_.max_leaf_depth();
        std::optional<Key> best;
        int best_group = -1;
        int best_pos = -2;
        Kind best_kind = Kind::branch;
        for (int g = 0; g < static_cast<int>(plan_.groups.size()); ++g) {
            if (done_[g] != 0) continue;
            const auto& group = plan_.groups[g];
            const int w = 2 * static_cast<int>(group.links.size());
            auto consider = [&](int pos, NodeIndex c, Kind kind, bool fallback, int affected) {
                Key key{fallback, std::max(current_max, affected), t_.name(c), static_cast<int>(kind), affected, pos};
                if (!best || key < *best) {
                    best = key;
                    best_group = g;
                    best_pos = pos;
                    best_kind = kind;
                }
            };
            const NodeIndex mh = t_.measurement_node();
            if (std::binary_search(group.nodes.begin(), group.nodes.end(), mh)) consider(-1, mh, Kind::branch, false, w);
            for (int i = 0; i < tb_.size(); ++i) {
                const NodeIndex c = tb_.head(i);
                if (!std::binary_search(group.nodes.begin(), group.nodes.end(), c)) continue;
                const auto& kids = tb_.children(i);
                const int depth = tb_.depth(i);
                if (kids.empty()) {
                    consider(i, c, Kind::append, false, depth + w);
                } else if (kids.size() >= 2) {
                    consider(i, c, Kind::branch, false, depth + w);
                } else if (const int leaf = tb_.chain_leaf_depth(i); leaf >= 0) {
                    consider(i, c, Kind::splice, false, leaf + w);
                } else {
                    consider(i, c, Kind::branch, true, depth + w);
                }
            }
        }
        if (best_group < 0) return false;

        const auto& group = plan_.groups[best_group];
        std::vector<DirectedLink> arcs;
        for (LinkId l : group.links) {
            arcs.push_back({l, Direction::forward});
            arcs.push_back({l, Direction::reverse});
        }
        const Walk walk = trail(t_, arcs, tb_.head(best_pos));
        if (best_kind == Kind::splice)
            tb_.splice_after(best_pos, walk);
        else
            tb_.add_chain(best_pos, walk);
        done_[best_group] = 1;
        return true;
    }

    const Topology& t_;
    const OmissionPlan& plan_;
    int len_;
    detail::TreeBuilder tb_;
    std::vector<char> done_;
    std::deque<Walk> pending_;
    int trunk_end_ = -2;  // -2: no trunk
    Walk trunk_rest_;
};

// Splits a walk wherever consecutive links do not meet in the original graph
// (the walk crossed a combined node).
std::vector<Walk> fragments(const Topology& t, const Walk& w)
{
    std::vector<Walk> out;
    for (const auto& d : w) {
        if (out.empty() || t.head(out.back().back()) != t.tail(d)) out.emplace_back();
        out.back().push_back(d);
    }
    return out;
}

}  // namespace

RouteTree build_bbt(const Topology& t, BbtVariant variant, int segment_len)
{
    if (segment_len < 1) throw ConfigError("segment length must be at least 1");
    const OmissionPlan plan = omit_odd_links(t);
    const auto& r = plan.reduced;
    const NodeIndex origin = effective_start(t, r);

    std::vector<Walk> backbones;
    if (origin >= 0) {
        const NodeIndex start = r.node_of[origin];
        const Walk circuit = eulerian_circuit(r, start);
        if (variant == BbtVariant::t1) {
            backbones.push_back(circuit);
        } else {
            if (r.degree(start) < 2)
                throw ConfigError("two backbones need a start node of degree >= 2 after omission");
            const auto half = static_cast<std::ptrdiff_t>(circuit.size() / 2);
            backbones.emplace_back(circuit.begin(), circuit.begin() + half);
            backbones.push_back(reversed_walk(Walk(circuit.begin() + half, circuit.end())));
        }
    } else if (variant == BbtVariant::t2) {
        throw ConfigError("two backbones need links left after odd-degree omission");
    }

    BbtAssembler assembler(t, plan, segment_len);
    if (!backbones.empty()) {
        const NodeIndex s0 = t.tail(backbones.front().front());
        if (s0 != t.measurement_node()) assembler.add_trunk(s0);
    }
    for (const auto& b : backbones)
        for (auto& f : fragments(t, b)) assembler.add_fragment(std::move(f));
    return assembler.finish(variant == BbtVariant::t1 ? Scheme::bbt_t1 : Scheme::bbt_t2);
}

}  // namespace mcprobe
