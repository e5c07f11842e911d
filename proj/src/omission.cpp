#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "mcprobe/errors.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

// Mutable omission state over the original topology.
class Omitter {
public:
    explicit Omitter(const Topology& t) : t_(t), omitted_(t.link_count(), 0), degree_(t.node_count(), 0)
    {
        for (NodeIndex v = 0; v < static_cast<NodeIndex>(t.node_count()); ++v) degree_[v] = t.degree(v);
    }

    void run()
    {
        omit_pendant_paths();
        omit_adjacent_odd_pairs();
        pair_remaining_odd_nodes();
    }

    std::vector<LinkId> omitted_links() const
    {
        std::vector<LinkId> out;
        for (LinkId l = 0; l < static_cast<LinkId>(omitted_.size()); ++l)
            if (omitted_[l] != 0) out.push_back(l);
        return out;
    }

    const std::vector<char>& omitted_mask() const { return omitted_; }

private:
    bool odd(NodeIndex v) const { return degree_[v] % 2 != 0; }

    void omit(LinkId l)
    {
        omitted_[l] = 1;
        const auto& link = t_.link(l);
        --degree_[link.a];
        --degree_[link.b];
    }

    bool connected_without(std::span<const LinkId> extra) const
    {
        auto excluded = omitted_links();
        excluded.insert(excluded.end(), extra.begin(), extra.end());
        return is_connected(t_, excluded, IsolatedNodes::ignore);
    }

    std::vector<NodeIndex> nodes_by_name() const
    {
        std::vector<NodeIndex> order(t_.node_count());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](NodeIndex x, NodeIndex y) { return t_.name(x) < t_.name(y); });
        return order;
    }

    // Stage 1: the unique path from a degree-1 node through degree-2 nodes,
    // when it ends at another odd-degree node.
    void omit_pendant_paths()
    {
        const auto order = nodes_by_name();
        for (bool changed = true; changed;) {
            changed = false;
            for (NodeIndex v : order) {
                if (degree_[v] != 1) continue;
                std::vector<LinkId> chain;
                LinkId via = live_incident(v, -1);
                NodeIndex w = t_.link(via).other(v);
                chain.push_back(via);
                while (degree_[w] == 2 && chain.size() <= t_.link_count()) {
                    via = live_incident(w, via);
                    w = t_.link(via).other(w);
                    chain.push_back(via);
                }
                if (!odd(w)) continue;
                for (LinkId l : chain) omit(l);
                changed = true;
            }
        }
    }

    LinkId live_incident(NodeIndex v, LinkId except) const
    {
        for (LinkId l : t_.incident(v))
            if (omitted_[l] == 0 && l != except) return l;
        throw StructuralError("omission: expected a live incident link");
    }

    // Stage 2: a link joining two odd-degree neighbours, unless that
    // disconnects the network.
    void omit_adjacent_odd_pairs()
    {
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& l : t_.links()) {
                if (omitted_[l.id] != 0 || !odd(l.a) || !odd(l.b)) continue;
                const LinkId single[] = {l.id};
                if (!connected_without(single)) continue;
                omit(l.id);
                changed = true;
            }
        }
    }

    // BFS tree over live links, neighbours in ascending link id order.
    std::vector<LinkId> bfs_parents(NodeIndex src) const
    {
        std::vector<LinkId> via(t_.node_count(), -2);
        via[src] = -1;
        std::deque<NodeIndex> queue{src};
        while (!queue.empty()) {
            const NodeIndex u = queue.front();
            queue.pop_front();
            for (LinkId l : t_.incident(u)) {
                if (omitted_[l] != 0) continue;
                const NodeIndex w = t_.link(l).other(u);
                if (via[w] != -2) continue;
                via[w] = l;
                queue.push_back(w);
            }
        }
        return via;
    }

    // Stage 3: pair the remaining odd nodes along shortest paths, keeping the
    // network connected first and omitting as few links as possible second.
    void pair_remaining_odd_nodes()
    {
        std::vector<NodeIndex> odd_nodes;
        for (NodeIndex v : nodes_by_name())
            if (odd(v)) odd_nodes.push_back(v);
        if (odd_nodes.empty()) return;

        const auto k = odd_nodes.size();
        // paths[i][j]: links on the shortest path between odd_nodes i and j.
        std::vector<std::vector<std::optional<std::vector<LinkId>>>> paths(k, std::vector<std::optional<std::vector<LinkId>>>(k));
        for (std::size_t i = 0; i < k; ++i) {
            const auto via = bfs_parents(odd_nodes[i]);
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j || via[odd_nodes[j]] == -2) continue;
                std::vector<LinkId> p;
                for (NodeIndex cur = odd_nodes[j]; cur != odd_nodes[i];) {
                    const LinkId l = via[cur];
                    p.push_back(l);
                    cur = t_.link(l).other(cur);
                }
                std::sort(p.begin(), p.end());
                paths[i][j] = std::move(p);
            }
        }

        std::vector<LinkId> chosen;
        if (k <= kExactMatchingLimit)
            chosen = best_exact_matching(paths);
        else
            chosen = greedy_matching(odd_nodes, paths);
        for (LinkId l : chosen) omit(l);
    }

    static std::vector<LinkId> symmetric_difference(const std::vector<LinkId>& a, const std::vector<LinkId>& b)
    {
        std::vector<LinkId> out;
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }

    using PathTable = std::vector<std::vector<std::optional<std::vector<LinkId>>>>;

    std::vector<LinkId> best_exact_matching(const PathTable& paths) const
    {
        struct Best {
            bool found = false;
            bool connected = false;
            std::size_t cost = 0;
            std::vector<LinkId> links;
        } best;
        std::vector<char> taken(paths.size(), 0);
        auto recurse = [&](auto&& self, const std::vector<LinkId>& acc) -> void {
            const auto first = std::find(taken.begin(), taken.end(), 0);
            if (first == taken.end()) {
                const bool conn = connected_without(acc);
                const bool better = !best.found || (conn && !best.connected) ||
                                    (conn == best.connected && acc.size() < best.cost);
                if (better) best = {true, conn, acc.size(), acc};
                return;
            }
            const auto i = static_cast<std::size_t>(first - taken.begin());
            taken[i] = 1;
            for (std::size_t j = i + 1; j < paths.size(); ++j) {
                if (taken[j] != 0 || !paths[i][j]) continue;
                taken[j] = 1;
                self(self, symmetric_difference(acc, *paths[i][j]));
                taken[j] = 0;
            }
            taken[i] = 0;
        };
        recurse(recurse, {});
        if (!best.found) throw StructuralError("omission: odd-degree nodes cannot be paired");
        return best.links;
    }

    std::vector<LinkId> greedy_matching(const std::vector<NodeIndex>& odd_nodes, const PathTable& paths) const
    {
        struct Pair {
            std::size_t i, j, dist;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < odd_nodes.size(); ++i)
            for (std::size_t j = i + 1; j < odd_nodes.size(); ++j)
                if (paths[i][j]) pairs.push_back({i, j, paths[i][j]->size()});
        std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });

        std::vector<char> matched(odd_nodes.size(), 0);
        std::vector<LinkId> acc;
        for (std::size_t remaining = odd_nodes.size(); remaining > 0; remaining -= 2) {
            const Pair* pick = nullptr;
            for (const auto& p : pairs) {
                if (matched[p.i] != 0 || matched[p.j] != 0) continue;
                if (pick == nullptr) pick = &p;
                if (connected_without(symmetric_difference(acc, *paths[p.i][p.j]))) {
                    pick = &p;
                    break;
                }
            }
            if (pick == nullptr) throw StructuralError("omission: odd-degree nodes cannot be paired");
            matched[pick->i] = matched[pick->j] = 1;
            acc = symmetric_difference(acc, *paths[pick->i][pick->j]);
        }
        return acc;
    }

    static constexpr std::size_t kExactMatchingLimit = 8;

    const Topology& t_;
    std::vector<char> omitted_;
    std::vector<int> degree_;
};

}  // namespace

int ReducedGraph::degree(NodeIndex reduced_node) const
{
    int d = 0;
    for (const auto& e : edges) d += (e.a == reduced_node ? 1 : 0) + (e.b == reduced_node ? 1 : 0);
    return d;
}

bool ReducedGraph::all_even() const
{
    std::vector<int> deg(node_count(), 0);
    for (const auto& e : edges) {
        ++deg[e.a];
        ++deg[e.b];
    }
    return std::all_of(deg.begin(), deg.end(), [](int d) { return d % 2 == 0; });
}

bool ReducedGraph::connected() const
{
    UnionFind uf(node_count());
    std::vector<char> touched(node_count(), 0);
    for (const auto& e : edges) {
        uf.unite(e.a, e.b);
        touched[e.a] = touched[e.b] = 1;
    }
    int roots = 0;
    for (int v = 0; v < static_cast<int>(node_count()); ++v)
        if (touched[v] != 0 && uf.find(v) == v) ++roots;
    return roots <= 1;
}

int OmissionPlan::group_of_link(LinkId link) const
{
    for (int g = 0; g < static_cast<int>(groups.size()); ++g)
        if (std::binary_search(groups[g].links.begin(), groups[g].links.end(), link)) return g;
    return -1;
}

int OmissionPlan::group_of_node(NodeIndex node) const
{
    for (int g = 0; g < static_cast<int>(groups.size()); ++g)
        if (std::binary_search(groups[g].nodes.begin(), groups[g].nodes.end(), node)) return g;
    return -1;
}

OmissionPlan omit_odd_links(const Topology& t)
{
    Omitter omitter(t);
    omitter.run();
    const auto& mask = omitter.omitted_mask();
    const auto n = t.node_count();

    // Omitted links sharing a node form one group.
    UnionFind by_node(n);
    std::vector<char> in_group(n, 0);
    for (LinkId l : omitter.omitted_links()) {
        by_node.unite(t.link(l).a, t.link(l).b);
        in_group[t.link(l).a] = in_group[t.link(l).b] = 1;
    }
    OmissionPlan plan;
    std::vector<int> group_of_root(n, -1);
    for (LinkId l : omitter.omitted_links()) {
        const int r = by_node.find(t.link(l).a);
        if (group_of_root[r] < 0) {
            group_of_root[r] = static_cast<int>(plan.groups.size());
            plan.groups.emplace_back();
        }
        plan.groups[group_of_root[r]].links.push_back(l);
    }
    for (NodeIndex v = 0; v < static_cast<NodeIndex>(n); ++v)
        if (in_group[v] != 0) plan.groups[group_of_root[by_node.find(v)]].nodes.push_back(v);

    // Components of what remains; a group bridging components is a cut.
    UnionFind live(n);
    std::vector<char> touched(n, 0);
    for (const auto& l : t.links()) {
        if (mask[l.id] != 0) continue;
        live.unite(l.a, l.b);
        touched[l.a] = touched[l.b] = 1;
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& g : plan.groups) {
            if (g.cut) continue;
            std::vector<int> comps;
            for (NodeIndex v : g.nodes)
                if (touched[v] != 0) comps.push_back(live.find(v));
            std::sort(comps.begin(), comps.end());
            comps.erase(std::unique(comps.begin(), comps.end()), comps.end());
            if (comps.size() < 2) continue;
            g.cut = true;
            for (std::size_t i = 1; i < comps.size(); ++i) live.unite(comps[0], comps[i]);
            changed = true;
        }
    }

    auto& red = plan.reduced;
    red.node_of.assign(n, -1);
    for (NodeIndex v = 0; v < static_cast<NodeIndex>(n); ++v) {
        const int g = in_group[v] != 0 ? group_of_root[by_node.find(v)] : -1;
        if (g >= 0 && plan.groups[g].cut) {
            auto& group = plan.groups[g];
            if (group.combined_node < 0) {
                std::string label = "[";
                for (std::size_t i = 0; i < group.nodes.size(); ++i)
                    label += (i == 0 ? "" : "+") + t.name(group.nodes[i]);
                group.combined_node = static_cast<NodeIndex>(red.names.size());
                red.names.push_back(label + "]");
            }
            red.node_of[v] = group.combined_node;
        } else {
            red.node_of[v] = static_cast<NodeIndex>(red.names.size());
            red.names.push_back(t.name(v));
        }
    }
    for (const auto& l : t.links())
        if (mask[l.id] == 0) red.edges.push_back({l.id, red.node_of[l.a], red.node_of[l.b]});
    return plan;
}

}  // namespace mcprobe
