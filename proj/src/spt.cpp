#include <deque>

#include "mcprobe/routes.hpp"
#include "tree_builder.hpp"

namespace mcprobe {

// Shortest-path-tree schemes. The downstream tree is a BFS tree from the
// measurement node (unit weights); the remaining directed links are unused
// links and the reverse (upstream) direction of every tree link.
//
// Model 1 keeps extensions short: each unused link is followed by at most
// one reverse link, and leftover reverse links hang off individually.
// Model 2 follows each unused link with the whole chain of still-unused
// reverse links back toward the root, and merges leftover reverse links into
// upward chains starting from the deepest node.
RouteTree build_spt(const Topology& t, SptModel model)
{
    const auto n = t.node_count();
    const NodeIndex mh = t.measurement_node();
    std::vector<LinkId> via(n, -2);
    std::vector<NodeIndex> order{mh};
    via[mh] = -1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeIndex u = order[i];
        for (LinkId l : t.incident(u)) {
            const NodeIndex w = t.link(l).other(u);
            if (via[w] != -2) continue;
            via[w] = l;
            order.push_back(w);
        }
    }

    detail::TreeBuilder tb(t);
    std::vector<int> down(n, -1);  // tree node arriving at each switch
    std::vector<char> tree_link(t.link_count(), 0);
    for (std::size_t i = 1; i < order.size(); ++i) {
        const NodeIndex v = order[i];
        const NodeIndex p = t.link(via[v]).other(v);
        const DirectedLink d = t.leaving(via[v], p);
        down[v] = tb.add_chain(down[p], std::span(&d, 1));
        tree_link[via[v]] = 1;
    }

    std::vector<char> reverse_used(n, 0);
    auto upward = [&](NodeIndex v) { return t.leaving(via[v], v); };
    auto parent_of = [&](NodeIndex v) { return t.link(via[v]).other(v); };
    auto climb = [&](NodeIndex from, std::vector<DirectedLink>& chain, bool single_step) {
        for (NodeIndex w = from; w != mh && reverse_used[w] == 0;) {
            chain.push_back(upward(w));
            reverse_used[w] = 1;
            if (single_step) break;
            w = parent_of(w);
        }
    };

    const bool short_paths = model == SptModel::m1;
    for (const auto& l : t.links()) {
        if (tree_link[l.id] != 0) continue;
        for (auto dir : {Direction::forward, Direction::reverse}) {
            const DirectedLink arc{l.id, dir};
            std::vector<DirectedLink> chain{arc};
            climb(t.head(arc), chain, short_paths);
            tb.add_chain(down[t.tail(arc)], chain);
        }
    }
    if (short_paths) {
        for (std::size_t i = 1; i < order.size(); ++i) {
            std::vector<DirectedLink> chain;
            climb(order[i], chain, true);
            tb.add_chain(down[order[i]], chain);
        }
    } else {
        for (std::size_t i = order.size(); i-- > 1;) {
            std::vector<DirectedLink> chain;
            climb(order[i], chain, false);
            tb.add_chain(down[order[i]], chain);
        }
    }
    return tb.finish(model == SptModel::m1 ? Scheme::spt_m1 : Scheme::spt_m2);
}

}  // namespace mcprobe
