#include "tree_builder.hpp"

#include <algorithm>

#include "mcprobe/errors.hpp"

namespace mcprobe::detail {

int TreeBuilder::add_chain(int parent, std::span<const DirectedLink> links)
{
    int cur = parent;
    for (const auto& link : links) {
        const int idx = static_cast<int>(nodes_.size());
        nodes_.push_back({link, cur, {}});
        (cur < 0 ? roots_ : nodes_[cur].children).push_back(idx);
        cur = idx;
    }
    return cur;
}

void TreeBuilder::splice_after(int x, std::span<const DirectedLink> links)
{
    if (links.empty()) return;
    auto& kids = children(x);
    if (kids.size() != 1) throw StructuralError("splice point must have exactly one child");
    const int below = kids.front();
    (x < 0 ? roots_ : nodes_[x].children).clear();
    const int last = add_chain(x, links);
    nodes_[last].children.push_back(below);
    nodes_[below].parent = last;
}

int TreeBuilder::depth(int x) const
{
    int d = 0;
    for (int cur = x; cur >= 0; cur = nodes_[cur].parent) ++d;
    return d;
}

int TreeBuilder::chain_leaf_depth(int x) const
{
    int d = depth(x);
    int cur = x;
    while (true) {
        const auto& kids = children(cur);
        if (kids.empty()) return d;
        if (kids.size() != 1) return -1;
        cur = kids.front();
        ++d;
    }
}

int TreeBuilder::max_leaf_depth() const
{
    int best = 0;
    for (int i = 0; i < size(); ++i)
        if (nodes_[i].children.empty()) best = std::max(best, depth(i));
    return best;
}

RouteTree TreeBuilder::finish(Scheme scheme) const
{
    // Emit in DFS order so sibling order survives renumbering.
    std::vector<RouteTree::Edge> edges;
    edges.reserve(nodes_.size());
    std::vector<std::pair<int, int>> stack;  // (builder node, emitted parent)
    for (auto it = roots_.rbegin(); it != roots_.rend(); ++it) stack.emplace_back(*it, -1);
    while (!stack.empty()) {
        const auto [node, parent] = stack.back();
        stack.pop_back();
        const int idx = static_cast<int>(edges.size());
        edges.push_back({nodes_[node].link, parent});
        const auto& kids = nodes_[node].children;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, idx);
    }
    return RouteTree(scheme, t_.measurement_node(), edges);
}

}  // namespace mcprobe::detail
