#include "euler.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "mcprobe/errors.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe::detail {

std::vector<DirectedLink> undirected_circuit(int node_count, std::span<const UndirectedEdge> edges, int start)
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count));
    std::vector<int> degree(static_cast<std::size_t>(node_count), 0);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        adj[edges[e].a].push_back(e);
        if (edges[e].a != edges[e].b) adj[edges[e].b].push_back(e);
        degree[edges[e].a] += 1;
        degree[edges[e].b] += 1;
    }
    for (int v = 0; v < node_count; ++v) {
        if (degree[v] % 2 != 0) throw StructuralError(fmt::format("Eulerian circuit: node {} has odd degree", v));
        std::sort(adj[v].begin(), adj[v].end(), [&](int x, int y) { return edges[x].link < edges[y].link; });
    }
    if (edges.empty()) return {};
    if (start < 0 || start >= node_count || degree[start] == 0)
        throw StructuralError("Eulerian circuit: start node has no links");

    std::vector<char> used(edges.size(), 0);
    std::vector<std::size_t> next(static_cast<std::size_t>(node_count), 0);
    struct Frame {
        int node;
        int edge;
        bool from_a;
    };
    std::vector<Frame> stack{{start, -1, true}};
    std::vector<DirectedLink> out;
    out.reserve(edges.size());
    while (!stack.empty()) {
        const int v = stack.back().node;
        auto& ptr = next[v];
        while (ptr < adj[v].size() && used[adj[v][ptr]] != 0) ++ptr;
        if (ptr < adj[v].size()) {
            const int e = adj[v][ptr];
            used[e] = 1;
            const bool from_a = edges[e].a == v;
            stack.push_back({from_a ? edges[e].b : edges[e].a, e, from_a});
        } else {
            const Frame f = stack.back();
            stack.pop_back();
            if (f.edge >= 0)
                out.push_back({edges[f.edge].link, f.from_a ? Direction::forward : Direction::reverse});
        }
    }
    if (out.size() != edges.size()) throw StructuralError("Eulerian circuit: links are not connected");
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> directed_trail(int node_count, std::span<const Arc> arcs, int start)
{
    std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(node_count));
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) out_arcs[arcs[i].from].push_back(i);
    for (auto& list : out_arcs)
        std::sort(list.begin(), list.end(), [&](int x, int y) { return arcs[x].link.index() < arcs[y].link.index(); });
    if (arcs.empty()) return {};

    std::vector<std::size_t> next(static_cast<std::size_t>(node_count), 0);
    std::vector<std::pair<int, int>> stack{{start, -1}};  // (node, arc used to arrive)
    std::vector<int> out;
    out.reserve(arcs.size());
    while (!stack.empty()) {
        const int v = stack.back().first;
        if (next[v] < out_arcs[v].size()) {
            const int a = out_arcs[v][next[v]++];
            stack.emplace_back(arcs[a].to, a);
        } else {
            if (stack.back().second >= 0) out.push_back(stack.back().second);
            stack.pop_back();
        }
    }
    if (out.size() != arcs.size()) throw StructuralError("directed trail: arcs not reachable from start");
    std::reverse(out.begin(), out.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        if (arcs[out[i - 1]].to != arcs[out[i]].from) throw StructuralError("directed trail: digraph is unbalanced");
    return out;
}

}  // namespace mcprobe::detail

namespace mcprobe {

std::vector<DirectedLink> eulerian_circuit(const Topology& t, NodeIndex start)
{
    std::vector<detail::UndirectedEdge> edges;
    edges.reserve(t.link_count());
    for (const auto& l : t.links()) edges.push_back({l.id, l.a, l.b});
    return detail::undirected_circuit(static_cast<int>(t.node_count()), edges, start);
}

std::vector<DirectedLink> eulerian_circuit(const ReducedGraph& g, NodeIndex start)
{
    std::vector<detail::UndirectedEdge> edges;
    edges.reserve(g.edges.size());
    for (const auto& e : g.edges) edges.push_back({e.link, e.a, e.b});
    return detail::undirected_circuit(static_cast<int>(g.node_count()), edges, start);
}

}  // namespace mcprobe
