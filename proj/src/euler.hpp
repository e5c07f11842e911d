#pragma once

#include <span>
#include <vector>

#include "mcprobe/topology.hpp"

namespace mcprobe::detail {

struct UndirectedEdge {
    LinkId link = -1;
    int a = -1;
    int b = -1;
};

/// Hierholzer over an undirected multigraph (self-loops allowed). Returns the
/// circuit as directed links; forward means the edge was crossed a -> b.
/// Incident edges are tried in ascending link id order.
std::vector<DirectedLink> undirected_circuit(int node_count, std::span<const UndirectedEdge> edges, int start);

struct Arc {
    DirectedLink link;
    int from = -1;
    int to = -1;
};

/// Hierholzer over a digraph. Produces a trail from `start` that uses every
/// arc once; a circuit when the digraph is balanced, otherwise `start` must
/// carry the single surplus out-arc. Returns arc indices in walk order.
/// Outgoing arcs are tried in ascending directed-link index order.
std::vector<int> directed_trail(int node_count, std::span<const Arc> arcs, int start);

}  // namespace mcprobe::detail
