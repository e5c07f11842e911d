#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcprobe/topology.hpp"

namespace mcprobe {

enum class Scheme { unicursal, bbt_t1, bbt_t2, spt_m1, spt_m2 };

[[nodiscard]] std::string_view to_string(Scheme s);
/// Accepts "unicursal", "bbt-t1", "bbt_t1", "spt-m2", ...
[[nodiscard]] std::optional<Scheme> parse_scheme(std::string_view s);

enum class SegmentKind { backbone, branch };

/// One hop of the probe route: the packet crosses `link` and arrives at the
/// input port at its head. Zero children means the port discards (leaf).
struct TraversalNode {
    DirectedLink link;
    int parent = -1;  // -1: hangs off the root port
    std::vector<int> children;
    int depth = 0;  // links from the root port, this one included
    int segment = -1;  // position in RouteTree::segments()
};

/// A maximal unary chain of traversal nodes. Indices are 1-based; backbone
/// segments (interior chains) come first, branch segments (chains ending at a
/// leaf port) carry the highest indices.
struct Segment {
    SegmentKind kind = SegmentKind::backbone;
    int index = 0;
    std::vector<int> nodes;  // top to bottom
};

struct TerminalPath {
    int leaf = -1;
    std::vector<DirectedLink> links;  // root to leaf
    [[nodiscard]] int length() const { return static_cast<int>(links.size()); }
};

/// Rooted multicast tree of directed-link traversals. Nodes are stored in
/// depth-first preorder, so every parent precedes its children.
class RouteTree {
public:
    struct Edge {
        DirectedLink link;
        int parent = -1;
    };

    /// Builds from (link, parent) pairs in any order where parents are
    /// referenced by position in `edges`. No coverage checking happens here;
    /// see validate_route().
    RouteTree(Scheme scheme, NodeIndex measurement_node, std::span<const Edge> edges);

    [[nodiscard]] Scheme scheme() const { return scheme_; }
    [[nodiscard]] NodeIndex measurement_node() const { return mh_; }
    [[nodiscard]] std::span<const TraversalNode> nodes() const { return nodes_; }
    [[nodiscard]] const TraversalNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] std::span<const int> root_children() const { return root_children_; }
    [[nodiscard]] std::span<const Segment> segments() const { return segments_; }
    [[nodiscard]] std::span<const int> leaves() const { return leaves_; }

    /// Tree node carrying the directed link, if any.
    [[nodiscard]] std::optional<int> node_for(DirectedLink d) const;
    [[nodiscard]] PortId port(int node_index) const { return PortId::of(node(node_index).link); }
    /// True when `ancestor` is `n` or lies above it; -1 denotes the root port.
    [[nodiscard]] bool is_ancestor(int ancestor, int n) const;
    [[nodiscard]] std::vector<TerminalPath> terminal_paths() const;
    /// Links strictly below `upper` down to and including `lower` (-1 = root).
    [[nodiscard]] std::vector<int> chain(int upper, int lower) const;

private:
    Scheme scheme_;
    NodeIndex mh_;
    std::vector<TraversalNode> nodes_;
    std::vector<int> root_children_;
    std::vector<Segment> segments_;
    std::vector<int> leaves_;
    std::vector<int> by_directed_;  // directed index -> node, -1 when absent
};

struct RouteStats {
    int paths = 0;  // B
    double avg = 0;
    int min = 0;
    int max = 0;
    int segments = 0;  // S
    double segment_stdev = 0;  // population
};

[[nodiscard]] RouteStats route_stats(const RouteTree& rt);

struct ValidationReport {
    int missing = 0;
    int duplicated = 0;
    int foreign = 0;  // links that do not exist in the topology
    int discontinuities = 0;
    int bad_root_attachments = 0;
    std::vector<std::string> messages;

    [[nodiscard]] bool ok() const { return messages.empty(); }
    [[nodiscard]] std::size_t violation_count() const { return messages.size(); }
};

/// Exactly-once directed-link coverage, child continuity and root attachment.
[[nodiscard]] ValidationReport validate_route(const RouteTree& rt, const Topology& t);

/// Structured text dump: per terminal path link lists and segment membership.
void write_route_report(std::ostream& out, const RouteTree& rt, const Topology& t);

// ---------------------------------------------------------------------------
// Odd-degree omission

/// Undirected multigraph left after omission. Cut groups are contracted into
/// a single combined node; other nodes keep their original identity.
struct ReducedGraph {
    struct Edge {
        LinkId link = -1;  // original link id
        NodeIndex a = -1;  // reduced node of the original endpoint a
        NodeIndex b = -1;
    };
    std::vector<std::string> names;
    std::vector<NodeIndex> node_of;  // original node -> reduced node
    std::vector<Edge> edges;

    [[nodiscard]] std::size_t node_count() const { return names.size(); }
    [[nodiscard]] int degree(NodeIndex reduced_node) const;
    [[nodiscard]] bool all_even() const;
    /// Connected over nodes that still have links.
    [[nodiscard]] bool connected() const;
};

struct OmittedGroup {
    std::vector<LinkId> links;  // ascending
    std::vector<NodeIndex> nodes;  // ascending
    bool cut = false;
    NodeIndex combined_node = -1;  // reduced node replacing the group when cut
};

struct OmissionPlan {
    std::vector<OmittedGroup> groups;
    ReducedGraph reduced;

    /// Group containing `link`, or -1.
    [[nodiscard]] int group_of_link(LinkId link) const;
    /// Group touching `node`, or -1.
    [[nodiscard]] int group_of_node(NodeIndex node) const;
};

[[nodiscard]] OmissionPlan omit_odd_links(const Topology& t);

// ---------------------------------------------------------------------------
// Eulerian circuits

/// Closed walk from `start` over every link of `t` exactly once. Ties are
/// broken by taking the unused incident link with the smallest id.
/// Throws StructuralError if a node has odd degree or links are disconnected.
[[nodiscard]] std::vector<DirectedLink> eulerian_circuit(const Topology& t, NodeIndex start);
/// Same over a reduced graph; `start` is a reduced node. Directions refer to
/// the original link endpoints.
[[nodiscard]] std::vector<DirectedLink> eulerian_circuit(const ReducedGraph& g, NodeIndex start);

// ---------------------------------------------------------------------------
// Builders

[[nodiscard]] RouteTree build_unicursal(const Topology& t);

enum class BbtVariant { t1, t2 };
[[nodiscard]] RouteTree build_bbt(const Topology& t, BbtVariant variant, int segment_len);

enum class SptModel { m1, m2 };
[[nodiscard]] RouteTree build_spt(const Topology& t, SptModel model);

struct RouteParams {
    Scheme scheme = Scheme::bbt_t2;
    int segment_len = 8;  // BBT only
};

/// Dispatches to the builder for `params.scheme`.
[[nodiscard]] RouteTree build_route(const Topology& t, const RouteParams& params);
/// "unicursal", "T1_seg8", "T2_seg4", "Model1", ...
[[nodiscard]] std::string route_name(const RouteParams& params);

}  // namespace mcprobe
