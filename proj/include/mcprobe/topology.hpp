#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mcprobe {

using NodeIndex = int;
using LinkId = int;

enum class Direction : std::uint8_t { forward = 0, reverse = 1 };

/// One direction of a full-duplex link. Forward runs from the link's first
/// endpoint to its second, as they were given when the link was created.
struct DirectedLink {
    LinkId link = -1;
    Direction dir = Direction::forward;

    /// Dense index in [0, 2 * link_count): 2 * link + (dir == reverse).
    [[nodiscard]] constexpr int index() const { return 2 * link + (dir == Direction::reverse ? 1 : 0); }
    [[nodiscard]] static constexpr DirectedLink from_index(int i)
    {
        return {i / 2, (i % 2) != 0 ? Direction::reverse : Direction::forward};
    }
    [[nodiscard]] constexpr DirectedLink reversed() const
    {
        return {link, dir == Direction::forward ? Direction::reverse : Direction::forward};
    }

    friend constexpr auto operator<=>(const DirectedLink&, const DirectedLink&) = default;
};

struct UndirectedLink {
    LinkId id = -1;
    NodeIndex a = -1;
    NodeIndex b = -1;

    [[nodiscard]] NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
};

/// A port is the input port at the head of a directed link. The root port
/// faces the measurement host and has no link.
struct PortId {
    int value = -1;  // directed link index, -1 for the root port

    [[nodiscard]] static constexpr PortId root() { return {-1}; }
    [[nodiscard]] static constexpr PortId of(DirectedLink d) { return {d.index()}; }
    [[nodiscard]] constexpr bool is_root() const { return value < 0; }
    [[nodiscard]] constexpr DirectedLink link() const { return DirectedLink::from_index(value); }

    friend constexpr auto operator<=>(const PortId&, const PortId&) = default;
};

/// Undirected unit-link multigraph of switches with a designated
/// measurement node. Immutable once constructed.
class Topology {
public:
    /// Validates: >= 2 nodes, >= 1 link, unique names, no self-loops,
    /// endpoints in range, connected, measurement node in range.
    Topology(std::vector<std::string> names, const std::vector<std::pair<NodeIndex, NodeIndex>>& links,
             NodeIndex measurement_node);

    [[nodiscard]] std::size_t node_count() const { return names_.size(); }
    [[nodiscard]] std::size_t link_count() const { return links_.size(); }
    [[nodiscard]] std::size_t directed_link_count() const { return 2 * links_.size(); }

    [[nodiscard]] const std::string& name(NodeIndex n) const { return names_.at(static_cast<std::size_t>(n)); }
    [[nodiscard]] std::span<const std::string> names() const { return names_; }
    [[nodiscard]] std::optional<NodeIndex> find(std::string_view name) const;
    /// Like find() but throws ValidationError for unknown names.
    [[nodiscard]] NodeIndex node(std::string_view name) const;

    [[nodiscard]] NodeIndex measurement_node() const { return mh_; }
    [[nodiscard]] Topology with_measurement_node(NodeIndex mh) const;

    [[nodiscard]] const UndirectedLink& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }
    [[nodiscard]] std::span<const UndirectedLink> links() const { return links_; }
    /// Incident link ids in ascending order.
    [[nodiscard]] std::span<const LinkId> incident(NodeIndex n) const
    {
        return incident_.at(static_cast<std::size_t>(n));
    }
    [[nodiscard]] int degree(NodeIndex n) const { return static_cast<int>(incident(n).size()); }

    [[nodiscard]] NodeIndex tail(DirectedLink d) const
    {
        const auto& l = link(d.link);
        return d.dir == Direction::forward ? l.a : l.b;
    }
    [[nodiscard]] NodeIndex head(DirectedLink d) const
    {
        const auto& l = link(d.link);
        return d.dir == Direction::forward ? l.b : l.a;
    }
    /// The direction of `id` that leaves `from`.
    [[nodiscard]] DirectedLink leaving(LinkId id, NodeIndex from) const
    {
        return {id, link(id).a == from ? Direction::forward : Direction::reverse};
    }
    [[nodiscard]] std::vector<DirectedLink> directed_links() const;

    /// "tail->head#link", e.g. "A->A-B-1#0".
    [[nodiscard]] std::string label(DirectedLink d) const;
    [[nodiscard]] std::string port_label(PortId p) const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<UndirectedLink> links_;
    std::vector<std::vector<LinkId>> incident_;
    NodeIndex mh_ = -1;
};

/// Parses a directed link: its dense index ("7"), "u->v" (lowest link id
/// between the two) or "u->v#id". Throws ValidationError.
[[nodiscard]] DirectedLink parse_directed_link(const Topology& t, std::string_view text);

/// Odd-degree nodes sorted by name. The list length is always even.
[[nodiscard]] std::vector<NodeIndex> odd_degree_nodes(const Topology& t);

enum class IsolatedNodes { count, ignore };

/// Whether the graph minus `excluding` forms a single component. With
/// IsolatedNodes::ignore, nodes left without any link are disregarded.
[[nodiscard]] bool is_connected(const Topology& t, std::span<const LinkId> excluding = {},
                                IsolatedNodes isolated = IsolatedNodes::count);

/// The six-switch evaluation topology with every named edge expanded into
/// unit links: 26 nodes, 28 links, all degrees even, measurement node A.
[[nodiscard]] Topology ideal_topology();

enum class TopologyFormat { edge_list, graphml };

/// Reads a topology. `measurement_node` overrides any measurement-node
/// directive in the input; without either, the first node read is used.
[[nodiscard]] Topology load_topology(std::istream& in, TopologyFormat format,
                                     std::optional<std::string> measurement_node = std::nullopt);
/// Format chosen by extension: .graphml / .xml are GraphML, all else edge list.
[[nodiscard]] Topology load_topology_file(const std::filesystem::path& path,
                                          std::optional<std::string> measurement_node = std::nullopt);

/// Edge-list serialization readable by load_topology (one unit link per line).
void write_edge_list(std::ostream& out, const Topology& t);

/// Directory holding the bundled data files (renater.edges).
[[nodiscard]] std::filesystem::path data_directory();

/// Resolves "ideal", "renater" or a file path.
[[nodiscard]] Topology resolve_topology(std::string_view alias_or_path,
                                        std::optional<std::string> measurement_node = std::nullopt);

}  // namespace mcprobe
