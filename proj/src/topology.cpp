#include "mcprobe/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <numeric>

#include "mcprobe/errors.hpp"

#ifndef MCPROBE_DATA_DIR
#define MCPROBE_DATA_DIR "data"
#endif

namespace mcprobe {

namespace {

// Components over links not in `excluded`; returns the number of components
// that contain at least one node (isolated nodes optionally skipped).
int component_count(const Topology& t, const std::vector<char>& excluded, IsolatedNodes isolated)
{
    const auto n = t.node_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<char> touched(n, 0);
    for (const auto& l : t.links()) {
        if (excluded[static_cast<std::size_t>(l.id)] != 0) continue;
        touched[l.a] = touched[l.b] = 1;
        parent[find(l.a)] = find(l.b);
    }
    int components = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (isolated == IsolatedNodes::ignore && touched[v] == 0) continue;
        if (find(static_cast<int>(v)) == static_cast<int>(v)) ++components;
    }
    return components;
}

}  // namespace

Topology::Topology(std::vector<std::string> names, const std::vector<std::pair<NodeIndex, NodeIndex>>& links,
                   NodeIndex measurement_node)
    : names_(std::move(names)), incident_(names_.size()), mh_(measurement_node)
{
    if (names_.size() < 2) throw ValidationError("topology needs at least 2 nodes");
    if (links.empty()) throw ValidationError("topology needs at least 1 link");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw ValidationError("empty node name");
        if (!index_.emplace(names_[i], static_cast<NodeIndex>(i)).second)
            throw ValidationError(fmt::format("duplicate node name '{}'", names_[i]));
    }
    const auto n = static_cast<NodeIndex>(names_.size());
    if (mh_ < 0 || mh_ >= n) throw ValidationError("measurement node not in topology");

    links_.reserve(links.size());
    for (const auto& [a, b] : links) {
        if (a < 0 || a >= n || b < 0 || b >= n) throw ValidationError("link endpoint not in topology");
        if (a == b) throw ValidationError(fmt::format("self-loop at node '{}'", names_[a]));
        const auto id = static_cast<LinkId>(links_.size());
        links_.push_back({id, a, b});
        incident_[a].push_back(id);
        incident_[b].push_back(id);
    }
    const std::vector<char> none(links_.size(), 0);
    if (component_count(*this, none, IsolatedNodes::count) != 1) throw ValidationError("topology is not connected");
}

std::optional<NodeIndex> Topology::find(std::string_view name) const
{
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeIndex Topology::node(std::string_view name) const
{
    if (auto n = find(name)) return *n;
    throw ValidationError(fmt::format("unknown node '{}'", name));
}

Topology Topology::with_measurement_node(NodeIndex mh) const
{
    Topology copy = *this;
    if (mh < 0 || mh >= static_cast<NodeIndex>(names_.size()))
        throw ValidationError("measurement node not in topology");
    copy.mh_ = mh;
    return copy;
}

std::vector<DirectedLink> Topology::directed_links() const
{
    std::vector<DirectedLink> out;
    out.reserve(directed_link_count());
    for (int i = 0; i < static_cast<int>(directed_link_count()); ++i) out.push_back(DirectedLink::from_index(i));
    return out;
}

std::string Topology::label(DirectedLink d) const
{
    return fmt::format("{}->{}#{}", name(tail(d)), name(head(d)), d.link);
}

std::string Topology::port_label(PortId p) const
{
    if (p.is_root()) return fmt::format("root@{}", name(mh_));
    return label(p.link());
}

DirectedLink parse_directed_link(const Topology& t, std::string_view text)
{
    const auto n = static_cast<int>(t.directed_link_count());
    const auto arrow = text.find("->");
    if (arrow == std::string_view::npos) {
        int index = -1;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, index);
        if (ec != std::errc{} || ptr != end || index < 0 || index >= n)
            throw ValidationError(fmt::format("'{}' is not a directed link index in [0, {})", text, n));
        return DirectedLink::from_index(index);
    }
    auto rest = text.substr(arrow + 2);
    std::optional<LinkId> wanted;
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
        LinkId id = -1;
        const auto digits = rest.substr(hash + 1);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
        if (ec != std::errc{} || ptr != digits.data() + digits.size())
            throw ValidationError(fmt::format("bad link id in '{}'", text));
        wanted = id;
        rest = rest.substr(0, hash);
    }
    const NodeIndex from = t.node(text.substr(0, arrow));
    const NodeIndex to = t.node(rest);
    for (LinkId l : t.incident(from)) {
        if (t.link(l).other(from) != to || (wanted && *wanted != l)) continue;
        return t.leaving(l, from);
    }
    throw ValidationError(fmt::format("no link {}", text));
}

std::vector<NodeIndex> odd_degree_nodes(const Topology& t)
{
    std::vector<NodeIndex> odd;
    for (NodeIndex v = 0; v < static_cast<NodeIndex>(t.node_count()); ++v)
        if (t.degree(v) % 2 != 0) odd.push_back(v);
    std::sort(odd.begin(), odd.end(), [&](NodeIndex x, NodeIndex y) { return t.name(x) < t.name(y); });
    return odd;
}

bool is_connected(const Topology& t, std::span<const LinkId> excluding, IsolatedNodes isolated)
{
    std::vector<char> excluded(t.link_count(), 0);
    for (LinkId id : excluding) excluded.at(static_cast<std::size_t>(id)) = 1;
    return component_count(t, excluded, isolated) <= 1;
}

Topology ideal_topology()
{
    // Named edges with their link distance. The order fixes link ids and
    // therefore the Eulerian tie-break: A B C D F E B D A.
    struct NamedEdge {
        const char* a;
        const char* b;
        int distance;
    };
    static constexpr NamedEdge kEdges[] = {
        {"A", "B", 4}, {"B", "C", 4}, {"C", "D", 4}, {"D", "F", 2},
        {"F", "E", 2}, {"E", "B", 4}, {"B", "D", 4}, {"D", "A", 4},
    };
    std::vector<std::string> names{"A", "B", "C", "D", "E", "F"};
    auto index_of = [&](const std::string& s) {
        return static_cast<NodeIndex>(std::find(names.begin(), names.end(), s) - names.begin());
    };
    std::vector<std::pair<NodeIndex, NodeIndex>> links;
    for (const auto& e : kEdges) {
        NodeIndex prev = index_of(e.a);
        for (int k = 1; k < e.distance; ++k) {
            names.push_back(fmt::format("{}-{}-{}", e.a, e.b, k));
            const auto hidden = static_cast<NodeIndex>(names.size() - 1);
            links.emplace_back(prev, hidden);
            prev = hidden;
        }
        links.emplace_back(prev, index_of(e.b));
    }
    return Topology(std::move(names), links, 0);
}

std::filesystem::path data_directory()
{
    if (const char* env = std::getenv("MCPROBE_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return MCPROBE_DATA_DIR;
}

Topology resolve_topology(std::string_view alias_or_path, std::optional<std::string> measurement_node)
{
    if (alias_or_path == "ideal") {
        Topology t = ideal_topology();
        if (measurement_node) return t.with_measurement_node(t.node(*measurement_node));
        return t;
    }
    std::filesystem::path path = alias_or_path == "renater" ? data_directory() / "renater.edges"
                                                            : std::filesystem::path(alias_or_path);
    if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("topology not found: {}", path.string()));
    return load_topology_file(path, std::move(measurement_node));
}

}  // namespace mcprobe
