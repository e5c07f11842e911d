#pragma once

#include <span>
#include <vector>

#include "mcprobe/routes.hpp"

namespace mcprobe::detail {

/// Mutable route tree used while a builder assembles chains. Position -1 is
/// the root port.
class TreeBuilder {
public:
    explicit TreeBuilder(const Topology& t) : t_(t) {}

    /// Appends `links` as a chain below `parent`; returns the last node (or
    /// `parent` when `links` is empty).
    int add_chain(int parent, std::span<const DirectedLink> links);
    /// Inserts `links` between `x` and its single child. `links` must start
    /// and end at head(x).
    void splice_after(int x, std::span<const DirectedLink> links);

    [[nodiscard]] NodeIndex head(int x) const { return x < 0 ? t_.measurement_node() : t_.head(nodes_[x].link); }
    [[nodiscard]] int depth(int x) const;
    [[nodiscard]] const std::vector<int>& children(int x) const { return x < 0 ? roots_ : nodes_[x].children; }
    [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
    /// Depth of the leaf reached from `x` when the subtree below `x` is a
    /// unary chain, -1 otherwise.
    [[nodiscard]] int chain_leaf_depth(int x) const;
    [[nodiscard]] int max_leaf_depth() const;

    [[nodiscard]] RouteTree finish(Scheme scheme) const;

private:
    struct Node {
        DirectedLink link;
        int parent = -1;
        std::vector<int> children;
    };

    const Topology& t_;
    std::vector<Node> nodes_;
    std::vector<int> roots_;
};

}  // namespace mcprobe::detail
