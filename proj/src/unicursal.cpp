#include "euler.hpp"
#include "mcprobe/routes.hpp"
#include "tree_builder.hpp"

namespace mcprobe {

RouteTree build_unicursal(const Topology& t)
{
    // Every node of the doubled digraph is balanced, so a circuit exists.
    std::vector<detail::Arc> arcs;
    arcs.reserve(t.directed_link_count());
    for (const auto& d : t.directed_links()) arcs.push_back({d, t.tail(d), t.head(d)});
    const auto order = detail::directed_trail(static_cast<int>(t.node_count()), arcs, t.measurement_node());

    std::vector<DirectedLink> walk;
    walk.reserve(order.size());
    for (int a : order) walk.push_back(arcs[a].link);
    detail::TreeBuilder tb(t);
    tb.add_chain(-1, walk);
    return tb.finish(Scheme::unicursal);
}

}  // namespace mcprobe
