#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/topology.hpp"

using namespace mcprobe;

TEST_CASE("edge list basics")
{
    const auto t = testing::from_edges("A B\nB C", "A");
    CHECK(t.node_count() == 3);
    CHECK(t.link_count() == 2);
    CHECK(t.directed_link_count() == 4);
    CHECK(t.link(0).a == t.node("A"));
    CHECK(t.link(1).b == t.node("C"));
    CHECK(t.measurement_node() == t.node("A"));
}

TEST_CASE("edge list rejects bad input")
{
    CHECK_THROWS_AS(testing::from_edges("A A"), Error);
    CHECK_THROWS_AS(testing::from_edges("A"), ParseError);
    CHECK_THROWS_AS(testing::from_edges("A B C D"), ParseError);
    CHECK_THROWS_AS(testing::from_edges("A B x"), ParseError);
    CHECK_THROWS_AS(testing::from_edges("A B 0"), ParseError);
    CHECK_THROWS_AS(testing::from_edges("A B\nC D"), ValidationError);  // disconnected
    CHECK_THROWS_AS(testing::from_edges("A B", "Z"), ValidationError);
    CHECK_THROWS_AS(testing::from_edges("# nothing\n"), Error);
}

TEST_CASE("distance expansion and directives")
{
    const auto t = testing::from_edges("# measurement-node: B\nA B 3\nB C\n");
    CHECK(t.node_count() == 5);
    CHECK(t.link_count() == 4);
    CHECK(t.find("A-B-1"));
    CHECK(t.find("A-B-2"));
    CHECK(t.name(t.measurement_node()) == "B");
    // Parallel links are fine.
    const auto multi = testing::from_edges("A B\nA B\n");
    CHECK(multi.link_count() == 2);
    CHECK(multi.degree(multi.node("A")) == 2);
}

TEST_CASE("ideal topology")
{
    const auto t = ideal_topology();
    CHECK(t.node_count() == 26);
    CHECK(t.link_count() == 28);
    CHECK(t.directed_link_count() == 56);
    CHECK(t.degree(t.node("B")) == 4);
    CHECK(t.degree(t.node("A")) == 2);
    CHECK(t.degree(t.node("D")) == 4);
    CHECK(t.degree(t.node("F")) == 2);
    CHECK(odd_degree_nodes(t).empty());
    CHECK(t.name(t.measurement_node()) == "A");

    std::ostringstream a;
    std::ostringstream b;
    write_edge_list(a, t);
    write_edge_list(b, ideal_topology());
    CHECK(a.str() == b.str());
}

TEST_CASE("odd degree nodes")
{
    const auto p = testing::path3();
    const auto odd = odd_degree_nodes(p);
    REQUIRE(odd.size() == 2);
    CHECK(p.name(odd[0]) == "A");
    CHECK(p.name(odd[1]) == "C");

    const auto star = testing::from_edges("X L1\nX L2\nX L3\n");
    CHECK(odd_degree_nodes(star).size() == 4);
}

TEST_CASE("connectivity with exclusions")
{
    CHECK(is_connected(ideal_topology()));
    const auto p = testing::path3();
    const LinkId ab[] = {0};
    CHECK_FALSE(is_connected(p, ab));
    CHECK(is_connected(p, ab, IsolatedNodes::ignore));
    const auto tri = testing::triangle();
    CHECK(is_connected(tri, ab));
}

TEST_CASE("serialization round trip")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = testing::random_graph(seed);
        std::stringstream buf;
        write_edge_list(buf, t);
        const auto back = load_topology(buf, TopologyFormat::edge_list);
        REQUIRE(back.node_count() == t.node_count());
        REQUIRE(back.link_count() == t.link_count());
        CHECK(back.measurement_node() == t.measurement_node());
        for (LinkId l = 0; l < static_cast<LinkId>(t.link_count()); ++l) {
            CHECK(back.name(back.link(l).a) == t.name(t.link(l).a));
            CHECK(back.name(back.link(l).b) == t.name(t.link(l).b));
        }
        // Degree sum and even odd count.
        int sum = 0;
        for (NodeIndex v = 0; v < static_cast<NodeIndex>(t.node_count()); ++v) sum += t.degree(v);
        CHECK(sum == 2 * static_cast<int>(t.link_count()));
        CHECK(odd_degree_nodes(t).size() % 2 == 0);
    }
}

TEST_CASE("graphml subset")
{
    std::istringstream in(R"(<?xml version="1.0"?>
<graphml><graph edgedefault="undirected">
  <node id="a"><data key="label">Paris</data></node>
  <node id="b"/>
  <node id="c"/>
  <edge source="a" target="b"/>
  <edge id="e1" source="b" target="c"><data key="w">3</data></edge>
</graph></graphml>)");
    const auto t = load_topology(in, TopologyFormat::graphml);
    CHECK(t.node_count() == 3);
    CHECK(t.link_count() == 2);

    std::istringstream bad(R"(<graphml><node id="a"/><edge source="a" target="z"/></graphml>)");
    CHECK_THROWS_AS((void)load_topology(bad, TopologyFormat::graphml), ValidationError);
}

TEST_CASE("bundled data")
{
    const auto t = resolve_topology("renater");
    CHECK(t.link_count() == 54);
    CHECK(t.directed_link_count() == 108);
    CHECK(t.name(t.measurement_node()) == "24");
    CHECK(resolve_topology("renater", "41").name(resolve_topology("renater", "41").measurement_node()) == "41");
    CHECK_THROWS_AS((void)resolve_topology("/no/such/file.edges"), ConfigError);
}

TEST_CASE("directed link parsing")
{
    const auto t = ideal_topology();
    CHECK(parse_directed_link(t, "0") == DirectedLink{0, Direction::forward});
    CHECK(parse_directed_link(t, "1") == DirectedLink{0, Direction::reverse});
    CHECK(parse_directed_link(t, "A-B-1->A") == DirectedLink{0, Direction::reverse});
    CHECK(parse_directed_link(t, "A->A-B-1#0") == DirectedLink{0, Direction::forward});
    CHECK_THROWS_AS((void)parse_directed_link(t, "56"), ValidationError);
    CHECK_THROWS_AS((void)parse_directed_link(t, "A->C"), ValidationError);
    CHECK(t.label(DirectedLink{0, Direction::forward}) == "A->A-B-1#0");
}
