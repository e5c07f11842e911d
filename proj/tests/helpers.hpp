#pragma once

#include <random>
#include <sstream>
#include <string>

#include "mcprobe/topology.hpp"

namespace testing {

inline mcprobe::Topology from_edges(const std::string& text, const std::string& mh = "")
{
    std::istringstream in(text);
    return mcprobe::load_topology(in, mcprobe::TopologyFormat::edge_list,
                                  mh.empty() ? std::nullopt : std::optional<std::string>(mh));
}

inline mcprobe::Topology triangle() { return from_edges("A B\nB C\nC A\n", "A"); }
inline mcprobe::Topology path3() { return from_edges("A B\nB C\n", "A"); }

enum class Shape { tree, sparse, meshy };

// Connected random multigraph-free graph: a random spanning tree plus extra
// chords. Trees and sparse graphs give many bridges and odd-degree nodes.
inline mcprobe::Topology random_graph(std::uint64_t seed, int min_nodes = 8, int max_nodes = 60)
{
    std::mt19937_64 rng(seed);
    const int n = min_nodes + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - min_nodes + 1));
    const auto shape = static_cast<Shape>(seed % 3);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    std::vector<std::pair<int, int>> links;
    for (int i = 1; i < n; ++i) links.emplace_back(static_cast<int>(rng() % static_cast<std::uint64_t>(i)), i);
    const int extra = shape == Shape::tree ? 0 : shape == Shape::sparse ? n / 5 : n;
    for (int k = 0; k < extra;) {
        const int a = static_cast<int>(rng() % n);
        const int b = static_cast<int>(rng() % n);
        if (a == b) continue;
        links.emplace_back(a, b);
        ++k;
    }
    return mcprobe::Topology(names, links, static_cast<int>(rng() % n));
}

}  // namespace testing
