#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "mcprobe/errors.hpp"
#include "mcprobe/topology.hpp"

namespace mcprobe {

namespace {

constexpr std::string_view kMhDirective = "measurement-node:";

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

class GraphAccumulator {
public:
    NodeIndex intern(const std::string& name)
    {
        auto [it, inserted] = index_.emplace(name, static_cast<NodeIndex>(names_.size()));
        if (inserted) names_.push_back(name);
        return it->second;
    }

    std::optional<NodeIndex> lookup(const std::string& name) const
    {
        const auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    void add_link(NodeIndex a, NodeIndex b) { links_.emplace_back(a, b); }

    // Replaces a multi-hop link by `distance` unit links through hidden
    // switches named "<a>-<b>-<k>".
    void add_expanded(NodeIndex a, NodeIndex b, int distance)
    {
        NodeIndex prev = a;
        const std::string stem = fmt::format("{}-{}", names_[a], names_[b]);
        std::string suffix;
        for (int m = 2; index_.contains(fmt::format("{}-1{}", stem, suffix)); ++m) suffix = fmt::format(".{}", m);
        for (int k = 1; k < distance; ++k) {
            const auto hidden = intern(fmt::format("{}-{}{}", stem, k, suffix));
            add_link(prev, hidden);
            prev = hidden;
        }
        add_link(prev, b);
    }

    Topology build(const std::optional<std::string>& mh) &&
    {
        if (names_.empty()) throw ValidationError("topology has no nodes");
        NodeIndex root = 0;
        if (mh) {
            const auto it = index_.find(*mh);
            if (it == index_.end()) throw ValidationError(fmt::format("measurement node '{}' not in topology", *mh));
            root = it->second;
        }
        return Topology(std::move(names_), links_, root);
    }

private:
    std::vector<std::string> names_;
    std::map<std::string, NodeIndex> index_;
    std::vector<std::pair<NodeIndex, NodeIndex>> links_;
};

Topology parse_edge_list(std::istream& in, std::optional<std::string> mh)
{
    GraphAccumulator acc;
    std::optional<std::string> directive;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            const auto comment = trim(view.substr(hash + 1));
            if (comment.starts_with(kMhDirective)) directive = std::string(trim(comment.substr(kMhDirective.size())));
            view = view.substr(0, hash);
        }
        std::istringstream fields{std::string(view)};
        std::vector<std::string> tokens{std::istream_iterator<std::string>(fields), {}};
        if (tokens.empty()) continue;
        if (tokens.size() < 2 || tokens.size() > 3)
            throw ParseError(fmt::format("line {}: expected 'nodeA nodeB [distance]'", line_no));
        int distance = 1;
        if (tokens.size() == 3) {
            std::size_t used = 0;
            try {
                distance = std::stoi(tokens[2], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tokens[2].size() || distance < 1)
                throw ParseError(fmt::format("line {}: distance must be an integer >= 1", line_no));
        }
        if (tokens[0] == tokens[1]) throw ValidationError(fmt::format("line {}: self-loop at '{}'", line_no, tokens[0]));
        const auto a = acc.intern(tokens[0]);
        const auto b = acc.intern(tokens[1]);
        if (distance == 1)
            acc.add_link(a, b);
        else
            acc.add_expanded(a, b, distance);
    }
    return std::move(acc).build(mh ? mh : directive);
}

std::map<std::string, std::string> attributes(const std::string& body)
{
    static const std::regex kAttr(R"re(([A-Za-z_:][-\w:.]*)\s*=\s*"([^"]*)")re");
    std::map<std::string, std::string> out;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), kAttr); it != std::sregex_iterator(); ++it)
        out[(*it)[1].str()] = (*it)[2].str();
    return out;
}

Topology parse_graphml(std::istream& in, std::optional<std::string> mh)
{
    const std::string text{std::istreambuf_iterator<char>(in), {}};
    if (text.find("<graphml") == std::string::npos) throw ParseError("not a GraphML document");
    static const std::regex kTag(R"(<(node|edge)\b([^>]*)>)");
    GraphAccumulator acc;
    std::vector<std::pair<std::string, std::string>> edges;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kTag); it != std::sregex_iterator(); ++it) {
        const auto attrs = attributes((*it)[2].str());
        if ((*it)[1] == "node") {
            const auto id = attrs.find("id");
            if (id == attrs.end() || id->second.empty()) throw ParseError("GraphML node without id");
            acc.intern(id->second);
        } else {
            const auto src = attrs.find("source");
            const auto dst = attrs.find("target");
            if (src == attrs.end() || dst == attrs.end()) throw ParseError("GraphML edge without source/target");
            edges.emplace_back(src->second, dst->second);
        }
    }
    for (const auto& [s, d] : edges) {
        const auto a = acc.lookup(s);
        const auto b = acc.lookup(d);
        if (!a || !b) throw ValidationError(fmt::format("GraphML edge {}-{} references an unknown node", s, d));
        if (*a == *b) throw ValidationError(fmt::format("self-loop at '{}'", s));
        acc.add_link(*a, *b);
    }
    return std::move(acc).build(mh);
}

}  // namespace

Topology load_topology(std::istream& in, TopologyFormat format, std::optional<std::string> measurement_node)
{
    if (format == TopologyFormat::graphml) return parse_graphml(in, std::move(measurement_node));
    return parse_edge_list(in, std::move(measurement_node));
}

Topology load_topology_file(const std::filesystem::path& path, std::optional<std::string> measurement_node)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("topology not found: {}", path.string()));
    const auto ext = path.extension().string();
    const auto format = (ext == ".graphml" || ext == ".xml") ? TopologyFormat::graphml : TopologyFormat::edge_list;
    return load_topology(in, format, std::move(measurement_node));
}

void write_edge_list(std::ostream& out, const Topology& t)
{
    out << "# " << kMhDirective << ' ' << t.name(t.measurement_node()) << '\n';
    for (const auto& l : t.links()) out << t.name(l.a) << ' ' << t.name(l.b) << '\n';
}

}  // namespace mcprobe
