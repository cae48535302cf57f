#pragma once
// Immutable typed property graph.
//
// Node indices are assigned in lexicographic order of node id, and relation
// ids in lexicographic order of relation name. Everything downstream that
// tie-breaks "by id" can therefore compare indices directly.
//
// Adjacency is CSR over incidences: every stored edge (u -r-> v) yields an
// outgoing record in u's slice and an incoming record in v's slice. Each slice
// is sorted by (neighbor, relation, direction).

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/error.hpp"
#include "gather/text.hpp"

namespace gather {

using NodeIndex = std::uint32_t;
using TypeId = std::uint8_t;
using RelationId = std::uint16_t;

class SemanticTypeSet {
public:
    explicit SemanticTypeSet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw ConfigError("semantic type set is empty");
        if (names_.size() > 255) throw ConfigError("at most 255 semantic types are supported");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) throw ConfigError("semantic type names must be non-empty");
            if (!lookup_.emplace(names_[i], static_cast<TypeId>(i)).second)
                throw ConfigError("duplicate semantic type '" + names_[i] + "'");
        }
    }

    static SemanticTypeSet defaults() {
        return SemanticTypeSet({"Gene", "CellType", "BiologicalProcess", "MolecularFunction",
                                "CellularComponent", "Pathway", "Anatomy", "Disease", "Phenotype"});
    }

    std::optional<TypeId> find(std::string_view name) const {
        auto it = lookup_.find(std::string(name));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    TypeId id(std::string_view name) const {
        if (auto t = find(name)) return *t;
        throw ConfigError("unknown semantic type '" + std::string(name) + "'");
    }

    const std::string& name(TypeId t) const { return names_.at(t); }
    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, TypeId> lookup_;
};

struct GraphNode {
    std::string id;
    TypeId type = 0;
    std::string name;
    std::vector<std::string> synonyms;
};

enum class Direction : std::uint8_t { outgoing = 0, incoming = 1 };

struct Incidence {
    NodeIndex neighbor;
    RelationId relation;
    Direction direction;
};

struct Neighbor {
    std::string_view id;
    std::string_view relation;
    Direction direction;

    bool operator==(const Neighbor&) const = default;
};

/// Plain records, the unit of TSV I/O and of synthetic generation.
struct NodeRecord {
    std::string id;
    std::string type;
    std::string name;
    std::vector<std::string> synonyms;
};

struct EdgeRecord {
    std::string source;
    std::string relation;
    std::string target;
};

class GraphBuilder;

class PropertyGraph {
public:
    PropertyGraph() : types_(SemanticTypeSet::defaults()), offsets_{0} {}
    PropertyGraph(PropertyGraph&&) noexcept = default;
    PropertyGraph& operator=(PropertyGraph&&) noexcept = default;
    PropertyGraph(const PropertyGraph&) = delete;
    PropertyGraph& operator=(const PropertyGraph&) = delete;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    const SemanticTypeSet& types() const noexcept { return types_; }
    std::span<const GraphNode> nodes() const noexcept { return nodes_; }
    const GraphNode& node(NodeIndex i) const { return nodes_.at(i); }
    TypeId type_of(NodeIndex i) const noexcept { return nodes_[i].type; }
    const std::vector<std::string>& relations() const noexcept { return relations_; }
    const std::string& relation_name(RelationId r) const { return relations_.at(r); }

    std::optional<NodeIndex> find(std::string_view id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    NodeIndex index_of(std::string_view id) const {
        if (auto i = find(id)) return *i;
        throw std::out_of_range("unknown node id '" + std::string(id) + "'");
    }

    /// All incident edges of a node, both stored directions.
    std::span<const Incidence> incident(NodeIndex i) const noexcept {
        return {incidences_.data() + offsets_[i], incidences_.data() + offsets_[i + 1]};
    }

    std::size_t degree(NodeIndex i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    /// Relation-agnostic neighbor listing, sorted by neighbor id then relation.
    std::vector<Neighbor> neighbors(std::string_view id) const {
        std::vector<Neighbor> out;
        for (const auto& inc : incident(index_of(id)))
            out.push_back({nodes_[inc.neighbor].id, relations_[inc.relation], inc.direction});
        return out;
    }

private:
    friend class GraphBuilder;

    SemanticTypeSet types_;
    std::vector<GraphNode> nodes_;
    std::unordered_map<std::string_view, NodeIndex> index_;
    std::vector<std::size_t> offsets_;
    std::vector<Incidence> incidences_;
    std::vector<std::string> relations_;
    std::size_t edge_count_ = 0;
};

/// Accumulates nodes then edges, collecting validation issues instead of
/// failing fast. build() throws DataError listing them, so a graph object
/// only ever exists in a fully valid state.
class GraphBuilder {
public:
    static constexpr std::size_t kMaxReportedIssues = 50;

    explicit GraphBuilder(SemanticTypeSet types = SemanticTypeSet::defaults())
        : types_(std::move(types)) {}

    void add_node(std::string id, std::string_view type, std::string name,
                  std::vector<std::string> synonyms, std::string_view where = {}) {
        if (id.empty()) return issue(where, "empty node id");
        auto t = types_.find(type);
        if (!t) return issue(where, "unknown semantic type '" + std::string(type) + "' for node '" + id + "'");
        if (name.empty()) return issue(where, "empty name for node '" + id + "'");
        if (lookup_.count(id)) return issue(where, "duplicate node id '" + id + "'");
        auto& n = nodes_.emplace_back(GraphNode{std::move(id), *t, std::move(name), std::move(synonyms)});
        lookup_.emplace(n.id, static_cast<NodeIndex>(nodes_.size() - 1));
    }

    void add_node(NodeRecord r, std::string_view where = {}) {
        add_node(std::move(r.id), r.type, std::move(r.name), std::move(r.synonyms), where);
    }

    void add_edge(std::string_view source, std::string_view relation, std::string_view target,
                  std::string_view where = {}) {
        if (relation.empty()) return issue(where, "empty relation");
        auto s = lookup_.find(source);
        if (s == lookup_.end()) return issue(where, "edge references unknown node id '" + std::string(source) + "'");
        auto t = lookup_.find(target);
        if (t == lookup_.end()) return issue(where, "edge references unknown node id '" + std::string(target) + "'");
        if (s->second == t->second) return issue(where, "self-loop on node '" + std::string(source) + "'");
        auto r = relation_ids_.find(relation);
        RelationId rid;
        if (r == relation_ids_.end()) {
            if (relation_names_.size() >= 0xFFFF) return issue(where, "too many relation types");
            rid = static_cast<RelationId>(relation_names_.size());
            relation_names_.emplace_back(relation);
            relation_ids_.emplace(relation_names_.back(), rid);
        } else {
            rid = r->second;
        }
        edges_.push_back({s->second, t->second, rid});
    }

    void add_edge(const EdgeRecord& e, std::string_view where = {}) {
        add_edge(e.source, e.relation, e.target, where);
    }

    bool ok() const noexcept { return issue_count_ == 0; }
    const std::vector<std::string>& issues() const noexcept { return issues_; }

    /// Records an external issue (e.g. a malformed line) so it fails the build.
    void issue(std::string_view where, const std::string& what) {
        ++issue_count_;
        if (issues_.size() < kMaxReportedIssues)
            issues_.push_back(where.empty() ? what : std::string(where) + ": " + what);
    }

    PropertyGraph build() && {
        if (!ok()) {
            auto issues = issues_;
            if (issue_count_ > issues.size())
                issues.push_back("... and " + std::to_string(issue_count_ - issues.size()) + " more");
            throw DataError("graph validation failed (" + std::to_string(issue_count_) + " issue(s))",
                            std::move(issues));
        }

        PropertyGraph g;
        g.types_ = types_;

        const auto n = nodes_.size();
        std::vector<NodeIndex> order(n);
        std::iota(order.begin(), order.end(), NodeIndex{0});
        std::sort(order.begin(), order.end(),
                  [&](NodeIndex a, NodeIndex b) { return nodes_[a].id < nodes_[b].id; });
        std::vector<NodeIndex> remap(n);
        for (NodeIndex i = 0; i < n; ++i) remap[order[i]] = i;

        std::vector<RelationId> rel_order(relation_names_.size());
        std::iota(rel_order.begin(), rel_order.end(), RelationId{0});
        std::sort(rel_order.begin(), rel_order.end(),
                  [&](RelationId a, RelationId b) { return relation_names_[a] < relation_names_[b]; });
        std::vector<RelationId> rel_remap(rel_order.size());
        for (std::size_t i = 0; i < rel_order.size(); ++i) rel_remap[rel_order[i]] = static_cast<RelationId>(i);
        for (auto r : rel_order) g.relations_.push_back(relation_names_[r]);

        g.nodes_.reserve(n);
        for (auto i : order) g.nodes_.push_back(std::move(nodes_[i]));
        g.index_.reserve(n);
        for (NodeIndex i = 0; i < n; ++i) g.index_.emplace(g.nodes_[i].id, i);

        g.offsets_.assign(n + 1, 0);
        for (const auto& e : edges_) {
            ++g.offsets_[remap[e.source] + 1];
            ++g.offsets_[remap[e.target] + 1];
        }
        for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
        g.incidences_.resize(g.offsets_[n]);
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& e : edges_) {
            auto s = remap[e.source], t = remap[e.target];
            auto r = rel_remap[e.relation];
            g.incidences_[cursor[s]++] = {t, r, Direction::outgoing};
            g.incidences_[cursor[t]++] = {s, r, Direction::incoming};
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::sort(g.incidences_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                      g.incidences_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
                      [](const Incidence& a, const Incidence& b) {
                          if (a.neighbor != b.neighbor) return a.neighbor < b.neighbor;
                          if (a.relation != b.relation) return a.relation < b.relation;
                          return a.direction < b.direction;
                      });
        }
        g.edge_count_ = edges_.size();
        return g;
    }

private:
    struct RawEdge {
        NodeIndex source;
        NodeIndex target;
        RelationId relation;
    };

    SemanticTypeSet types_;
    std::deque<GraphNode> nodes_;  // deque: string_view keys below must stay valid
    std::unordered_map<std::string_view, NodeIndex> lookup_;
    std::deque<std::string> relation_names_;
    std::unordered_map<std::string_view, RelationId> relation_ids_;
    std::vector<RawEdge> edges_;
    std::vector<std::string> issues_;
    std::size_t issue_count_ = 0;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

/// Calls fn(line_number, line) for every non-empty, non-comment line.
template <typename Fn>
void for_each_data_line(std::string_view content, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        auto line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        fn(line_no, line);
    }
}

inline bool header_matches(std::string_view line, std::initializer_list<std::string_view> expected,
                           std::size_t min_columns) {
    auto cols = text::split(line, '\t');
    if (cols.size() < min_columns || cols.size() > expected.size()) return false;
    auto it = expected.begin();
    for (auto c : cols) {
        if (text::to_lower(text::trim(c)) != *it++) return false;
    }
    return true;
}

}  // namespace detail

/// Parses node/edge TSV content (see README for the format). Line numbers in
/// issues are 1-based and prefixed with the given source labels.
inline PropertyGraph parse_graph(std::string_view nodes_tsv, std::string_view edges_tsv,
                                 SemanticTypeSet types = SemanticTypeSet::defaults(),
                                 std::string_view nodes_label = "nodes",
                                 std::string_view edges_label = "edges") {
    GraphBuilder builder(std::move(types));
    auto where = [](std::string_view label, std::size_t line) {
        return std::string(label) + ":" + std::to_string(line);
    };

    bool header = true;
    detail::for_each_data_line(nodes_tsv, [&](std::size_t no, std::string_view line) {
        if (std::exchange(header, false)) {
            if (!detail::header_matches(line, {"id", "semantic_type", "name", "synonyms"}, 3))
                builder.issue(where(nodes_label, no), "expected header 'id<TAB>semantic_type<TAB>name<TAB>synonyms'");
            return;
        }
        auto cols = text::split(line, '\t');
        if (cols.size() < 3 || cols.size() > 4)
            return builder.issue(where(nodes_label, no), "malformed node line: expected 3 or 4 tab-separated columns, got " +
                                                             std::to_string(cols.size()));
        std::vector<std::string> synonyms;
        if (cols.size() == 4 && !cols[3].empty()) {
            for (auto s : text::split(cols[3], '|')) {
                auto t = text::trim(s);
                if (!t.empty()) synonyms.emplace_back(t);
            }
        }
        builder.add_node(std::string(text::trim(cols[0])), text::trim(cols[1]), std::string(text::trim(cols[2])),
                         std::move(synonyms), where(nodes_label, no));
    });
    if (header) builder.issue(nodes_label, "missing header line");

    header = true;
    detail::for_each_data_line(edges_tsv, [&](std::size_t no, std::string_view line) {
        if (std::exchange(header, false)) {
            if (!detail::header_matches(line, {"source", "relation", "target"}, 3))
                builder.issue(where(edges_label, no), "expected header 'source<TAB>relation<TAB>target'");
            return;
        }
        auto cols = text::split(line, '\t');
        if (cols.size() != 3)
            return builder.issue(where(edges_label, no), "malformed edge line: expected 3 tab-separated columns, got " +
                                                             std::to_string(cols.size()));
        builder.add_edge(text::trim(cols[0]), text::trim(cols[1]), text::trim(cols[2]), where(edges_label, no));
    });
    if (header) builder.issue(edges_label, "missing header line");

    return std::move(builder).build();
}

inline PropertyGraph load_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                                SemanticTypeSet types = SemanticTypeSet::defaults()) {
    auto nodes = detail::read_file(nodes_path);
    auto edges = detail::read_file(edges_path);
    return parse_graph(nodes, edges, std::move(types), nodes_path.filename().string(),
                       edges_path.filename().string());
}

inline void write_nodes_tsv(std::ostream& out, std::span<const NodeRecord> nodes) {
    out << "id\tsemantic_type\tname\tsynonyms\n";
    for (const auto& n : nodes) {
        out << n.id << '\t' << n.type << '\t' << n.name << '\t';
        for (std::size_t i = 0; i < n.synonyms.size(); ++i) out << (i ? "|" : "") << n.synonyms[i];
        out << '\n';
    }
}

inline void write_edges_tsv(std::ostream& out, std::span<const EdgeRecord> edges) {
    out << "source\trelation\ttarget\n";
    for (const auto& e : edges) out << e.source << '\t' << e.relation << '\t' << e.target << '\n';
}

inline PropertyGraph build_graph(std::span<const NodeRecord> nodes, std::span<const EdgeRecord> edges,
                                 SemanticTypeSet types = SemanticTypeSet::defaults()) {
    GraphBuilder b(std::move(types));
    for (const auto& n : nodes) b.add_node(n);
    for (const auto& e : edges) b.add_edge(e);
    return std::move(b).build();
}

struct StatsReport {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::map<std::string, std::size_t> nodes_per_type;
    std::map<std::string, std::size_t> edges_per_relation;
    double mean_degree = 0.0;      // 2E / N, each edge counted at both endpoints
    double edges_per_node = 0.0;   // E / N, the convention used for published KG summaries
};

inline StatsReport graph_stats(const PropertyGraph& g) {
    StatsReport r;
    r.node_count = g.node_count();
    r.edge_count = g.edge_count();
    for (const auto& t : g.types().names()) r.nodes_per_type[t] = 0;
    for (const auto& n : g.nodes()) ++r.nodes_per_type[g.types().name(n.type)];
    std::vector<std::size_t> rel_counts(g.relations().size(), 0);
    for (NodeIndex i = 0; i < g.node_count(); ++i)
        for (const auto& inc : g.incident(i))
            if (inc.direction == Direction::outgoing) ++rel_counts[inc.relation];
    for (std::size_t i = 0; i < rel_counts.size(); ++i) r.edges_per_relation[g.relations()[i]] = rel_counts[i];
    if (r.node_count > 0) {
        r.mean_degree = 2.0 * static_cast<double>(r.edge_count) / static_cast<double>(r.node_count);
        r.edges_per_node = static_cast<double>(r.edge_count) / static_cast<double>(r.node_count);
    }
    return r;
}

inline nlohmann::ordered_json to_json(const StatsReport& r) {
    nlohmann::ordered_json j;
    j["node_count"] = r.node_count;
    j["edge_count"] = r.edge_count;
    j["mean_degree"] = r.mean_degree;
    j["edges_per_node"] = r.edges_per_node;
    j["nodes_per_type"] = r.nodes_per_type;
    j["edges_per_relation"] = r.edges_per_relation;
    return j;
}

}  // namespace gather
