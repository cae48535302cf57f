#pragma once
// Stage 1: multi-source k-hop traversal.
//
// Every grounded gene runs its own bounded BFS over the relation-agnostic
// (both directions, all relations) graph. With type alternation enabled an
// edge is only traversable when its endpoints have different semantic types,
// which is exactly the "no two consecutive nodes of the same type" rule, so
// plain BFS distances are the constrained shortest distances.
//
// A gene lands in exactly one hop bin per target: its minimal distance.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "gather/error.hpp"
#include "gather/graph_store.hpp"
#include "gather/grounding.hpp"

namespace gather {

struct TraversalConfig {
    int k = 2;
    std::string target_type = "CellType";
    bool enforce_type_alternation = true;

    void validate() const {
        if (k < 1) throw ConfigError("traversal horizon k must be >= 1, got " + std::to_string(k));
    }
};

struct TargetSupport {
    NodeIndex target = 0;
    std::string target_id;
    std::vector<std::vector<int>> bins;  // bins[h - 1]: ranks of genes whose min distance is h, ascending

    std::size_t supporter_count() const {
        std::size_t n = 0;
        for (const auto& b : bins) n += b.size();
        return n;
    }
};

struct SupportTable {
    int k = 0;
    std::vector<TargetSupport> targets;  // candidate set, ascending by node id
    std::vector<int> gene_ranks;         // one entry per grounded gene, ascending
    std::vector<std::size_t> df;         // aligned with gene_ranks

    std::size_t source_count() const noexcept { return gene_ranks.size(); }
    std::size_t candidate_count() const noexcept { return targets.size(); }

    const TargetSupport* find(std::string_view target_id) const {
        auto it = std::lower_bound(targets.begin(), targets.end(), target_id,
                                   [](const TargetSupport& t, std::string_view id) { return t.target_id < id; });
        return it != targets.end() && it->target_id == target_id ? &*it : nullptr;
    }

    /// Position of a gene rank in gene_ranks/df.
    std::size_t gene_slot(int rank) const {
        auto it = std::lower_bound(gene_ranks.begin(), gene_ranks.end(), rank);
        if (it == gene_ranks.end() || *it != rank)
            throw std::out_of_range("no grounded gene with rank " + std::to_string(rank));
        return static_cast<std::size_t>(it - gene_ranks.begin());
    }
};

/// df(g): number of distinct candidate targets the gene reaches within k.
inline std::size_t reachable_target_count(const SupportTable& table, int gene_rank) {
    return table.df[table.gene_slot(gene_rank)];
}

/// Reusable per-thread BFS scratch space.
class BfsWorkspace {
public:
    explicit BfsWorkspace(std::size_t node_count) : stamp_(node_count, 0) {}

    bool visit(NodeIndex n) {
        if (stamp_[n] == epoch_) return false;
        stamp_[n] = epoch_;
        return true;
    }

    void reset() {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
        frontier_.clear();
        next_.clear();
    }

    std::vector<NodeIndex> frontier_, next_;

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

inline bool traversable(const PropertyGraph& g, NodeIndex from, NodeIndex to, bool alternate) noexcept {
    return !alternate || g.type_of(from) != g.type_of(to);
}

/// Bounded BFS from one source. visit(node, parent, depth) fires once per
/// newly discovered node, depth >= 1, in BFS order.
template <typename Visit>
void expand_from(const PropertyGraph& g, NodeIndex source, int max_depth, bool alternate, BfsWorkspace& ws,
                 Visit&& visit) {
    ws.reset();
    ws.visit(source);
    ws.frontier_.push_back(source);
    for (int depth = 1; depth <= max_depth && !ws.frontier_.empty(); ++depth) {
        ws.next_.clear();
        for (auto u : ws.frontier_) {
            for (const auto& inc : g.incident(u)) {
                auto v = inc.neighbor;
                if (!traversable(g, u, v, alternate) || !ws.visit(v)) continue;
                visit(v, u, depth);
                ws.next_.push_back(v);
            }
        }
        std::swap(ws.frontier_, ws.next_);
    }
}

struct TraversalStep {
    NodeIndex node;
    NodeIndex parent;
    int depth;
};

/// The BFS tree discovered from one gene, for inspection and tests.
inline std::vector<TraversalStep> trace_expansion(const PropertyGraph& g, NodeIndex source,
                                                  const TraversalConfig& config) {
    config.validate();
    BfsWorkspace ws(g.node_count());
    std::vector<TraversalStep> out;
    expand_from(g, source, config.k, config.enforce_type_alternation, ws,
                [&](NodeIndex v, NodeIndex u, int d) { out.push_back({v, u, d}); });
    return out;
}

namespace detail {

struct TargetHit {
    NodeIndex target;
    int hop;
};

inline std::vector<TargetHit> gene_hits(const PropertyGraph& g, NodeIndex source, TypeId target_type,
                                        const TraversalConfig& config, BfsWorkspace& ws) {
    std::vector<TargetHit> hits;
    expand_from(g, source, config.k, config.enforce_type_alternation, ws, [&](NodeIndex v, NodeIndex, int d) {
        if (g.type_of(v) == target_type) hits.push_back({v, d});
    });
    return hits;
}

}  // namespace detail

/// Builds the hop-binned support table for one grounded gene set. `jobs` > 1
/// spreads per-gene expansions over threads; the merge runs in gene order so
/// the result does not depend on it.
inline SupportTable multi_source_traverse(const PropertyGraph& g, const GroundedGeneSet& grounded,
                                          const TraversalConfig& config, unsigned jobs = 1) {
    config.validate();
    const TypeId target_type = g.types().id(config.target_type);
    const auto n = grounded.size();

    std::vector<std::vector<detail::TargetHit>> hits(n);
    auto work = [&](std::size_t begin, std::size_t step) {
        BfsWorkspace ws(g.node_count());
        for (std::size_t i = begin; i < n; i += step) {
            auto source = grounded.genes[i].node;
            if (g.type_of(source) == target_type) continue;  // never its own target
            hits[i] = detail::gene_hits(g, source, target_type, config, ws);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    }

    SupportTable table;
    table.k = config.k;
    std::map<NodeIndex, std::vector<std::vector<int>>> bins;
    for (std::size_t i = 0; i < n; ++i) {
        const int rank = grounded.genes[i].rank;
        table.gene_ranks.push_back(rank);
        table.df.push_back(hits[i].size());
        for (const auto& h : hits[i]) {
            auto& b = bins[h.target];
            if (b.empty()) b.resize(static_cast<std::size_t>(config.k));
            b[static_cast<std::size_t>(h.hop - 1)].push_back(rank);
        }
    }
    table.targets.reserve(bins.size());
    for (auto& [t, b] : bins) table.targets.push_back({t, g.node(t).id, std::move(b)});
    return table;
}

/// A path rendered for prompting, e.g. "G -PARTICIPATES_IN-> P <-CAPABLE_OF- C".
struct GraphPath {
    std::vector<NodeIndex> nodes;
    std::vector<Incidence> steps;  // steps[i] leads from nodes[i] to nodes[i + 1]

    std::string render(const PropertyGraph& g) const {
        if (nodes.empty()) return {};
        std::string out = g.node(nodes.front()).name;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& rel = g.relation_name(steps[i].relation);
            if (steps[i].direction == Direction::outgoing)
                out += " -" + rel + "-> ";
            else
                out += " <-" + rel + "- ";
            out += g.node(nodes[i + 1]).name;
        }
        return out;
    }
};

namespace detail {

inline std::unordered_map<NodeIndex, int> bounded_distances(const PropertyGraph& g, NodeIndex source, int max_depth,
                                                            bool alternate) {
    std::unordered_map<NodeIndex, int> dist{{source, 0}};
    std::vector<NodeIndex> frontier{source}, next;
    for (int d = 1; d <= max_depth && !frontier.empty(); ++d) {
        next.clear();
        for (auto u : frontier)
            for (const auto& inc : g.incident(u))
                if (traversable(g, u, inc.neighbor, alternate) && dist.emplace(inc.neighbor, d).second)
                    next.push_back(inc.neighbor);
        std::swap(frontier, next);
    }
    return dist;
}

}  // namespace detail

/// Among all minimal-length traversable paths from source to target within
/// max_len, the one whose node-id sequence is lexicographically smallest.
/// Between parallel edges the smallest relation name is used.
inline std::optional<GraphPath> representative_path(const PropertyGraph& g, NodeIndex source, NodeIndex target,
                                                    int max_len, bool alternate = true) {
    auto from_source = detail::bounded_distances(g, source, max_len, alternate);
    auto it = from_source.find(target);
    if (it == from_source.end()) return std::nullopt;
    const int length = it->second;
    auto to_target = detail::bounded_distances(g, target, length, alternate);

    GraphPath path;
    path.nodes.push_back(source);
    NodeIndex cur = source;
    for (int i = 1; i <= length; ++i) {
        // Incidences are sorted by neighbor index, i.e. by neighbor id.
        const Incidence* chosen = nullptr;
        for (const auto& inc : g.incident(cur)) {
            if (!traversable(g, cur, inc.neighbor, alternate)) continue;
            auto d = to_target.find(inc.neighbor);
            if (d != to_target.end() && d->second == length - i) {
                chosen = &inc;
                break;
            }
        }
        if (!chosen) return std::nullopt;  // unreachable for consistent distance maps
        path.steps.push_back(*chosen);
        path.nodes.push_back(chosen->neighbor);
        cur = chosen->neighbor;
    }
    return path;
}

}  // namespace gather
