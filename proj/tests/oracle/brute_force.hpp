#pragma once
// Test-only reference implementations. These deliberately share no code with
// the engine: graphs are raw edge lists, distances come from exhaustive
// simple-path enumeration, and the weighting formulas are written out inline.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gather/graph_store.hpp"

namespace oracle {

struct RawGraph {
    std::vector<std::string> ids;
    std::vector<std::string> types;
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> edges;  // stored direction, endpoints distinct

    std::vector<gather::NodeRecord> node_records() const {
        std::vector<gather::NodeRecord> out;
        for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], types[i], names[i], {}});
        return out;
    }

    std::vector<gather::EdgeRecord> edge_records() const {
        std::vector<gather::EdgeRecord> out;
        for (auto [a, b] : edges) out.push_back({ids[a], "REL_" + std::to_string((a + b) % 3), ids[b]});
        return out;
    }

    int index_of(const std::string& id) const {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return static_cast<int>(i);
        return -1;
    }
};

/// Random typed graph with the given node/edge counts over a small type set.
/// Ids are zero-padded but emitted in shuffled order to exercise id sorting.
inline RawGraph random_graph(std::mt19937_64& rng, int n_nodes, int n_edges,
                             const std::vector<std::string>& types) {
    RawGraph g;
    std::vector<int> labels(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) labels[static_cast<std::size_t>(i)] = i;
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < n_nodes; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "N%04d", labels[static_cast<std::size_t>(i)]);
        g.ids.push_back(buf);
        g.names.push_back(std::string("node ") + buf);
        g.types.push_back(types[std::uniform_int_distribution<std::size_t>(0, types.size() - 1)(rng)]);
    }
    std::uniform_int_distribution<int> pick(0, n_nodes - 1);
    while (static_cast<int>(g.edges.size()) < n_edges) {
        int a = pick(rng), b = pick(rng);
        if (a != b) g.edges.emplace_back(a, b);
    }
    return g;
}

inline std::vector<std::vector<int>> undirected_adjacency(const RawGraph& g, bool alternate) {
    std::vector<std::vector<int>> adj(g.ids.size());
    for (auto [a, b] : g.edges) {
        if (alternate && g.types[a] == g.types[b]) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

/// Minimal length of any simple path from source to every node, found by
/// enumerating all simple paths of length <= k.
inline std::map<int, int> min_hops_by_enumeration(const RawGraph& g, int source, int k, bool alternate = true) {
    auto adj = undirected_adjacency(g, alternate);
    std::map<int, int> best;
    std::vector<bool> on_path(g.ids.size(), false);
    std::vector<int> path{source};
    on_path[source] = true;
    auto dfs = [&](auto&& self, int u, int depth) -> void {
        if (depth == k) return;
        for (int v : adj[u]) {
            if (on_path[v]) continue;
            auto it = best.find(v);
            if (it == best.end() || it->second > depth + 1) best[v] = depth + 1;
            on_path[v] = true;
            path.push_back(v);
            self(self, v, depth + 1);
            path.pop_back();
            on_path[v] = false;
        }
    };
    dfs(dfs, source, 0);
    best.erase(source);
    return best;
}

struct GeneInput {
    int node;  // raw index
    int rank;
};

struct BruteResult {
    std::map<std::string, double> scores;                      // target id -> Score(t)
    std::map<std::string, std::map<int, std::set<int>>> bins;  // target id -> hop -> ranks
    std::map<int, int> df;                                     // rank -> df
};

inline BruteResult brute_force_scores(const RawGraph& g, const std::vector<GeneInput>& genes, int k,
                                      const std::string& target_type, const std::vector<double>& alpha,
                                      bool alternate = true) {
    BruteResult r;
    std::map<int, std::map<int, int>> reach;  // rank -> target raw index -> min hop
    for (const auto& gene : genes) {
        auto& m = reach[gene.rank];
        for (auto [node, hop] : min_hops_by_enumeration(g, gene.node, k, alternate))
            if (g.types[node] == target_type && node != gene.node) m[node] = hop;
    }
    std::set<int> targets;
    for (const auto& [rank, m] : reach)
        for (const auto& [t, hop] : m) targets.insert(t);
    const double t_size = static_cast<double>(targets.size());
    for (const auto& [rank, m] : reach) r.df[rank] = static_cast<int>(m.size());
    for (const auto& [rank, m] : reach) {
        if (m.empty()) continue;
        const double w_rank = 1.0 / (std::log(rank + 2.0) / std::log(2.0));
        const double w_idf = std::log(t_size / static_cast<double>(m.size()) + 1.0);
        for (const auto& [t, hop] : m) {
            r.scores[g.ids[t]] += alpha[static_cast<std::size_t>(hop - 1)] * w_rank * w_idf;
            r.bins[g.ids[t]][hop].insert(rank);
        }
    }
    return r;
}

/// Transitive closure by naive repeated expansion until nothing changes.
inline std::vector<std::set<int>> brute_closure(const std::vector<std::vector<int>>& parents) {
    std::vector<std::set<int>> anc(parents.size());
    for (std::size_t i = 0; i < parents.size(); ++i) anc[i].insert(parents[i].begin(), parents[i].end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < parents.size(); ++i) {
            auto before = anc[i].size();
            std::set<int> add;
            for (int a : anc[i]) add.insert(anc[a].begin(), anc[a].end());
            anc[i].insert(add.begin(), add.end());
            changed |= anc[i].size() != before;
        }
    }
    return anc;
}

}  // namespace oracle
