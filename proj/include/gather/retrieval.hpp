#pragma once
// Ground -> traverse -> score -> top-K for one cell sentence. No LLM involved.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/graph_store.hpp"
#include "gather/grounding.hpp"
#include "gather/scoring.hpp"
#include "gather/traversal.hpp"

namespace gather {

struct RetrievalConfig {
    FilterConfig filter;
    TraversalConfig traversal;
    ScoringConfig scoring;

    void validate() const {
        filter.validate();
        traversal.validate();
        scoring.validate();
        (void)scoring.hop_weights(traversal.k);
    }
};

struct RetrievalResult {
    GroundedGeneSet grounded;
    SupportTable table;
    std::vector<ScoredCandidate> ranked;  // every candidate
    std::vector<ScoredCandidate> top;     // first min(K, |T|)
};

inline RetrievalResult retrieve(const CellSentence& sentence, const GeneLexicon& lexicon,
                                const RetrievalConfig& config, unsigned jobs = 1) {
    RetrievalResult r;
    r.grounded = ground(sentence, lexicon, config.filter);
    r.table = multi_source_traverse(lexicon.graph(), r.grounded, config.traversal, jobs);
    r.ranked = score_candidates(r.table, r.grounded, config.scoring);
    r.top = select_top_k(r.ranked, config.scoring.top_k);
    return r;
}

/// target -> {hop -> [gene symbols]}
inline nlohmann::ordered_json support_table_json(const SupportTable& table, const GroundedGeneSet& grounded) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& t : table.targets) {
        nlohmann::ordered_json hops = nlohmann::ordered_json::object();
        for (std::size_t h = 0; h < t.bins.size(); ++h) {
            if (t.bins[h].empty()) continue;
            auto& list = hops[std::to_string(h + 1)] = nlohmann::ordered_json::array();
            for (int rank : t.bins[h]) list.push_back(grounded.find_rank(rank)->symbol);
        }
        j[t.target_id] = std::move(hops);
    }
    return j;
}

inline nlohmann::ordered_json candidates_json(const std::vector<ScoredCandidate>& candidates,
                                              const PropertyGraph& graph) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : candidates) {
        nlohmann::ordered_json e;
        e["target"] = c.target_id;
        e["name"] = graph.node(c.target).name;
        e["score"] = c.score;
        auto& sup = e["supporters"] = nlohmann::ordered_json::object();
        for (std::size_t h = 0; h < c.supporters.size(); ++h) {
            if (c.supporters[h].empty()) continue;
            auto& list = sup[std::to_string(h + 1)] = nlohmann::ordered_json::array();
            for (const auto& s : c.supporters[h])
                list.push_back({{"symbol", s.symbol}, {"rank", s.rank}, {"weight", s.weight}});
        }
        arr.push_back(std::move(e));
    }
    return arr;
}

inline nlohmann::ordered_json retrieval_json(const CellSentence& sentence, const RetrievalResult& r,
                                             const PropertyGraph& graph) {
    nlohmann::ordered_json j;
    j["cell_id"] = sentence.cell_id;
    auto& grounded = j["grounded"] = nlohmann::ordered_json::array();
    for (const auto& g : r.grounded.genes) grounded.push_back({{"symbol", g.symbol}, {"node", g.node_id}, {"rank", g.rank}});
    auto& dropped = j["dropped"] = nlohmann::ordered_json::array();
    for (const auto& d : r.grounded.dropped)
        dropped.push_back({{"symbol", d.symbol}, {"rank", d.rank}, {"reason", std::string(to_string(d.reason))}});
    j["candidate_count"] = r.table.candidate_count();
    auto& df = j["df"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.table.source_count(); ++i)
        df[r.grounded.genes[i].symbol] = r.table.df[i];
    j["support"] = support_table_json(r.table, r.grounded);
    j["candidates"] = candidates_json(r.top, graph);
    auto warnings = nlohmann::ordered_json::array();
    for (const auto& w : r.grounded.warnings) warnings.push_back(w);
    if (r.grounded.empty()) warnings.push_back("no groundable genes");
    else if (r.top.empty()) warnings.push_back("no candidate targets within horizon");
    j["warnings"] = std::move(warnings);
    return j;
}

}  // namespace gather
