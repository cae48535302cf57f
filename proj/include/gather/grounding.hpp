#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/error.hpp"
#include "gather/graph_store.hpp"
#include "gather/log.hpp"
#include "gather/text.hpp"

namespace gather {

/// One cell's ranked gene list; position 0 is the most discriminative gene.
struct CellSentence {
    std::string cell_id;
    std::vector<std::string> gene_symbols;
    std::optional<std::string> gold_label;
};

struct GroundedGene {
    std::string symbol;
    NodeIndex node = 0;
    std::string node_id;
    int rank = 0;  // zero-based position in the original sentence, before filtering
};

enum class DropReason { housekeeping, unmatched, duplicate_node };

inline std::string_view to_string(DropReason r) {
    switch (r) {
        case DropReason::housekeeping: return "housekeeping";
        case DropReason::unmatched: return "unmatched";
        case DropReason::duplicate_node: return "duplicate_node";
    }
    return "unknown";
}

struct DroppedSymbol {
    std::string symbol;
    int rank = 0;
    DropReason reason = DropReason::unmatched;
};

struct GroundedGeneSet {
    std::vector<GroundedGene> genes;  // sentence order, so ranks strictly increase
    std::vector<DroppedSymbol> dropped;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return genes.size(); }
    bool empty() const noexcept { return genes.empty(); }

    const GroundedGene* find_rank(int rank) const {
        auto it = std::lower_bound(genes.begin(), genes.end(), rank,
                                   [](const GroundedGene& g, int r) { return g.rank < r; });
        return it != genes.end() && it->rank == rank ? &*it : nullptr;
    }
};

struct FilterConfig {
    std::vector<std::string> housekeeping_prefixes{"RPL", "MT-"};
    bool case_sensitive = false;

    void validate() const {
        for (const auto& p : housekeeping_prefixes)
            if (p.empty()) throw ConfigError("housekeeping prefixes must be non-empty");
    }

    bool is_housekeeping(std::string_view symbol) const {
        for (const auto& p : housekeeping_prefixes) {
            if (case_sensitive ? symbol.starts_with(p) : text::starts_with_ci(symbol, p)) return true;
        }
        return false;
    }
};

/// Case-insensitive index of Gene nodes by name, id and synonyms. Build once
/// per graph and reuse across sentences.
class GeneLexicon {
public:
    explicit GeneLexicon(const PropertyGraph& graph, std::string_view gene_type = "Gene") : graph_(&graph) {
        auto type = graph.types().find(gene_type);
        if (!type) throw ConfigError("gene type '" + std::string(gene_type) + "' is not a configured semantic type");
        for (NodeIndex i = 0; i < graph.node_count(); ++i) {
            const auto& n = graph.node(i);
            if (n.type != *type) continue;
            by_name_[text::to_lower(n.name)].push_back(i);
            by_id_[text::to_lower(n.id)].push_back(i);
            for (const auto& s : n.synonyms) {
                auto& v = by_synonym_[text::to_lower(s)];
                if (v.empty() || v.back() != i) v.push_back(i);
            }
        }
    }

    const PropertyGraph& graph() const noexcept { return *graph_; }

    struct Match {
        NodeIndex node;
        std::size_t candidates;  // > 1 means the tier was ambiguous
    };

    /// Canonical names first, then node ids, then synonyms.
    std::optional<Match> resolve(std::string_view symbol) const {
        auto key = text::to_lower(text::trim(symbol));
        for (const auto* tier : {&by_name_, &by_id_, &by_synonym_}) {
            auto it = tier->find(key);
            if (it != tier->end()) {
                // Node indices follow id order, so the front is the smallest id.
                return Match{it->second.front(), it->second.size()};
            }
        }
        return std::nullopt;
    }

private:
    const PropertyGraph* graph_;
    std::unordered_map<std::string, std::vector<NodeIndex>> by_name_, by_id_, by_synonym_;
};

inline GroundedGeneSet ground(const CellSentence& sentence, const GeneLexicon& lexicon,
                              const FilterConfig& filter = {}) {
    GroundedGeneSet out;
    std::unordered_set<NodeIndex> seen;
    for (std::size_t pos = 0; pos < sentence.gene_symbols.size(); ++pos) {
        const auto& symbol = sentence.gene_symbols[pos];
        const int rank = static_cast<int>(pos);
        if (filter.is_housekeeping(symbol)) {
            out.dropped.push_back({symbol, rank, DropReason::housekeeping});
            continue;
        }
        auto match = lexicon.resolve(symbol);
        if (!match) {
            out.dropped.push_back({symbol, rank, DropReason::unmatched});
            log::debug("cell " + sentence.cell_id + ": symbol '" + symbol + "' has no matching Gene node");
            continue;
        }
        const auto& node = lexicon.graph().node(match->node);
        if (match->candidates > 1) {
            auto w = "symbol '" + symbol + "' matches " + std::to_string(match->candidates) +
                     " Gene nodes; using '" + node.id + "'";
            log::warn("cell " + sentence.cell_id + ": " + w);
            out.warnings.push_back(std::move(w));
        }
        if (!seen.insert(match->node).second) {
            out.dropped.push_back({symbol, rank, DropReason::duplicate_node});
            continue;
        }
        out.genes.push_back({symbol, match->node, node.id, rank});
    }
    return out;
}

inline GroundedGeneSet ground(const CellSentence& sentence, const PropertyGraph& graph,
                              const FilterConfig& filter = {}) {
    return ground(sentence, GeneLexicon(graph), filter);
}

inline CellSentence parse_cell_sentence(std::string_view json_line, std::string_view where = {}) {
    auto fail = [&](const std::string& what) -> DataError {
        return DataError(where.empty() ? what : std::string(where) + ": " + what);
    };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw fail(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw fail("expected a JSON object");
    if (!j.contains("cell_id") || !j["cell_id"].is_string()) throw fail("missing string field 'cell_id'");
    if (!j.contains("genes") || !j["genes"].is_array()) throw fail("missing array field 'genes'");

    CellSentence s;
    s.cell_id = j["cell_id"].get<std::string>();
    if (s.cell_id.empty()) throw fail("empty cell_id");
    std::unordered_set<std::string> seen;
    for (const auto& g : j["genes"]) {
        if (!g.is_string()) throw fail("gene symbols must be strings");
        auto sym = g.get<std::string>();
        if (sym.empty()) throw fail("empty gene symbol");
        if (!seen.insert(sym).second) throw fail("duplicate gene symbol '" + sym + "' in cell '" + s.cell_id + "'");
        s.gene_symbols.push_back(std::move(sym));
    }
    if (s.gene_symbols.empty()) throw fail("empty gene list for cell '" + s.cell_id + "'");
    if (j.contains("label") && !j["label"].is_null()) {
        if (!j["label"].is_string()) throw fail("label must be a string or null");
        s.gold_label = j["label"].get<std::string>();
    }
    return s;
}

inline std::vector<CellSentence> parse_cell_sentences_text(std::string_view content, std::string_view label = "dataset") {
    std::vector<CellSentence> out;
    std::unordered_set<std::string> ids;
    detail::for_each_data_line(content, [&](std::size_t no, std::string_view line) {
        if (text::trim(line).empty()) return;
        auto where = std::string(label) + ":" + std::to_string(no);
        auto s = parse_cell_sentence(line, where);
        if (!ids.insert(s.cell_id).second) throw DataError(where + ": duplicate cell_id '" + s.cell_id + "'");
        out.push_back(std::move(s));
    });
    return out;
}

inline std::vector<CellSentence> parse_cell_sentences(const std::filesystem::path& path) {
    return parse_cell_sentences_text(detail::read_file(path), path.filename().string());
}

inline std::string to_jsonl_line(const CellSentence& s) {
    nlohmann::ordered_json j;
    j["cell_id"] = s.cell_id;
    j["genes"] = s.gene_symbols;
    j["label"] = s.gold_label ? nlohmann::ordered_json(*s.gold_label) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

}  // namespace gather
