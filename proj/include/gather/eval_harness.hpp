#pragma once
// Exact / ancestor-match accuracy plus call and evidence accounting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/annotate.hpp"
#include "gather/error.hpp"
#include "gather/grounding.hpp"
#include "gather/obo_ontology.hpp"

namespace gather {

inline void require_term(const OntologyDag& dag, const std::string& gold) {
    if (!dag.contains(gold)) throw DataError("gold label '" + gold + "' is not an ontology term");
}

inline bool exact_match(const std::optional<std::string>& pred, const std::string& gold, const OntologyDag& dag) {
    require_term(dag, gold);
    return pred && *pred == gold;
}

/// Prediction equals the gold term or lies above or below it in the is_a DAG.
inline bool ancestor_match(const std::optional<std::string>& pred, const std::string& gold, const OntologyDag& dag) {
    require_term(dag, gold);
    return pred && dag.contains(*pred) && dag.on_same_path(*pred, gold);
}

struct MetricsReport {
    std::size_t n_samples = 0;
    double exact_pct = 0.0;
    double ancestor_pct = 0.0;
    double avg_calls = 0.0;
    double avg_evidence = 0.0;
    std::size_t unresolved_predictions = 0;
    std::map<std::string, std::map<std::string, std::size_t>> confusion;  // gold -> predicted -> count
};

inline constexpr const char* kUnresolvedLabel = "<unresolved>";

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

/// Results are matched to the dataset by cell_id; order does not matter.
/// Unresolved predictions count as misses in both accuracy metrics.
inline MetricsReport evaluate(const std::vector<AnnotationResult>& results, const std::vector<CellSentence>& dataset,
                              const OntologyDag& dag) {
    std::unordered_map<std::string, const CellSentence*> by_id;
    for (const auto& s : dataset) by_id.emplace(s.cell_id, &s);
    if (results.size() != dataset.size())
        throw DataError("results cover " + std::to_string(results.size()) + " samples but the dataset has " +
                        std::to_string(dataset.size()));

    MetricsReport m;
    m.n_samples = results.size();
    std::size_t exact = 0, anc = 0;
    double calls = 0, evidence = 0;
    std::unordered_map<std::string, int> seen;
    for (const auto& r : results) {
        auto it = by_id.find(r.cell_id);
        if (it == by_id.end()) throw DataError("result for unknown cell_id '" + r.cell_id + "'");
        if (seen[r.cell_id]++) throw DataError("duplicate result for cell_id '" + r.cell_id + "'");
        const auto& sentence = *it->second;
        if (!sentence.gold_label) throw DataError("cell '" + r.cell_id + "' has no gold label");
        auto gold = dag.resolve_label(*sentence.gold_label);
        if (!gold) throw DataError("gold label '" + *sentence.gold_label + "' of cell '" + r.cell_id +
                                   "' does not resolve in the ontology");

        std::optional<std::string> pred;
        if (r.predicted_term && dag.contains(*r.predicted_term)) pred = r.predicted_term;
        if (!pred) ++m.unresolved_predictions;
        if (exact_match(pred, *gold, dag)) ++exact;
        if (ancestor_match(pred, *gold, dag)) ++anc;
        calls += r.llm_calls;
        evidence += static_cast<double>(r.evidence_count);
        ++m.confusion[*gold][pred ? *pred : kUnresolvedLabel];
    }
    if (m.n_samples > 0) {
        const auto n = static_cast<double>(m.n_samples);
        m.exact_pct = round2(100.0 * static_cast<double>(exact) / n);
        m.ancestor_pct = round2(100.0 * static_cast<double>(anc) / n);
        m.avg_calls = calls / n;
        m.avg_evidence = evidence / n;
    }
    return m;
}

inline nlohmann::ordered_json to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["n_samples"] = m.n_samples;
    j["exact_pct"] = m.exact_pct;
    j["ancestor_pct"] = m.ancestor_pct;
    j["avg_calls"] = m.avg_calls;
    j["avg_evidence"] = m.avg_evidence;
    j["unresolved_predictions"] = m.unresolved_predictions;
    j["confusion"] = m.confusion;
    return j;
}

/// Fixed-width table with Exact / Anc. / Calls / Evid. columns.
inline std::string to_table(const MetricsReport& m, const std::string& method = "GATHER") {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-12s %8s %8s %7s %7s %8s\n", "Method", "Exact", "Anc.", "Calls", "Evid.", "N");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-12s %8.2f %8.2f %7.1f %7.1f %8zu\n", method.c_str(), m.exact_pct,
                  m.ancestor_pct, m.avg_calls, m.avg_evidence, m.n_samples);
    out += buf;
    return out;
}

}  // namespace gather
