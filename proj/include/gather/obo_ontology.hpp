#pragma once
// Minimal OBO reader for cell-type hierarchies.
//
// Only [Term] stanzas are interpreted, and within them only the id, name,
// is_a and synonym tags. Everything else (other stanza types, relationship
// tags, xrefs, header) is skipped. The DAG is the is_a hierarchy alone.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gather/error.hpp"
#include "gather/graph_store.hpp"
#include "gather/log.hpp"
#include "gather/text.hpp"

namespace gather {

struct OntologyTerm {
    std::string id;
    std::string name;
    std::vector<std::string> parents;  // is_a targets, sorted, unique
    std::vector<std::string> synonyms;
};

class OntologyDag {
public:
    using TermIndex = std::uint32_t;

    OntologyDag() = default;

    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<OntologyTerm>& terms() const noexcept { return terms_; }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

    const OntologyTerm& term(std::string_view id) const { return terms_[index_of(id)]; }

    /// All transitive is_a ancestors of a term; never includes the term itself.
    std::set<std::string> ancestors(std::string_view id) const {
        std::set<std::string> out;
        for (auto a : closure_[index_of(id)]) out.insert(terms_[a].id);
        return out;
    }

    std::set<std::string> descendants(std::string_view id) const {
        auto target = index_of(id);
        std::set<std::string> out;
        for (TermIndex t = 0; t < terms_.size(); ++t)
            if (is_ancestor(target, t)) out.insert(terms_[t].id);
        return out;
    }

    bool is_ancestor_of(std::string_view ancestor, std::string_view term) const {
        return is_ancestor(index_of(ancestor), index_of(term));
    }

    /// True iff a == b or one is an ancestor of the other.
    bool on_same_path(std::string_view a, std::string_view b) const {
        auto ia = index_of(a), ib = index_of(b);
        return ia == ib || is_ancestor(ia, ib) || is_ancestor(ib, ia);
    }

    /// Maps free text to a term id. Matching is on normalized text against
    /// ids first, then names, then synonyms. Collisions within one tier
    /// resolve to the smallest term id.
    std::optional<std::string> resolve_label(std::string_view raw) const {
        auto key = text::normalize_label(raw);
        if (key.empty()) return std::nullopt;
        for (const auto* tier : {&by_id_, &by_name_, &by_synonym_}) {
            auto it = tier->find(key);
            if (it != tier->end()) return terms_[it->second].id;
        }
        return std::nullopt;
    }

    static OntologyDag from_terms(std::vector<OntologyTerm> terms);

private:
    TermIndex index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw std::out_of_range("unknown ontology term '" + std::string(id) + "'");
        return it->second;
    }

    bool is_ancestor(TermIndex ancestor, TermIndex term) const {
        const auto& c = closure_[term];
        return std::binary_search(c.begin(), c.end(), ancestor);
    }

    std::vector<OntologyTerm> terms_;  // sorted by id
    std::unordered_map<std::string, TermIndex> index_;
    std::vector<std::vector<TermIndex>> closure_;  // sorted ancestor indices
    std::unordered_map<std::string, TermIndex> by_id_, by_name_, by_synonym_;
};

/// Validates and indexes a term list: unique ids, known is_a targets, no cycles.
inline OntologyDag OntologyDag::from_terms(std::vector<OntologyTerm> terms) {
    OntologyDag dag;
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::vector<std::string> issues;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!dag.index_.emplace(terms[i].id, static_cast<TermIndex>(i)).second)
            issues.push_back("duplicate term id '" + terms[i].id + "'");
    }
    std::vector<std::vector<TermIndex>> parents(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        auto& p = terms[i].parents;
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        for (const auto& pid : p) {
            auto it = dag.index_.find(pid);
            if (it == dag.index_.end())
                issues.push_back("term '" + terms[i].id + "' is_a unknown term '" + pid + "'");
            else
                parents[i].push_back(it->second);
        }
    }
    if (!issues.empty()) throw DataError("ontology validation failed", std::move(issues));

    // Kahn's algorithm from roots downward; leftovers sit on a cycle.
    const auto n = terms.size();
    std::vector<std::vector<TermIndex>> children(n);
    std::vector<std::size_t> pending(n);
    for (TermIndex i = 0; i < n; ++i) {
        pending[i] = parents[i].size();
        for (auto p : parents[i]) children[p].push_back(i);
    }
    std::vector<TermIndex> order;
    order.reserve(n);
    for (TermIndex i = 0; i < n; ++i)
        if (pending[i] == 0) order.push_back(i);
    for (std::size_t head = 0; head < order.size(); ++head)
        for (auto c : children[order[head]])
            if (--pending[c] == 0) order.push_back(c);
    if (order.size() != n) {
        std::vector<std::string> cyclic;
        for (TermIndex i = 0; i < n; ++i)
            if (pending[i] > 0) cyclic.push_back("term '" + terms[i].id + "' participates in an is_a cycle");
        throw DataError("ontology validation failed", std::move(cyclic));
    }

    dag.closure_.assign(n, {});
    for (auto t : order) {
        auto& c = dag.closure_[t];
        for (auto p : parents[t]) {
            c.push_back(p);
            c.insert(c.end(), dag.closure_[p].begin(), dag.closure_[p].end());
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }

    auto add_key = [&](std::unordered_map<std::string, TermIndex>& tier, const std::string& raw, TermIndex t,
                       const char* what) {
        auto key = text::normalize_label(raw);
        if (key.empty()) return;
        auto [it, inserted] = tier.emplace(key, t);
        if (!inserted && it->second != t) {
            // Terms are visited in id order, so the first holder is the smallest id.
            log::write(std::string_view(what) == "synonym" ? log::Level::info : log::Level::warn,
                       "ontology " + std::string(what) + " '" + key + "' is shared by '" + terms[it->second].id +
                           "' and '" + terms[t].id + "'; resolving to '" + terms[it->second].id + "'");
        }
    };
    for (TermIndex t = 0; t < n; ++t) add_key(dag.by_id_, terms[t].id, t, "id");
    for (TermIndex t = 0; t < n; ++t) add_key(dag.by_name_, terms[t].name, t, "name");
    for (TermIndex t = 0; t < n; ++t)
        for (const auto& s : terms[t].synonyms) add_key(dag.by_synonym_, s, t, "synonym");

    dag.terms_ = std::move(terms);
    return dag;
}

namespace detail {

// Drops an OBO trailing "! comment" and "{qualifiers}" block.
inline std::string_view strip_obo_trailer(std::string_view v) {
    auto bang = v.find(" !");
    if (bang != std::string_view::npos) v = v.substr(0, bang);
    auto brace = v.find('{');
    if (brace != std::string_view::npos) v = v.substr(0, brace);
    return text::trim(v);
}

inline std::optional<std::string> parse_quoted(std::string_view v) {
    v = text::trim(v);
    if (v.empty() || v.front() != '"') return std::nullopt;
    std::string out;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] == '\\' && i + 1 < v.size()) {
            out.push_back(v[++i]);
        } else if (v[i] == '"') {
            return out;
        } else {
            out.push_back(v[i]);
        }
    }
    return std::nullopt;
}

}  // namespace detail

inline OntologyDag parse_obo_text(std::string_view content, std::string_view label = "obo") {
    std::vector<OntologyTerm> terms;
    std::vector<std::string> issues;
    auto where = [&](std::size_t line) { return std::string(label) + ":" + std::to_string(line); };

    struct Pending {
        OntologyTerm term;
        std::size_t line = 0;
        int id_count = 0;
        bool has_name = false;
    };
    std::optional<Pending> current;
    bool in_term = false;

    auto flush = [&] {
        if (!current) return;
        if (current->id_count != 1)
            issues.push_back(where(current->line) + ": malformed [Term] stanza: expected exactly one id, found " +
                             std::to_string(current->id_count));
        else if (!current->has_name)
            issues.push_back(where(current->line) + ": malformed [Term] stanza '" + current->term.id +
                             "': missing name");
        else
            terms.push_back(std::move(current->term));
        current.reset();
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        auto line = text::trim(content.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '!') continue;

        if (line.front() == '[') {
            flush();
            if (line.back() != ']') {
                issues.push_back(where(line_no) + ": malformed stanza header '" + std::string(line) + "'");
                in_term = false;
                continue;
            }
            in_term = line == "[Term]";
            if (in_term) current = Pending{{}, line_no};
            continue;
        }
        if (!in_term) continue;

        auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) {
            issues.push_back(where(line_no) + ": malformed tag line '" + std::string(line) + "'");
            continue;
        }
        auto tag = line.substr(0, colon);
        auto value = text::trim(line.substr(colon + 1));

        if (tag == "id") {
            ++current->id_count;
            current->term.id = std::string(detail::strip_obo_trailer(value));
            if (current->term.id.empty()) issues.push_back(where(line_no) + ": empty id");
        } else if (tag == "name") {
            current->term.name = std::string(value);
            current->has_name = !value.empty();
        } else if (tag == "is_a") {
            auto parent = detail::strip_obo_trailer(value);
            if (parent.empty() || parent.find(' ') != std::string_view::npos)
                issues.push_back(where(line_no) + ": malformed is_a value '" + std::string(value) + "'");
            else
                current->term.parents.emplace_back(parent);
        } else if (tag == "synonym") {
            if (auto s = detail::parse_quoted(value))
                current->term.synonyms.push_back(std::move(*s));
            else
                issues.push_back(where(line_no) + ": malformed synonym '" + std::string(value) + "'");
        }
    }
    flush();
    if (!issues.empty()) throw DataError("OBO parse failed", std::move(issues));
    return OntologyDag::from_terms(std::move(terms));
}

inline OntologyDag parse_obo(const std::filesystem::path& path) {
    return parse_obo_text(detail::read_file(path), path.filename().string());
}

/// Ontology terms as graph records: one node per term, one IS_A edge per
/// (child, parent) pair. Lets CellType nodes share ids with the ontology.
inline std::pair<std::vector<NodeRecord>, std::vector<EdgeRecord>> ontology_graph_records(
    const OntologyDag& dag, const std::string& node_type = "CellType") {
    std::pair<std::vector<NodeRecord>, std::vector<EdgeRecord>> out;
    for (const auto& t : dag.terms()) {
        out.first.push_back({t.id, node_type, t.name, t.synonyms});
        for (const auto& p : t.parents) out.second.push_back({t.id, "IS_A", p});
    }
    return out;
}

}  // namespace gather
