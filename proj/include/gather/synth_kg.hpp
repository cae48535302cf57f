#pragma once
// Synthetic typed knowledge graphs with planted convergence structure.
//
// Layout of a generated graph:
//   - planted cell types, each with dedicated supporter genes. A supporter at
//     hop h reaches its cell type through a private chain
//       Gene -> I_1 -> ... -> I_{h-1} <- CellType
//     (h = 1 is a direct IS_MARKER_FOR edge). Planted genes and planted cell
//     types receive no background edges, so the supporter sets recorded in
//     the manifest are exact when noise is off.
//   - background genes and cell types wired to a shared pool of function
//     nodes, plus sparse background marker edges.
//   - optional noise: uniformly random edges between arbitrary node pairs.
//
// All randomness flows from one mt19937_64 stream with portable index
// sampling, so a seed fully determines every output byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/error.hpp"
#include "gather/graph_store.hpp"
#include "gather/grounding.hpp"

namespace gather::synth {

struct PlantedTarget {
    int cell_type = -1;             // index among synthetic cell types; -1 picks the next free one
    std::vector<int> hop_profile;   // hop_profile[h - 1] supporters at hop h
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int n_genes = 2000;
    int n_celltypes = 60;
    int n_function_nodes = 400;
    double marker_density = 0.002;         // P(background gene marks a given background cell type)
    double function_fanout = 2.0;          // mean Gene -> function degree
    double celltype_function_fanout = 3.0; // mean CellType -> function degree
    double noise_edge_fraction = 0.0;      // random edges, relative to the structural edge count
    int horizon = 2;
    std::vector<PlantedTarget> planted;
    int sentences_per_target = 5;
    int genes_per_sentence = 50;
    int housekeeping_per_sentence = 0;
    int unmatched_per_sentence = 0;
    double extra_parent_probability = 0.15;  // ontology: chance of a second is_a parent
    bool vckg_profile = false;

    /// Counts and fanouts matching a 120K-node / 2.5M-edge knowledge graph.
    void apply_vckg_profile() {
        n_genes = 43000;
        n_celltypes = 2500;
        n_function_nodes = 77000;
        function_fanout = 55.0;
        celltype_function_fanout = 40.0;
        marker_density = 0.0008;
        if (planted.empty())
            for (int i = 0; i < 20; ++i) planted.push_back({-1, {6, 4}});
    }
};

struct Edge {
    std::uint32_t source;
    std::uint32_t target;
    std::uint16_t relation;
};

struct SynthGraph {
    std::vector<NodeRecord> nodes;
    std::vector<std::string> relations;
    std::vector<Edge> edges;

    PropertyGraph build(SemanticTypeSet types = SemanticTypeSet::defaults()) const {
        GraphBuilder b(std::move(types));
        for (const auto& n : nodes) b.add_node(n);
        for (const auto& e : edges) b.add_edge(nodes[e.source].id, relations[e.relation], nodes[e.target].id);
        return std::move(b).build();
    }

    void write_nodes(std::ostream& out) const { write_nodes_tsv(out, nodes); }

    void write_edges(std::ostream& out) const {
        out << "source\trelation\ttarget\n";
        for (const auto& e : edges)
            out << nodes[e.source].id << '\t' << relations[e.relation] << '\t' << nodes[e.target].id << '\n';
    }
};

struct PlantedSupporter {
    std::string symbol;
    std::string node_id;
    int hop = 0;
};

struct PlantedRecord {
    std::string target_id;
    std::string target_name;
    std::vector<PlantedSupporter> supporters;
    std::vector<std::string> cell_ids;
};

struct SynthDataset {
    SynthSpec spec;
    SynthGraph graph;
    std::vector<CellSentence> sentences;
    std::string obo;
    std::vector<PlantedRecord> planted;

    nlohmann::ordered_json manifest() const {
        nlohmann::ordered_json j;
        j["seed"] = spec.seed;
        j["node_count"] = graph.nodes.size();
        j["edge_count"] = graph.edges.size();
        j["horizon"] = spec.horizon;
        j["noise_edge_fraction"] = spec.noise_edge_fraction;
        j["sentence_count"] = sentences.size();
        auto& arr = j["planted"] = nlohmann::ordered_json::array();
        for (const auto& p : planted) {
            nlohmann::ordered_json e;
            e["target"] = p.target_id;
            e["name"] = p.target_name;
            auto& sup = e["supporters"] = nlohmann::ordered_json::array();
            for (const auto& s : p.supporters) sup.push_back({{"symbol", s.symbol}, {"node", s.node_id}, {"hop", s.hop}});
            e["cells"] = p.cell_ids;
            arr.push_back(std::move(e));
        }
        return j;
    }

    /// nodes.tsv, edges.tsv, dataset.jsonl, ontology.obo, manifest.json
    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        auto open = [&](const char* name) {
            std::ofstream out(dir / name, std::ios::binary);
            if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
            return out;
        };
        {
            auto out = open("nodes.tsv");
            graph.write_nodes(out);
        }
        {
            auto out = open("edges.tsv");
            graph.write_edges(out);
        }
        {
            auto out = open("dataset.jsonl");
            for (const auto& s : sentences) out << to_jsonl_line(s) << '\n';
        }
        {
            auto out = open("ontology.obo");
            out << obo;
        }
        {
            auto out = open("manifest.json");
            out << manifest().dump(2) << '\n';
        }
    }
};

namespace detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n) by multiply-shift; identical on every platform.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    /// floor(mean) plus a Bernoulli on the fractional part.
    int around(double mean) {
        auto whole = static_cast<int>(std::floor(mean));
        return whole + (chance(mean - whole) ? 1 : 0);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline std::string padded(int value, int width) {
    auto s = std::to_string(value);
    return s.size() >= static_cast<std::size_t>(width) ? s : std::string(width - s.size(), '0') + s;
}

struct FunctionKind {
    const char* type;
    const char* gene_relation;
    const char* celltype_relation;
};

inline constexpr FunctionKind kFunctionKinds[] = {
    {"BiologicalProcess", "PARTICIPATES_IN", "CAPABLE_OF"},
    {"MolecularFunction", "ENABLES", "CAPABLE_OF"},
    {"CellularComponent", "LOCATED_IN", "HAS_COMPONENT"},
    {"Pathway", "IN_PATHWAY", "ACTIVE_IN_PATHWAY"},
    {"Anatomy", "EXPRESSED_IN", "PART_OF"},
    {"Disease", "ASSOCIATED_WITH", "IMPLICATED_IN"},
    {"Phenotype", "HAS_PHENOTYPE", "MANIFESTS_AS"},
};

}  // namespace detail

inline void validate(const SynthSpec& s) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("infeasible synthetic spec: " + what);
    };
    need(s.n_genes >= 0 && s.n_celltypes >= 0 && s.n_function_nodes >= 0, "counts must be >= 0");
    for (double p : {s.marker_density, s.noise_edge_fraction, s.extra_parent_probability})
        need(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
    need(s.function_fanout >= 0 && s.celltype_function_fanout >= 0, "fanouts must be >= 0");
    need((s.function_fanout == 0 && s.celltype_function_fanout == 0) || s.n_function_nodes > 0,
         "function fanout requires function nodes");
    need(s.horizon >= 1, "horizon must be >= 1");
    need(s.sentences_per_target >= 0 && s.genes_per_sentence >= 1, "sentence sizes must be positive");
    need(s.housekeeping_per_sentence >= 0 && s.unmatched_per_sentence >= 0, "injected symbol counts must be >= 0");
    need(static_cast<int>(s.planted.size()) <= s.n_celltypes, "more planted targets than cell types");

    long supporters = 0;
    std::unordered_set<int> used;
    for (const auto& p : s.planted) {
        need(!p.hop_profile.empty(), "planted hop profile is empty");
        need(static_cast<int>(p.hop_profile.size()) <= s.horizon,
             "planted hop profile exceeds the traversal horizon " + std::to_string(s.horizon));
        long total = 0;
        for (int c : p.hop_profile) {
            need(c >= 0, "negative supporter count");
            total += c;
        }
        need(total > 0, "planted target without supporters");
        need(total + s.housekeeping_per_sentence + s.unmatched_per_sentence <= s.genes_per_sentence,
             "planted supporters do not fit in a sentence");
        need(p.cell_type < s.n_celltypes, "planted cell type index out of range");
        if (p.cell_type >= 0) need(used.insert(p.cell_type).second, "cell type planted twice");
        supporters += total;
    }
    need(supporters <= s.n_genes, "not enough genes for the planted supporters");
    if (!s.planted.empty() && s.sentences_per_target > 0) {
        long max_fill = 0;
        for (const auto& p : s.planted) {
            long total = 0;
            for (int c : p.hop_profile) total += c;
            max_fill = std::max(max_fill, s.genes_per_sentence - total - s.housekeeping_per_sentence -
                                              s.unmatched_per_sentence);
        }
        need(max_fill <= s.n_genes - supporters, "not enough background genes to fill sentences");
    }
}

inline SynthDataset generate(SynthSpec spec) {
    if (spec.vckg_profile) spec.apply_vckg_profile();
    validate(spec);
    detail::Rng rng(spec.seed);
    SynthDataset out;
    out.spec = spec;
    auto& g = out.graph;

    auto relation = [&](const std::string& name) -> std::uint16_t {
        auto it = std::find(g.relations.begin(), g.relations.end(), name);
        if (it != g.relations.end()) return static_cast<std::uint16_t>(it - g.relations.begin());
        g.relations.push_back(name);
        return static_cast<std::uint16_t>(g.relations.size() - 1);
    };
    auto add_node = [&](std::string id, std::string type, std::string name, std::vector<std::string> syn = {}) {
        g.nodes.push_back({std::move(id), std::move(type), std::move(name), std::move(syn)});
        return static_cast<std::uint32_t>(g.nodes.size() - 1);
    };
    auto add_edge = [&](std::uint32_t s, std::uint16_t r, std::uint32_t t) { g.edges.push_back({s, t, r}); };

    std::vector<std::uint32_t> genes, celltypes, functions;
    for (int i = 1; i <= spec.n_genes; ++i) {
        auto n = detail::padded(i, 6);
        genes.push_back(add_node("SYN-G:" + n, "Gene", "SYNG" + n, {"SG" + std::to_string(i)}));
    }
    for (int i = 1; i <= spec.n_celltypes; ++i)
        celltypes.push_back(add_node("SYN-CL:" + detail::padded(i, 7), "CellType",
                                     "synthetic cell type " + std::to_string(i)));
    constexpr auto kinds = std::size(detail::kFunctionKinds);
    for (int i = 1; i <= spec.n_function_nodes; ++i) {
        const auto& kind = detail::kFunctionKinds[static_cast<std::size_t>(i - 1) % kinds];
        functions.push_back(add_node("SYN-F:" + detail::padded(i, 6), kind.type,
                                     std::string(kind.type) + " " + std::to_string(i)));
    }

    // Planted structure.
    const auto marker = relation("IS_MARKER_FOR");
    std::vector<bool> planted_gene(genes.size(), false), planted_cell(celltypes.size(), false);
    for (const auto& p : spec.planted)
        if (p.cell_type >= 0) planted_cell[static_cast<std::size_t>(p.cell_type)] = true;
    std::size_t next_gene = 0, next_cell = 0;
    int chain_id = 0;
    for (const auto& p : spec.planted) {
        std::size_t ct;
        if (p.cell_type >= 0) {
            ct = static_cast<std::size_t>(p.cell_type);
        } else {
            while (planted_cell[next_cell]) ++next_cell;
            ct = next_cell;
            planted_cell[ct] = true;
        }
        const auto target = celltypes[ct];
        PlantedRecord rec{g.nodes[target].id, g.nodes[target].name, {}, {}};
        for (std::size_t h0 = 0; h0 < p.hop_profile.size(); ++h0) {
            const int hop = static_cast<int>(h0) + 1;
            if (p.hop_profile[h0] == 0) continue;
            std::uint32_t entry = target;
            std::uint16_t entry_rel = marker;
            if (hop > 1) {
                std::vector<std::uint32_t> chain;
                ++chain_id;
                for (int j = 1; j < hop; ++j) {
                    const char* type = j % 2 ? "BiologicalProcess" : "Pathway";
                    chain.push_back(add_node("SYN-P:" + detail::padded(chain_id, 5) + "-" + std::to_string(j), type,
                                             "planted " + std::string(type) + " " + std::to_string(chain_id) + "." +
                                                 std::to_string(j)));
                }
                for (std::size_t j = 0; j + 1 < chain.size(); ++j) add_edge(chain[j], relation("PART_OF"), chain[j + 1]);
                add_edge(target, relation(hop - 1 == 1 ? "CAPABLE_OF" : "ACTIVE_IN_PATHWAY"), chain.back());
                entry = chain.front();
                entry_rel = relation("PARTICIPATES_IN");
            }
            for (int c = 0; c < p.hop_profile[h0]; ++c) {
                const auto gi = next_gene++;
                planted_gene[gi] = true;
                add_edge(genes[gi], entry_rel, entry);
                rec.supporters.push_back({g.nodes[genes[gi]].name, g.nodes[genes[gi]].id, hop});
            }
        }
        out.planted.push_back(std::move(rec));
    }

    // Background structure.
    std::vector<std::uint32_t> background_cells;
    for (std::size_t i = 0; i < celltypes.size(); ++i)
        if (!planted_cell[i]) background_cells.push_back(celltypes[i]);
    std::vector<std::size_t> background_genes;
    for (std::size_t i = 0; i < genes.size(); ++i)
        if (!planted_gene[i]) background_genes.push_back(i);

    auto link_function = [&](std::uint32_t from, bool is_gene) {
        const auto f = rng.below(functions.size());
        const auto& kind = detail::kFunctionKinds[f % kinds];
        add_edge(from, relation(is_gene ? kind.gene_relation : kind.celltype_relation), functions[f]);
    };
    for (auto gi : background_genes) {
        const int fan = rng.around(spec.function_fanout);
        for (int i = 0; i < fan; ++i) link_function(genes[gi], true);
        if (spec.marker_density > 0.0 && !background_cells.empty()) {
            if (spec.marker_density >= 1.0) {
                for (auto c : background_cells) add_edge(genes[gi], marker, c);
            } else {
                // Geometric skipping over the Bernoulli sequence.
                const double log_q = std::log1p(-spec.marker_density);
                double pos = -1.0;
                while (true) {
                    pos += 1.0 + std::floor(std::log1p(-rng.unit()) / log_q);
                    if (pos >= static_cast<double>(background_cells.size())) break;
                    add_edge(genes[gi], marker, background_cells[static_cast<std::size_t>(pos)]);
                }
            }
        }
    }
    for (auto c : background_cells) {
        const int fan = rng.around(spec.celltype_function_fanout);
        for (int i = 0; i < fan; ++i) link_function(c, false);
    }

    if (spec.noise_edge_fraction > 0.0 && g.nodes.size() > 1) {
        const auto noise_rel = relation("RELATED_TO");
        const auto count = static_cast<std::size_t>(std::llround(spec.noise_edge_fraction *
                                                                 static_cast<double>(g.edges.size())));
        for (std::size_t i = 0; i < count; ++i) {
            auto a = static_cast<std::uint32_t>(rng.below(g.nodes.size()));
            auto b = static_cast<std::uint32_t>(rng.below(g.nodes.size() - 1));
            if (b >= a) ++b;
            add_edge(a, noise_rel, b);
        }
    }

    // Sentences: supporters spread evenly over the ranked list so longer
    // prefixes cover more of them; remaining slots hold background fillers
    // and injected housekeeping/unmatched symbols in random order.
    int cell_counter = 0, hk_counter = 0, unmatched_counter = 0;
    for (auto& rec : out.planted) {
        for (int s = 0; s < spec.sentences_per_target; ++s) {
            CellSentence sentence;
            sentence.cell_id = "syn-cell-" + detail::padded(++cell_counter, 6);
            sentence.gold_label = rec.target_id;

            std::vector<std::string> supporters;
            for (const auto& sp : rec.supporters) supporters.push_back(sp.symbol);
            rng.shuffle(supporters);

            const int n = spec.genes_per_sentence;
            const int n_sup = static_cast<int>(supporters.size());
            std::vector<std::string> others;
            for (int i = 0; i < spec.housekeeping_per_sentence; ++i)
                others.push_back((i % 2 ? "MT-SYN" : "RPLSYN") + std::to_string(++hk_counter));
            for (int i = 0; i < spec.unmatched_per_sentence; ++i)
                others.push_back("UNMATCHED" + std::to_string(++unmatched_counter));
            std::unordered_set<std::size_t> chosen;
            while (static_cast<int>(others.size()) < n - n_sup) {
                auto gi = background_genes[rng.below(background_genes.size())];
                if (chosen.insert(gi).second) others.push_back(g.nodes[genes[gi]].name);
            }
            rng.shuffle(others);

            std::vector<bool> is_support_slot(static_cast<std::size_t>(n), false);
            for (int i = 0; i < n_sup; ++i) is_support_slot[static_cast<std::size_t>(i * n / n_sup)] = true;
            std::size_t si = 0, oi = 0;
            for (int pos = 0; pos < n; ++pos)
                sentence.gene_symbols.push_back(is_support_slot[static_cast<std::size_t>(pos)] ? supporters[si++]
                                                                                                : others[oi++]);
            rec.cell_ids.push_back(sentence.cell_id);
            out.sentences.push_back(std::move(sentence));
        }
    }

    // Companion ontology: a random DAG rooted at a generic cell term.
    std::string obo = "format-version: 1.2\nontology: syn-cl\n\n";
    obo += "[Term]\nid: SYN-CL:0000000\nname: synthetic cell\n\n";
    for (std::size_t i = 0; i < celltypes.size(); ++i) {
        const auto& node = g.nodes[celltypes[i]];
        obo += "[Term]\nid: " + node.id + "\nname: " + node.name + "\n";
        auto parent_of = [&](std::uint64_t pick) {
            return pick == 0 ? std::string("SYN-CL:0000000") : g.nodes[celltypes[pick - 1]].id;
        };
        const auto first = rng.below(i + 1);
        obo += "is_a: " + parent_of(first) + "\n";
        if (i > 0 && rng.chance(spec.extra_parent_probability)) {
            const auto second = rng.below(i + 1);
            if (second != first) obo += "is_a: " + parent_of(second) + "\n";
        }
        obo += "\n";
    }
    out.obo = std::move(obo);
    return out;
}

inline SynthSpec spec_from_json(const nlohmann::json& j) {
    SynthSpec s;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    try {
        get("seed", s.seed);
        get("n_genes", s.n_genes);
        get("n_celltypes", s.n_celltypes);
        get("n_function_nodes", s.n_function_nodes);
        get("marker_density", s.marker_density);
        get("function_fanout", s.function_fanout);
        get("celltype_function_fanout", s.celltype_function_fanout);
        get("noise_edge_fraction", s.noise_edge_fraction);
        get("horizon", s.horizon);
        get("sentences_per_target", s.sentences_per_target);
        get("genes_per_sentence", s.genes_per_sentence);
        get("housekeeping_per_sentence", s.housekeeping_per_sentence);
        get("unmatched_per_sentence", s.unmatched_per_sentence);
        get("extra_parent_probability", s.extra_parent_probability);
        get("vckg_profile", s.vckg_profile);
        if (j.contains("planted")) {
            for (const auto& p : j["planted"]) {
                PlantedTarget t;
                t.cell_type = p.value("cell_type", -1);
                t.hop_profile = p.at("hop_profile").get<std::vector<int>>();
                s.planted.push_back(std::move(t));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid synthetic spec: ") + e.what());
    }
    return s;
}

}  // namespace gather::synth
