#pragma once
// Evidence assembly and single-call LLM annotation.
//
// The retrieval stages never touch the LLM client. The client is invoked
// exactly once per sample, after the prompt has been assembled.

#include <atomic>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/error.hpp"
#include "gather/log.hpp"
#include "gather/obo_ontology.hpp"
#include "gather/retrieval.hpp"

namespace gather {

struct EvidencePath {
    std::string gene_symbol;
    int hop = 0;
    std::vector<NodeIndex> nodes;
    std::string rendered;
};

struct EvidenceEntry {
    std::string target_id;
    std::string target_name;
    double score = 0.0;
    std::vector<std::vector<Supporter>> supporters;  // per hop
    std::vector<EvidencePath> paths;
};

struct EvidenceContext {
    std::vector<EvidenceEntry> entries;
    bool include_paths = false;
};

inline EvidenceContext build_evidence(const std::vector<ScoredCandidate>& top, bool include_paths,
                                      const GroundedGeneSet& grounded, const PropertyGraph& graph,
                                      const TraversalConfig& traversal) {
    EvidenceContext ctx;
    ctx.include_paths = include_paths;
    for (const auto& c : top) {
        EvidenceEntry e{c.target_id, graph.node(c.target).name, c.score, c.supporters, {}};
        if (include_paths) {
            for (std::size_t h = 0; h < c.supporters.size(); ++h) {
                for (const auto& s : c.supporters[h]) {
                    const auto* gene = grounded.find_rank(s.rank);
                    auto path = representative_path(graph, gene->node, c.target, static_cast<int>(h + 1),
                                                    traversal.enforce_type_alternation);
                    if (!path) continue;
                    e.paths.push_back({s.symbol, static_cast<int>(h + 1), path->nodes, path->render(graph)});
                }
            }
        }
        ctx.entries.push_back(std::move(e));
    }
    return ctx;
}

struct PromptTemplate {
    std::string version = "gather-prompt/v1";
    std::string system =
        "You are an expert in single-cell biology. Given a cell's ranked marker genes and "
        "evidence retrieved from a cell-centric knowledge graph, identify the cell type.";
    std::string genes_header = "Ranked genes (most discriminative first):";
    std::string evidence_header =
        "Knowledge-graph convergence evidence (candidate cell types jointly supported by the genes, "
        "strongest first):";
    std::string no_evidence = "No convergence evidence was found in the knowledge graph for these genes.";
    std::string hint_header = "Candidate cell types:";
    std::string instruction = "Answer with a single Cell Ontology cell type name and nothing else.";
};

struct LlmRequest {
    std::string model;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    // Local metadata; not transmitted to the endpoint.
    std::string cell_id;
    std::vector<std::string> evidence_names;
};

struct LlmResponse {
    std::string text;
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    /// One chat completion. Throws TransportError on failure. Must be safe to
    /// call concurrently.
    virtual LlmResponse complete(const LlmRequest& request) = 0;
};

/// Endpoint settings for the HTTP transport (see http_client.hpp).
struct HttpClientConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string token_env = "GATHER_LLM_API_KEY";
    int timeout_ms = 60000;
};

/// Deterministic stand-in for an LLM endpoint.
class MockLlmClient : public LlmClient {
public:
    using Responder = std::function<std::string(const LlmRequest&)>;

    explicit MockLlmClient(Responder responder) : responder_(std::move(responder)) {}

    static Responder fixed(std::string answer) {
        return [a = std::move(answer)](const LlmRequest&) { return a; };
    }

    /// Canned answers keyed by cell_id, with a fallback for unknown cells.
    static Responder keyed(std::map<std::string, std::string> answers, std::string fallback = "unknown") {
        return [a = std::move(answers), f = std::move(fallback)](const LlmRequest& r) {
            auto it = a.find(r.cell_id);
            return it == a.end() ? f : it->second;
        };
    }

    /// Answers with the strongest evidence entry's name.
    static Responder top_evidence() {
        return [](const LlmRequest& r) {
            return r.evidence_names.empty() ? std::string("unknown") : r.evidence_names.front();
        };
    }

    LlmResponse complete(const LlmRequest& request) override {
        ++calls_;
        return {responder_(request), std::nullopt, std::nullopt};
    }

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    Responder responder_;
    std::atomic<std::size_t> calls_{0};
};

namespace detail {

inline std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

struct ModelSettings {
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
};

inline LlmRequest assemble_prompt(const EvidenceContext& context, const CellSentence& sentence,
                                  const std::vector<std::string>* label_space_hint = nullptr,
                                  const PromptTemplate& tmpl = {}, const ModelSettings& model = {}) {
    std::string p;
    p += tmpl.genes_header + "\n";
    for (std::size_t i = 0; i < sentence.gene_symbols.size(); ++i)
        p += std::to_string(i + 1) + ". " + sentence.gene_symbols[i] + "\n";
    p += "\n";
    if (context.entries.empty()) {
        p += tmpl.no_evidence + "\n";
    } else {
        p += tmpl.evidence_header + "\n";
        for (std::size_t i = 0; i < context.entries.size(); ++i) {
            const auto& e = context.entries[i];
            p += "Evidence " + std::to_string(i + 1) + ": " + e.target_name + " (" + e.target_id +
                 "), score " + detail::fixed4(e.score) + "\n";
            for (std::size_t h = 0; h < e.supporters.size(); ++h) {
                if (e.supporters[h].empty()) continue;
                p += "  supported at " + std::to_string(h + 1) + " hop" + (h ? "s" : "") + " by:";
                for (const auto& s : e.supporters[h]) p += " " + s.symbol;
                p += "\n";
            }
            for (const auto& path : e.paths) p += "  path: " + path.rendered + "\n";
        }
    }
    if (label_space_hint && !label_space_hint->empty()) {
        p += "\n" + tmpl.hint_header + "\n";
        for (const auto& name : *label_space_hint) p += "- " + name + "\n";
    }
    p += "\n" + tmpl.instruction + "\n";

    LlmRequest req;
    req.model = model.model;
    req.temperature = model.temperature;
    req.system_prompt = tmpl.system;
    req.user_prompt = std::move(p);
    req.cell_id = sentence.cell_id;
    for (const auto& e : context.entries) req.evidence_names.push_back(e.target_name);
    return req;
}

/// Maps raw LLM output to an ontology term: whole answer first, then the first
/// non-empty line with an "Answer:" prefix, quotes and emphasis removed.
inline std::optional<std::string> interpret_answer(const OntologyDag& dag, std::string_view raw) {
    if (auto t = dag.resolve_label(raw)) return t;
    std::string_view line;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto end = raw.find('\n', pos);
        if (end == std::string_view::npos) end = raw.size();
        line = text::trim(raw.substr(pos, end - pos));
        pos = end + 1;
        if (!line.empty()) break;
    }
    if (text::starts_with_ci(line, "answer:")) line = text::trim(line.substr(7));
    while (!line.empty() && (line.front() == '"' || line.front() == '*' || line.front() == '\'')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == '"' || line.back() == '*' || line.back() == '\'')) line.remove_suffix(1);
    return dag.resolve_label(line);
}

struct AnnotateConfig {
    RetrievalConfig retrieval;
    bool include_paths = false;
    bool label_hint = false;
    bool dry_run = false;
    int max_retries = 2;
    unsigned max_in_flight = 4;
    PromptTemplate prompt;
    ModelSettings model;
};

enum class Stage { grounded_to_topk, evidence_built, prompt_assembled, llm_completed };

struct AnnotationResult {
    std::string cell_id;
    std::optional<std::string> predicted_term;
    std::optional<std::string> gold;
    std::string raw_answer;
    int llm_calls = 0;
    int retries = 0;
    std::size_t evidence_count = 0;
    std::size_t grounded_count = 0;
    bool no_evidence = false;
    std::optional<std::string> error;  // transport failure after the retry budget
    std::string prompt;                // kept for dry runs and debugging
};

/// Everything annotate needs that is shared across samples.
struct AnnotationContext {
    const GeneLexicon& lexicon;
    const OntologyDag& dag;
    std::vector<std::string> label_space;  // used only when label_hint is on
};

inline AnnotationResult annotate(const CellSentence& sentence, const AnnotationContext& ctx, LlmClient& client,
                                 const AnnotateConfig& config,
                                 const std::function<void(Stage)>& observe = {}) {
    auto stage = [&](Stage s) {
        if (observe) observe(s);
    };
    AnnotationResult result;
    result.cell_id = sentence.cell_id;
    result.gold = sentence.gold_label;

    auto r = retrieve(sentence, ctx.lexicon, config.retrieval);
    stage(Stage::grounded_to_topk);
    auto evidence = build_evidence(r.top, config.include_paths, r.grounded, ctx.lexicon.graph(),
                                   config.retrieval.traversal);
    stage(Stage::evidence_built);
    auto request = assemble_prompt(evidence, sentence, config.label_hint ? &ctx.label_space : nullptr,
                                   config.prompt, config.model);
    stage(Stage::prompt_assembled);

    result.grounded_count = r.grounded.size();
    result.evidence_count = evidence.entries.size();
    result.no_evidence = evidence.entries.empty();
    if (result.no_evidence)
        log::warn("cell " + sentence.cell_id + ": no convergence evidence; prompting without it");
    result.prompt = request.system_prompt + "\n\n" + request.user_prompt;
    if (config.dry_run) return result;

    for (int attempt = 0;; ++attempt) {
        try {
            auto response = client.complete(request);
            result.llm_calls = 1;
            result.raw_answer = std::move(response.text);
            break;
        } catch (const TransportError& e) {
            if (attempt >= config.max_retries) {
                result.error = e.what();
                log::warn("cell " + sentence.cell_id + ": LLM call failed after " + std::to_string(attempt + 1) +
                          " attempt(s): " + e.what());
                return result;
            }
            ++result.retries;
        }
    }
    stage(Stage::llm_completed);
    result.predicted_term = interpret_answer(ctx.dag, result.raw_answer);
    return result;
}

/// Annotates samples concurrently with at most max_in_flight outstanding
/// requests. Results keep input order.
inline std::vector<AnnotationResult> annotate_batch(const std::vector<CellSentence>& sentences,
                                                    const AnnotationContext& ctx, LlmClient& client,
                                                    const AnnotateConfig& config) {
    std::vector<AnnotationResult> results(sentences.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < sentences.size(); i = next++)
            results[i] = annotate(sentences[i], ctx, client, config);
    };
    const auto workers = std::max(1u, std::min<unsigned>(config.max_in_flight,
                                                         static_cast<unsigned>(std::max<std::size_t>(sentences.size(), 1))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return results;
}

inline nlohmann::ordered_json to_json(const AnnotationResult& r) {
    auto opt = [](const std::optional<std::string>& s) {
        return s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["cell_id"] = r.cell_id;
    j["predicted"] = opt(r.predicted_term);
    j["gold"] = opt(r.gold);
    j["llm_calls"] = r.llm_calls;
    j["evidence_count"] = r.evidence_count;
    j["grounded_count"] = r.grounded_count;
    j["raw_answer"] = r.raw_answer;
    j["retries"] = r.retries;
    if (r.error) j["error"] = *r.error;
    return j;
}

inline AnnotationResult annotation_result_from_json(const nlohmann::json& j) {
    auto opt = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<std::string>();
    };
    AnnotationResult r;
    r.cell_id = j.at("cell_id").get<std::string>();
    r.predicted_term = opt("predicted");
    r.gold = opt("gold");
    r.llm_calls = j.at("llm_calls").get<int>();
    r.evidence_count = j.at("evidence_count").get<std::size_t>();
    r.grounded_count = j.value("grounded_count", std::size_t{0});
    r.raw_answer = j.value("raw_answer", std::string{});
    r.retries = j.value("retries", 0);
    r.error = opt("error");
    return r;
}

}  // namespace gather
