#pragma once
// Subcommand implementations for the gather CLI. Each returns a process exit
// code: 0 success, 1 data/validation error, 2 configuration error,
// 3 transport error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gather/gather.hpp"

namespace gather::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kConfigError = 2, kTransportError = 3 };

inline int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const TransportError& e) {
        err << "transport error: " << e.what() << '\n';
        return kTransportError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    }
}

inline void require_path(const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("missing ") + what);
}

inline PropertyGraph load_configured_graph(const RunConfig& cfg) {
    require_path(cfg.graph_nodes, "--graph-nodes");
    require_path(cfg.graph_edges, "--graph-edges");
    return load_graph(cfg.graph_nodes, cfg.graph_edges, cfg.types());
}

inline int cmd_graph_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto g = load_configured_graph(cfg);
        out << "ok: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
        return kOk;
    });
}

inline int cmd_graph_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto g = load_configured_graph(cfg);
        out << to_json(graph_stats(g)).dump(2) << '\n';
        return kOk;
    });
}

/// Runs fn(i) for i in [0, n) over `jobs` threads. Callers write into
/// pre-sized slots, so output order never depends on scheduling.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (auto i = next++; i < n; i = next++) fn(i);
        });
}

inline int cmd_retrieve(const RunConfig& cfg, const std::optional<std::string>& cell_id, std::ostream& out,
                        std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        require_path(cfg.dataset, "--dataset");
        auto g = load_configured_graph(cfg);
        auto dataset = parse_cell_sentences(cfg.dataset);
        std::vector<const CellSentence*> selected;
        for (const auto& s : dataset)
            if (!cell_id || s.cell_id == *cell_id) selected.push_back(&s);
        if (cell_id && selected.empty()) throw DataError("unknown cell_id '" + *cell_id + "'");

        GeneLexicon lexicon(g);
        std::vector<nlohmann::ordered_json> records(selected.size());
        parallel_for(selected.size(), cfg.jobs, [&](std::size_t i) {
            auto r = retrieve(*selected[i], lexicon, cfg.annotate.retrieval);
            records[i] = retrieval_json(*selected[i], r, g);
        });
        auto arr = nlohmann::ordered_json::array();
        for (auto& r : records) {
            for (const auto& w : r["warnings"]) err << "warning: " << r["cell_id"].get<std::string>() << ": " << w.get<std::string>() << '\n';
            arr.push_back(std::move(r));
        }
        out << arr.dump(2) << '\n';
        return kOk;
    });
}

/// "top" answers with the strongest evidence name, "fixed:<text>" always
/// answers <text>, anything else is a JSON file mapping cell_id to answer.
inline std::unique_ptr<MockLlmClient> make_mock(const std::string& spec) {
    if (spec.empty() || spec == "top") return std::make_unique<MockLlmClient>(MockLlmClient::top_evidence());
    if (spec.rfind("fixed:", 0) == 0) {
        auto answer = spec.substr(6);
        return std::make_unique<MockLlmClient>([answer](const LlmRequest&) { return answer; });
    }
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open mock answer file '" + spec + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid mock answer file: " + std::string(e.what()));
    }
    auto answers = j.get<std::map<std::string, std::string>>();
    return std::make_unique<MockLlmClient>(
        [answers = std::move(answers)](const LlmRequest& r) {
            auto it = answers.find(r.cell_id);
            return it == answers.end() ? std::string("unknown") : it->second;
        });
}

inline int cmd_annotate(const RunConfig& cfg, const std::optional<std::string>& mock, std::ostream& out,
                        std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        require_path(cfg.dataset, "--dataset");
        require_path(cfg.obo, "--obo");
        auto g = load_configured_graph(cfg);
        auto dag = parse_obo(cfg.obo);
        auto dataset = parse_cell_sentences(cfg.dataset);
        GeneLexicon lexicon(g);

        AnnotationContext ctx{lexicon, dag, {}};
        if (cfg.annotate.label_hint) {
            auto target = g.types().id(cfg.annotate.retrieval.traversal.target_type);
            for (const auto& n : g.nodes())
                if (n.type == target) ctx.label_space.push_back(n.name);
            std::sort(ctx.label_space.begin(), ctx.label_space.end());
        }

        std::unique_ptr<LlmClient> client;
        if (mock)
            client = make_mock(*mock);
        else if (!cfg.annotate.dry_run)
            client = std::make_unique<HttpChatClient>(cfg.http);
        else
            client = std::make_unique<MockLlmClient>(MockLlmClient::fixed(""));  // never invoked

        auto results = annotate_batch(dataset, ctx, *client, cfg.annotate);

        std::filesystem::create_directories(cfg.out_dir);
        if (cfg.annotate.dry_run) {
            auto dir = cfg.out_dir / "prompts";
            std::filesystem::create_directories(dir);
            for (const auto& r : results) std::ofstream(dir / (r.cell_id + ".txt"), std::ios::binary) << r.prompt;
        }
        auto results_path = cfg.out_dir / "results.jsonl";
        std::ofstream res(results_path, std::ios::binary);
        if (!res) throw DataError("cannot write '" + results_path.string() + "'");
        double calls = 0, evidence = 0;
        std::size_t failures = 0;
        for (const auto& r : results) {
            res << to_json(r).dump() << '\n';
            calls += r.llm_calls;
            evidence += static_cast<double>(r.evidence_count);
            if (r.error) {
                ++failures;
                err << "transport error: " << r.cell_id << ": " << *r.error << " (retries " << r.retries << ")\n";
            }
        }
        const double n = results.empty() ? 1.0 : static_cast<double>(results.size());
        char buf[160];
        std::snprintf(buf, sizeof buf, "samples %zu  avg_calls %.2f  avg_evidence %.2f  failures %zu\n",
                      results.size(), calls / n, evidence / n, failures);
        out << buf;
        return failures ? kTransportError : kOk;
    });
}

inline std::vector<AnnotationResult> read_results(const std::filesystem::path& path) {
    std::vector<AnnotationResult> out;
    auto content = detail::read_file(path);
    detail::for_each_data_line(content, [&](std::size_t no, std::string_view line) {
        try {
            out.push_back(annotation_result_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.filename().string() + ":" + std::to_string(no) + ": " + e.what());
        }
    });
    return out;
}

inline int cmd_eval(const RunConfig& cfg, const std::filesystem::path& results_path, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        require_path(cfg.dataset, "--dataset");
        require_path(cfg.obo, "--obo");
        require_path(results_path, "--results");
        auto dag = parse_obo(cfg.obo);
        auto dataset = parse_cell_sentences(cfg.dataset);
        auto report = evaluate(read_results(results_path), dataset, dag);
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream(cfg.out_dir / "metrics.json", std::ios::binary) << to_json(report).dump(2) << '\n';
        std::ofstream(cfg.out_dir / "metrics.txt", std::ios::binary) << to_table(report);
        out << to_table(report);
        return kOk;
    });
}

inline int cmd_synth(const std::filesystem::path& spec_path, std::optional<std::uint64_t> seed,
                     const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        synth::SynthSpec spec;
        if (!spec_path.empty()) {
            std::ifstream in(spec_path);
            if (!in) throw ConfigError("cannot open synthetic spec '" + spec_path.string() + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("invalid synthetic spec: " + std::string(e.what()));
            }
            spec = synth::spec_from_json(j);
        }
        if (seed) spec.seed = *seed;
        auto data = synth::generate(spec);
        data.write(out_dir);
        out << "wrote " << data.graph.nodes.size() << " nodes, " << data.graph.edges.size() << " edges, "
            << data.sentences.size() << " sentences to " << out_dir.string() << '\n';
        return kOk;
    });
}

inline int cmd_ontology_export(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require_path(cfg.obo, "--obo");
        auto dag = parse_obo(cfg.obo);
        auto [nodes, edges] = ontology_graph_records(dag);
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream n(cfg.out_dir / "ontology_nodes.tsv", std::ios::binary);
        write_nodes_tsv(n, nodes);
        std::ofstream e(cfg.out_dir / "ontology_edges.tsv", std::ios::binary);
        write_edges_tsv(e, edges);
        out << "wrote " << nodes.size() << " terms and " << edges.size() << " is_a edges\n";
        return kOk;
    });
}

}  // namespace gather::cli
