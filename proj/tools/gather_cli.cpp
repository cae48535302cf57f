#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace gather;

    CLI::App app{"gather: convergence-centric retrieval over typed knowledge graphs"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, nodes, edges, obo, dataset, out_dir, target_type, base_url, model, alpha_csv;
    std::vector<std::string> housekeeping;
    int k = 0, top_k = 0, jobs = 0, max_in_flight = 0;
    double gamma = 0, temperature = 0;
    std::uint64_t seed = 0;
    bool include_paths = false, dry_run = false, no_alternation = false, label_hint = false, verbose = false;
    std::string mock;

    app.add_option("--config", config_path, "TOML-style key/value configuration file");
    auto* o_nodes = app.add_option("--graph-nodes", nodes, "node table (TSV)");
    auto* o_edges = app.add_option("--graph-edges", edges, "edge table (TSV)");
    auto* o_obo = app.add_option("--obo", obo, "cell ontology (OBO)");
    auto* o_dataset = app.add_option("--dataset", dataset, "cell sentences (JSONL)");
    auto* o_k = app.add_option("--k", k, "traversal horizon");
    auto* o_topk = app.add_option("--top-k", top_k, "retained convergence nodes");
    auto* o_gamma = app.add_option("--gamma", gamma, "geometric hop decay, alpha_h = gamma^(h-1)");
    auto* o_alpha = app.add_option("--alpha", alpha_csv, "explicit hop weights, comma separated");
    auto* o_target = app.add_option("--target-type", target_type, "semantic type of candidate targets");
    auto* o_noalt = app.add_flag("--no-type-alternation", no_alternation, "allow same-type consecutive nodes");
    auto* o_hk = app.add_option("--housekeeping", housekeeping, "housekeeping symbol prefixes");
    auto* o_paths = app.add_flag("--include-paths", include_paths, "append explicit traversal paths to evidence");
    auto* o_hint = app.add_flag("--label-hint", label_hint, "list candidate cell-type names in the prompt");
    auto* o_mock = app.add_option("--mock", mock, "mock LLM: top | fixed:<text> | answers.json")
                       ->expected(0, 1)
                       ->default_str("top");
    auto* o_dry = app.add_flag("--dry-run", dry_run, "write prompts, make no LLM calls");
    auto* o_base = app.add_option("--base-url", base_url, "chat-completion endpoint base URL");
    auto* o_model = app.add_option("--model", model, "model name");
    auto* o_temp = app.add_option("--temperature", temperature, "decoding temperature");
    auto* o_inflight = app.add_option("--max-in-flight", max_in_flight, "concurrent LLM requests");
    auto* o_out = app.add_option("--out", out_dir, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    auto* o_jobs = app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", verbose, "verbose logging");

    auto* graph = app.add_subcommand("graph", "validate or summarize a graph");
    graph->require_subcommand(1);
    auto* validate = graph->add_subcommand("validate", "load and validate node/edge tables");
    auto* stats = graph->add_subcommand("stats", "node/edge counts per type and mean degree");

    auto* retrieve = app.add_subcommand("retrieve", "ground, traverse and score; no LLM");
    std::string cell_id;
    bool all = false;
    auto* o_cell = retrieve->add_option("--cell-id", cell_id, "single sample to retrieve");
    retrieve->add_flag("--all", all, "retrieve every sample (default)");

    auto* annotate = app.add_subcommand("annotate", "retrieve evidence and annotate with one LLM call per sample");

    auto* eval = app.add_subcommand("eval", "exact / ancestor match, calls and evidence");
    std::string results_path;
    eval->add_option("--results", results_path, "results JSONL from annotate")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic graph, dataset and ontology");
    std::string spec_path;
    synth->add_option("--spec", spec_path, "synthetic spec (JSON); defaults are used when omitted");

    auto* ontology = app.add_subcommand("ontology", "ontology utilities");
    ontology->require_subcommand(1);
    auto* ont_export = ontology->add_subcommand("export", "write OBO terms as graph TSV tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        auto code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigError;
    }
    if (verbose) log::set_level(log::Level::debug);

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg.apply(KeyValueConfig::load(config_path), std::filesystem::path(config_path).parent_path());
        auto& r = cfg.annotate.retrieval;
        if (*o_nodes) cfg.graph_nodes = nodes;
        if (*o_edges) cfg.graph_edges = edges;
        if (*o_obo) cfg.obo = obo;
        if (*o_dataset) cfg.dataset = dataset;
        if (*o_out) cfg.out_dir = out_dir;
        if (*o_k) r.traversal.k = k;
        if (*o_topk) r.scoring.top_k = top_k;
        if (*o_gamma) r.scoring.gamma = gamma;
        if (*o_alpha) {
            std::vector<double> alpha;
            for (auto item : text::split(alpha_csv, ','))
                alpha.push_back(KeyValueConfig::to_number("--alpha", std::string(text::trim(item))));
            r.scoring.alpha = std::move(alpha);
        }
        if (*o_target) r.traversal.target_type = target_type;
        if (*o_noalt) r.traversal.enforce_type_alternation = false;
        if (*o_hk) r.filter.housekeeping_prefixes = housekeeping;
        if (*o_paths) cfg.annotate.include_paths = true;
        if (*o_hint) cfg.annotate.label_hint = true;
        if (*o_dry) cfg.annotate.dry_run = true;
        if (*o_base) cfg.http.base_url = base_url;
        if (*o_model) cfg.annotate.model.model = model;
        if (*o_temp) cfg.annotate.model.temperature = temperature;
        if (*o_inflight) cfg.annotate.max_in_flight = static_cast<unsigned>(std::max(1, max_in_flight));
        if (*o_seed) cfg.seed = seed;
        if (*o_jobs) cfg.jobs = static_cast<unsigned>(jobs);
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return cli::kConfigError;
    }

    if (*validate) return cli::cmd_graph_validate(cfg, std::cout, std::cerr);
    if (*stats) return cli::cmd_graph_stats(cfg, std::cout, std::cerr);
    if (*retrieve) {
        std::optional<std::string> only;
        if (*o_cell && !all) only = cell_id;
        return cli::cmd_retrieve(cfg, only, std::cout, std::cerr);
    }
    if (*annotate) {
        std::optional<std::string> m;
        if (*o_mock) m = mock.empty() ? std::string("top") : mock;
        return cli::cmd_annotate(cfg, m, std::cout, std::cerr);
    }
    if (*eval) return cli::cmd_eval(cfg, results_path, std::cout, std::cerr);
    if (*synth) {
        std::optional<std::uint64_t> s;
        if (*o_seed) s = seed;
        return cli::cmd_synth(spec_path, s, *o_out ? std::filesystem::path(out_dir) : std::filesystem::path("synth-out"),
                              std::cout, std::cerr);
    }
    if (*ont_export) return cli::cmd_ontology_export(cfg, std::cout, std::cerr);
    return cli::kConfigError;
}
