#pragma once
// Run configuration: a TOML-style key/value file plus command-line overrides.
//
// Supported syntax: [section] headers, `key = value` lines, `#` comments,
// values that are quoted strings, numbers, true/false, or flat [a, b] arrays.
// Keys are addressed as "section.key".

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gather/annotate.hpp"
#include "gather/error.hpp"
#include "gather/graph_store.hpp"
#include "gather/text.hpp"

namespace gather {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view content, std::string_view label = "config") {
        KeyValueConfig cfg;
        std::string section;
        std::size_t line_no = 0, pos = 0;
        while (pos < content.size()) {
            auto end = content.find('\n', pos);
            if (end == std::string_view::npos) end = content.size();
            auto line = strip_comment(content.substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (line.empty()) continue;
            auto where = std::string(label) + ":" + std::to_string(line_no);
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(where + ": malformed section header");
                section = std::string(text::trim(line.substr(1, line.size() - 2)));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
            auto key = std::string(text::trim(line.substr(0, eq)));
            if (key.empty()) throw ConfigError(where + ": empty key");
            cfg.values_[section.empty() ? key : section + "." + key] = parse_value(text::trim(line.substr(eq + 1)), where);
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& path) {
        std::string content;
        try {
            content = detail::read_file(path);
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
        return parse(content, path.filename().string());
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        if (it->second.size() != 1) throw ConfigError("'" + key + "' must be a single value");
        return it->second.front();
    }

    std::optional<std::vector<std::string>> list(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<double> number(const std::string& key) const {
        auto s = string(key);
        if (!s) return std::nullopt;
        return to_number(key, *s);
    }

    std::optional<bool> boolean(const std::string& key) const {
        auto s = string(key);
        if (!s) return std::nullopt;
        if (*s == "true") return true;
        if (*s == "false") return false;
        throw ConfigError("'" + key + "' must be true or false");
    }

    const std::map<std::string, std::vector<std::string>>& values() const noexcept { return values_; }

    static double to_number(const std::string& key, const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("'" + key + "' must be numeric, got '" + s + "'");
        }
    }

private:
    static std::string_view strip_comment(std::string_view line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) return text::trim(line.substr(0, i));
        }
        return text::trim(line);
    }

    static std::string scalar(std::string_view v, const std::string& where) {
        v = text::trim(v);
        if (v.size() >= 2 && v.front() == '"') {
            if (v.back() != '"') throw ConfigError(where + ": unterminated string");
            return std::string(v.substr(1, v.size() - 2));
        }
        if (v.empty()) throw ConfigError(where + ": empty value");
        return std::string(v);
    }

    static std::vector<std::string> parse_value(std::string_view v, const std::string& where) {
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']') throw ConfigError(where + ": unterminated array");
            std::vector<std::string> out;
            auto inner = text::trim(v.substr(1, v.size() - 2));
            if (inner.empty()) return out;
            for (auto item : text::split(inner, ',')) out.push_back(scalar(item, where));
            return out;
        }
        return {scalar(v, where)};
    }

    std::map<std::string, std::vector<std::string>> values_;
};

struct RunConfig {
    std::filesystem::path graph_nodes, graph_edges, obo, dataset, out_dir = "gather-out";
    std::optional<std::vector<std::string>> semantic_types;
    AnnotateConfig annotate;
    HttpClientConfig http;
    unsigned jobs = 1;
    std::uint64_t seed = 1;

    SemanticTypeSet types() const {
        return semantic_types ? SemanticTypeSet(*semantic_types) : SemanticTypeSet::defaults();
    }

    void validate() const { annotate.retrieval.validate(); }

    /// Overlays values from a key/value file onto the defaults. Relative
    /// paths are taken relative to base_dir (the config file's directory).
    void apply(const KeyValueConfig& kv, const std::filesystem::path& base_dir = {}) {
        auto path = [&](const std::string& v) {
            std::filesystem::path p(v);
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        if (auto v = kv.string("graph.nodes")) graph_nodes = path(*v);
        if (auto v = kv.string("graph.edges")) graph_edges = path(*v);
        if (auto v = kv.list("graph.semantic_types")) semantic_types = *v;
        if (auto v = kv.string("ontology.obo")) obo = path(*v);
        if (auto v = kv.string("dataset.path")) dataset = path(*v);
        if (auto v = kv.string("output.dir")) out_dir = path(*v);

        auto& r = annotate.retrieval;
        if (auto v = kv.number("traversal.k")) r.traversal.k = static_cast<int>(*v);
        if (auto v = kv.string("traversal.target_type")) r.traversal.target_type = *v;
        if (auto v = kv.boolean("traversal.type_alternation")) r.traversal.enforce_type_alternation = *v;
        if (auto v = kv.number("scoring.gamma")) r.scoring.gamma = *v;
        if (auto v = kv.list("scoring.alpha")) {
            std::vector<double> alpha;
            for (const auto& s : *v) alpha.push_back(KeyValueConfig::to_number("scoring.alpha", s));
            r.scoring.alpha = std::move(alpha);
        }
        if (auto v = kv.number("scoring.top_k")) r.scoring.top_k = static_cast<int>(*v);
        if (auto v = kv.list("grounding.housekeeping_prefixes")) r.filter.housekeeping_prefixes = *v;
        if (auto v = kv.boolean("grounding.case_sensitive")) r.filter.case_sensitive = *v;

        if (auto v = kv.string("annotate.base_url")) http.base_url = *v;
        if (auto v = kv.string("annotate.token_env")) http.token_env = *v;
        if (auto v = kv.number("annotate.timeout_ms")) http.timeout_ms = static_cast<int>(*v);
        if (auto v = kv.string("annotate.model")) annotate.model.model = *v;
        if (auto v = kv.number("annotate.temperature")) annotate.model.temperature = *v;
        if (auto v = kv.boolean("annotate.include_paths")) annotate.include_paths = *v;
        if (auto v = kv.boolean("annotate.label_hint")) annotate.label_hint = *v;
        if (auto v = kv.boolean("annotate.dry_run")) annotate.dry_run = *v;
        if (auto v = kv.number("annotate.max_in_flight")) annotate.max_in_flight = static_cast<unsigned>(*v);
        if (auto v = kv.number("annotate.retries")) annotate.max_retries = static_cast<int>(*v);
        if (auto v = kv.string("annotate.prompt_version")) annotate.prompt.version = *v;
        if (auto v = kv.string("annotate.system_prompt")) annotate.prompt.system = *v;
        if (auto v = kv.string("annotate.instruction")) annotate.prompt.instruction = *v;
        if (auto v = kv.number("run.jobs")) jobs = static_cast<unsigned>(*v);
        if (auto v = kv.number("run.seed")) seed = static_cast<std::uint64_t>(*v);

        for (const char* secret : {"annotate.token", "annotate.api_key"})
            if (kv.has(secret))
                throw ConfigError(std::string("'") + secret + "': put the token in the environment variable named by "
                                  "annotate.token_env instead");
    }
};

}  // namespace gather
