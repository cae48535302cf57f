#pragma once
// Stages 2 and 3: gene weighting and convergence scoring.
//
//   w_rank(g) = 1 / log2(rank(g) + 2)            rank zero-based, pre-filter
//   w_idf(g)  = ln(|T| / df(g) + 1)              |T| = candidates of this table
//   Score(t)  = sum_h alpha_h * sum_{g in S_h(t)} w_rank(g) * w_idf(g)
//
// Summation order is fixed (hop ascending, then rank ascending) so scores are
// bit-identical regardless of how the table was produced.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gather/error.hpp"
#include "gather/grounding.hpp"
#include "gather/traversal.hpp"

namespace gather {

struct ScoringConfig {
    std::optional<std::vector<double>> alpha;  // explicit alpha_1..alpha_k; wins over gamma
    double gamma = 0.5;                        // alpha_h = gamma^(h-1)
    int top_k = 10;

    void validate() const {
        if (top_k < 1) throw ConfigError("top-K must be >= 1, got " + std::to_string(top_k));
        if (alpha) {
            if (alpha->empty()) throw ConfigError("alpha list is empty");
            for (std::size_t i = 0; i < alpha->size(); ++i) {
                if (!((*alpha)[i] > 0.0) || !std::isfinite((*alpha)[i]))
                    throw ConfigError("hop weights must be positive and finite");
                if (i > 0 && (*alpha)[i] > (*alpha)[i - 1])
                    throw ConfigError("hop weights must be non-increasing in hop distance");
            }
        } else if (!(gamma > 0.0 && gamma <= 1.0)) {
            throw ConfigError("hop decay gamma must lie in (0, 1], got " + std::to_string(gamma));
        }
    }

    /// alpha_1..alpha_k for a traversal horizon k.
    std::vector<double> hop_weights(int k) const {
        validate();
        std::vector<double> w;
        if (alpha) {
            if (static_cast<int>(alpha->size()) < k)
                throw ConfigError("alpha lists " + std::to_string(alpha->size()) + " hop weights but k = " +
                                  std::to_string(k));
            w.assign(alpha->begin(), alpha->begin() + k);
        } else {
            double a = 1.0;
            for (int h = 0; h < k; ++h, a *= gamma) w.push_back(a);
        }
        return w;
    }
};

inline double rank_weight(int rank) {
    if (rank < 0) throw std::invalid_argument("rank must be >= 0, got " + std::to_string(rank));
    return 1.0 / std::log2(static_cast<double>(rank) + 2.0);
}

inline double idf_weight(std::size_t df, std::size_t t_size) {
    if (t_size < 1) throw std::invalid_argument("candidate set must be non-empty");
    if (df == 0 || df > t_size)
        throw std::invalid_argument("df must lie in [1, |T|]; got df=" + std::to_string(df) +
                                    ", |T|=" + std::to_string(t_size));
    return std::log(static_cast<double>(t_size) / static_cast<double>(df) + 1.0);
}

struct GeneWeight {
    int rank = 0;
    std::size_t df = 0;
    double w_rank = 0.0;
    double w_idf = 0.0;
    double combined = 0.0;
};

/// Weights for every grounded gene with df > 0. Genes reaching no target are
/// reported in `unreached` instead.
struct GeneWeights {
    std::vector<GeneWeight> weights;  // ascending rank
    std::vector<int> unreached;

    const GeneWeight& at_rank(int rank) const {
        auto it = std::lower_bound(weights.begin(), weights.end(), rank,
                                   [](const GeneWeight& w, int r) { return w.rank < r; });
        if (it == weights.end() || it->rank != rank)
            throw std::out_of_range("no weight for rank " + std::to_string(rank));
        return *it;
    }
};

inline GeneWeights compute_gene_weights(const SupportTable& table) {
    GeneWeights out;
    const auto t_size = table.candidate_count();
    for (std::size_t i = 0; i < table.source_count(); ++i) {
        const auto df = table.df[i];
        const int rank = table.gene_ranks[i];
        if (df == 0) {
            out.unreached.push_back(rank);
            continue;
        }
        GeneWeight w{rank, df, rank_weight(rank), idf_weight(df, t_size), 0.0};
        w.combined = w.w_rank * w.w_idf;
        out.weights.push_back(w);
    }
    return out;
}

struct Supporter {
    std::string symbol;
    int rank = 0;
    double weight = 0.0;  // combined w_rank * w_idf
};

struct ScoredCandidate {
    NodeIndex target = 0;
    std::string target_id;
    double score = 0.0;
    std::vector<std::vector<Supporter>> supporters;  // supporters[h - 1], ascending rank
    std::size_t supporter_count = 0;
};

inline void check_consistent(const SupportTable& table, const GroundedGeneSet& grounded) {
    if (table.source_count() != grounded.size())
        throw DataError("support table covers " + std::to_string(table.source_count()) +
                        " genes but the grounded set has " + std::to_string(grounded.size()));
    for (std::size_t i = 0; i < grounded.size(); ++i)
        if (table.gene_ranks[i] != grounded.genes[i].rank)
            throw DataError("support table and grounded set disagree on gene ranks");
}

/// Every candidate with its Score(t), sorted by score descending then id ascending.
inline std::vector<ScoredCandidate> score_candidates(const SupportTable& table, const GroundedGeneSet& grounded,
                                                     const ScoringConfig& config = {}) {
    check_consistent(table, grounded);
    const auto alpha = config.hop_weights(table.k);
    const auto weights = compute_gene_weights(table);

    std::vector<ScoredCandidate> out;
    out.reserve(table.candidate_count());
    for (const auto& t : table.targets) {
        ScoredCandidate c;
        c.target = t.target;
        c.target_id = t.target_id;
        c.supporters.resize(t.bins.size());
        for (std::size_t h = 0; h < t.bins.size(); ++h) {
            double hop_sum = 0.0;
            for (int rank : t.bins[h]) {
                const auto& w = weights.at_rank(rank);
                hop_sum += w.combined;
                c.supporters[h].push_back({grounded.find_rank(rank)->symbol, rank, w.combined});
            }
            c.score += alpha[h] * hop_sum;
            c.supporter_count += t.bins[h].size();
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.target_id < b.target_id;
    });
    return out;
}

inline std::vector<ScoredCandidate> select_top_k(std::vector<ScoredCandidate> ranked, int k) {
    if (k < 1) throw std::invalid_argument("K must be >= 1, got " + std::to_string(k));
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

}  // namespace gather
