#include <gtest/gtest.h>

#include <random>

#include "gather/grounding.hpp"
#include "test_support.hpp"

using namespace gather;

namespace {

PropertyGraph gene_graph(int n_genes) {
    std::vector<NodeRecord> nodes;
    for (int i = 0; i < n_genes; ++i) {
        auto sym = "GENE" + std::to_string(i);
        nodes.push_back({"HGNC:" + std::to_string(10000 + i), "Gene", sym, {"ALIAS" + std::to_string(i)}});
    }
    nodes.push_back({"HGNC:RPL13", "Gene", "RPL13", {}});
    nodes.push_back({"HGNC:MTCO1", "Gene", "MT-CO1", {}});
    nodes.push_back({"CL:0000084", "CellType", "T cell", {}});
    return build_graph(nodes, {});
}

}  // namespace

TEST(Grounding, HousekeepingGenesDroppedRanksPreserved) {
    auto g = gene_graph(60);
    CellSentence s{"c1", {}, std::nullopt};
    for (int i = 0; i < 48; ++i) s.gene_symbols.push_back("GENE" + std::to_string(i));
    s.gene_symbols.insert(s.gene_symbols.begin() + 3, "RPL13");
    s.gene_symbols.insert(s.gene_symbols.begin() + 20, "MT-CO1");
    ASSERT_EQ(s.gene_symbols.size(), 50u);

    auto r = ground(s, g);
    ASSERT_EQ(r.size(), 48u);
    ASSERT_EQ(r.dropped.size(), 2u);
    EXPECT_EQ(r.dropped[0].symbol, "RPL13");
    EXPECT_EQ(r.dropped[0].rank, 3);
    EXPECT_EQ(r.dropped[0].reason, DropReason::housekeeping);
    EXPECT_EQ(r.dropped[1].rank, 20);
    // Surviving genes keep their original positions.
    EXPECT_EQ(r.genes[2].rank, 2);
    EXPECT_EQ(r.genes[3].rank, 4);
    EXPECT_EQ(r.genes[3].symbol, "GENE3");
    EXPECT_EQ(r.genes.back().rank, 49);
    EXPECT_EQ(r.find_rank(4)->symbol, "GENE3");
    EXPECT_EQ(r.find_rank(3), nullptr);
}

TEST(Grounding, UnmatchedSymbolsAreSkippedWithoutFailing) {
    auto g = gene_graph(5);
    auto r = ground({"c", {"GENE1", "NOTAGENE", "GENE2"}, std::nullopt}, g);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r.genes[1].rank, 2);
    ASSERT_EQ(r.dropped.size(), 1u);
    EXPECT_EQ(r.dropped[0].reason, DropReason::unmatched);
}

TEST(Grounding, MatchingIsCaseInsensitiveAndUsesSynonymsAndIds) {
    auto g = gene_graph(5);
    auto r = ground({"c", {"gene1", "ALIAS2", "hgnc:10003", "T cell"}, std::nullopt}, g);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r.genes[0].node_id, "HGNC:10001");
    EXPECT_EQ(r.genes[1].node_id, "HGNC:10002");
    EXPECT_EQ(r.genes[2].node_id, "HGNC:10003");
    // Non-gene nodes are never grounding targets.
    EXPECT_EQ(r.dropped.back().reason, DropReason::unmatched);
}

TEST(Grounding, CanonicalNameBeatsSynonym) {
    auto g = build_graph(std::vector<NodeRecord>{{"G:1", "Gene", "ABC", {"XYZ"}}, {"G:2", "Gene", "XYZ", {}}}, {});
    auto r = ground({"c", {"XYZ"}, std::nullopt}, g);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.genes[0].node_id, "G:2");
}

TEST(Grounding, SecondSymbolForSameNodeIsDropped) {
    auto g = gene_graph(5);
    auto r = ground({"c", {"GENE1", "ALIAS1"}, std::nullopt}, g);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.dropped[0].reason, DropReason::duplicate_node);
    EXPECT_EQ(r.dropped[0].rank, 1);
}

TEST(Grounding, AmbiguousSymbolPicksSmallestIdAndWarns) {
    auto g = build_graph(std::vector<NodeRecord>{{"G:2", "Gene", "X", {"SHARED"}}, {"G:1", "Gene", "Y", {"SHARED"}}}, {});
    auto r = ground({"c", {"SHARED"}, std::nullopt}, g);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r.genes[0].node_id, "G:1");
    ASSERT_EQ(r.warnings.size(), 1u);
}

TEST(Grounding, HousekeepingFilterIsConfigurable) {
    auto g = gene_graph(5);
    FilterConfig f;
    f.housekeeping_prefixes = {"GENE1"};
    auto r = ground({"c", {"RPL13", "GENE1", "GENE2"}, std::nullopt}, g, f);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r.genes[0].symbol, "RPL13");
    f.case_sensitive = true;
    f.housekeeping_prefixes = {"rpl"};
    EXPECT_EQ(ground({"c", {"RPL13"}, std::nullopt}, g, f).size(), 1u);
    f.housekeeping_prefixes = {""};
    EXPECT_THROW(f.validate(), ConfigError);
}

TEST(Grounding, RanksAreStrictlyIncreasingSubsetOfInput) {
    auto g = gene_graph(40);
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        CellSentence s{"c", {}, std::nullopt};
        std::set<std::string> used;
        const int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            std::string sym;
            switch (rng() % 4) {
                case 0: sym = "RPL" + std::to_string(rng() % 50); break;
                case 1: sym = "UNK" + std::to_string(rng() % 50); break;
                case 2: sym = "ALIAS" + std::to_string(rng() % 45); break;
                default: sym = "GENE" + std::to_string(rng() % 45); break;
            }
            if (used.insert(sym).second) s.gene_symbols.push_back(sym);
        }
        auto r = ground(s, g);
        for (std::size_t i = 0; i < r.genes.size(); ++i) {
            const auto& gg = r.genes[i];
            ASSERT_EQ(s.gene_symbols[static_cast<std::size_t>(gg.rank)], gg.symbol);
            if (i) {
                ASSERT_LT(r.genes[i - 1].rank, gg.rank);
            }
        }
        ASSERT_EQ(r.genes.size() + r.dropped.size(), s.gene_symbols.size());
    }
}

TEST(Grounding, ParsesJsonLines) {
    auto v = parse_cell_sentences_text(
        "{\"cell_id\":\"a\",\"genes\":[\"CD3E\",\"CD2\"],\"label\":\"T cell\"}\n"
        "\n"
        "{\"cell_id\":\"b\",\"genes\":[\"MS4A1\"],\"label\":null}\n"
        "{\"cell_id\":\"c\",\"genes\":[\"MS4A1\"]}\n");
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].gold_label, "T cell");
    EXPECT_EQ(v[0].gene_symbols[1], "CD2");
    EXPECT_FALSE(v[1].gold_label);
    EXPECT_FALSE(v[2].gold_label);
    EXPECT_EQ(parse_cell_sentence(to_jsonl_line(v[0])).gene_symbols, v[0].gene_symbols);
}

TEST(Grounding, RejectsMalformedSentences) {
    auto err = [](const std::string& text) {
        try {
            parse_cell_sentences_text(text);
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(err("{not json}\n").find("dataset:1"), std::string::npos);
    EXPECT_NE(err("{\"genes\":[\"A\"]}\n").find("cell_id"), std::string::npos);
    EXPECT_NE(err("{\"cell_id\":\"a\",\"genes\":[]}\n").find("empty gene list"), std::string::npos);
    EXPECT_NE(err("{\"cell_id\":\"a\",\"genes\":[\"A\",\"A\"]}\n").find("duplicate gene"), std::string::npos);
    EXPECT_NE(err("{\"cell_id\":\"a\",\"genes\":[\"A\"]}\n{\"cell_id\":\"a\",\"genes\":[\"B\"]}\n")
                  .find("dataset:2: duplicate cell_id"),
              std::string::npos);
    EXPECT_NE(err("{\"cell_id\":\"a\",\"genes\":[1]}\n").find("strings"), std::string::npos);
}
