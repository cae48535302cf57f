#include <gtest/gtest.h>

#include <random>

#include "gather/obo_ontology.hpp"
#include "oracle/brute_force.hpp"

using namespace gather;

namespace {

const char* kDiamond = R"(format-version: 1.2
ontology: toy

[Term]
id: T:A
name: root thing

[Term]
id: T:B
name: left
is_a: T:A ! root thing

[Term]
id: T:C
name: right
is_a: T:A
synonym: "right-hand thing" EXACT []

[Term]
id: T:D
name: bottom
is_a: T:B
is_a: T:C {source="x"}

[Typedef]
id: part_of
name: part of
)";

std::string obo_error(const std::string& text) {
    try {
        parse_obo_text(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(OboOntology, DiamondClosure) {
    auto dag = parse_obo_text(kDiamond);
    EXPECT_EQ(dag.size(), 4u);
    EXPECT_EQ(dag.ancestors("T:D"), (std::set<std::string>{"T:A", "T:B", "T:C"}));
    EXPECT_EQ(dag.ancestors("T:B"), (std::set<std::string>{"T:A"}));
    EXPECT_TRUE(dag.ancestors("T:A").empty());
    EXPECT_EQ(dag.descendants("T:A"), (std::set<std::string>{"T:B", "T:C", "T:D"}));
    EXPECT_EQ(dag.term("T:D").parents, (std::vector<std::string>{"T:B", "T:C"}));
    EXPECT_FALSE(dag.contains("part_of"));
}

TEST(OboOntology, SamePathIsReflexiveAndSymmetric) {
    auto dag = parse_obo_text(kDiamond);
    EXPECT_TRUE(dag.on_same_path("T:D", "T:D"));
    EXPECT_TRUE(dag.on_same_path("T:D", "T:A"));
    EXPECT_TRUE(dag.on_same_path("T:A", "T:D"));
    EXPECT_FALSE(dag.on_same_path("T:B", "T:C"));
    EXPECT_THROW(dag.on_same_path("T:B", "T:Z"), std::out_of_range);
}

TEST(OboOntology, CycleIsRejected) {
    auto msg = obo_error("[Term]\nid: X:1\nname: one\nis_a: X:2\n\n[Term]\nid: X:2\nname: two\nis_a: X:1\n");
    EXPECT_NE(msg.find("cycle"), std::string::npos) << msg;
    EXPECT_NE(msg.find("X:1"), std::string::npos) << msg;
}

TEST(OboOntology, MalformedStanzasAreReported) {
    EXPECT_NE(obo_error("[Term]\nname: lonely\n").find("id"), std::string::npos);
    EXPECT_NE(obo_error("[Term]\nid: X:1\n").find("name"), std::string::npos);
    EXPECT_NE(obo_error("[Term]\nid: X:1\nname: a\nis_a: X:9\n").find("X:9"), std::string::npos);
    EXPECT_NE(obo_error("[Term]\nid: X:1\nname: a\n\n[Term]\nid: X:1\nname: b\n").find("duplicate"),
              std::string::npos);
    EXPECT_NE(obo_error("[Term]\nid: X:1\nname: a\nno colon here\n").find("malformed"), std::string::npos);
    EXPECT_NE(obo_error("[Term\nid: X:1\nname: a\n").find("malformed"), std::string::npos);
}

TEST(OboOntology, ResolveLabelTiers) {
    auto dag = parse_obo_text(kDiamond);
    EXPECT_EQ(dag.resolve_label("t:b"), "T:B");
    EXPECT_EQ(dag.resolve_label("  Bottom. "), "T:D");
    EXPECT_EQ(dag.resolve_label("Right-hand   thing"), "T:C");
    EXPECT_EQ(dag.resolve_label("nothing like it"), std::nullopt);
    EXPECT_EQ(dag.resolve_label(""), std::nullopt);
}

TEST(OboOntology, NameCollisionResolvesToSmallestId) {
    auto dag = parse_obo_text("[Term]\nid: X:2\nname: shared\n\n[Term]\nid: X:1\nname: Shared\n");
    EXPECT_EQ(dag.resolve_label("shared"), "X:1");
}

TEST(OboOntology, ExportsAsGraphRecords) {
    auto [nodes, edges] = ontology_graph_records(parse_obo_text(kDiamond));
    EXPECT_EQ(nodes.size(), 4u);
    EXPECT_EQ(edges.size(), 4u);
    auto g = build_graph(nodes, edges);
    EXPECT_EQ(g.neighbors("T:D").size(), 2u);
    EXPECT_EQ(g.neighbors("T:D").front().relation, "IS_A");
}

TEST(OboOntology, ClosureMatchesNaiveExpansionOnRandomDags) {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 50; ++round) {
        const int n = 2 + static_cast<int>(rng() % 60);
        std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
        std::vector<OntologyTerm> terms;
        for (int i = 0; i < n; ++i) {
            // Parents always have a smaller index, so the result is acyclic.
            for (int j = 0; j < i; ++j)
                if (rng() % 100 < 8) parents[static_cast<std::size_t>(i)].push_back(j);
            OntologyTerm t{"R:" + std::to_string(1000 + i), "term " + std::to_string(i), {}, {}};
            for (int p : parents[static_cast<std::size_t>(i)]) t.parents.push_back("R:" + std::to_string(1000 + p));
            terms.push_back(std::move(t));
        }
        auto dag = OntologyDag::from_terms(terms);
        auto closure = oracle::brute_closure(parents);
        for (int i = 0; i < n; ++i) {
            std::set<std::string> expected;
            for (int a : closure[static_cast<std::size_t>(i)]) expected.insert("R:" + std::to_string(1000 + a));
            ASSERT_EQ(dag.ancestors("R:" + std::to_string(1000 + i)), expected);
        }
    }
}
