// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>
#include <set>

#include "augmine/aug/build.hpp"
#include "augmine/aug/graph.hpp"
#include "augmine/java/parser.hpp"
#include "graph_gen.hpp"
#include "test_util.hpp"

using namespace augmine;
using namespace augmine::aug;

namespace {

const java::MethodDecl& method_named(const java::CompilationUnit& unit, const std::string& name) {
    for (const java::MethodSite& site : java::all_method_sites(unit)) {
        if (site.method->name == name) return *site.method;
    }
    throw std::runtime_error("no method " + name);
}

Aug build_from(const std::string& source, const std::string& method) {
    static std::vector<std::unique_ptr<java::CompilationUnit>> keep_alive;
    keep_alive.push_back(std::make_unique<java::CompilationUnit>(
        java::parse_compilation_unit(source)));
    return build_aug(method_named(*keep_alive.back(), method), *keep_alive.back());
}

std::multiset<std::string> node_set(const Aug& g) {
    std::multiset<std::string> out;
    for (const Node& n : g.nodes) {
        out.insert(std::string(to_string(n.kind)) + ":" + n.label);
    }
    return out;
}

std::multiset<std::string> edge_set(const Aug& g) {
    std::multiset<std::string> out;
    for (const Edge& e : g.edges) {
        out.insert(g.nodes[e.src].label + ">" + to_string(e.kind) + ">" + g.nodes[e.dst].label);
    }
    return out;
}

} // namespace

TEST_CASE("sample listing graph matches the documented shape") {
    Aug g = build_from(
        "import some.pkg.SampleClass;\n"
        "class Holder {\n"
        "    Integer myFancyMethod() {\n"
        "        SampleClass sampleObj = new SampleClass();\n"
        "        return sampleObj.doSomething();\n"
        "    }\n"
        "}\n",
        "myFancyMethod");

    CHECK(node_set(g) == std::multiset<std::string>{
                             "action:<init>", "data:SampleClass", "action:doSomething",
                             "data:UNKNOWN", "action:<return>"});
    CHECK(edge_set(g) == std::multiset<std::string>{
                             "<init>>def>SampleClass", "<init>>order>doSomething",
                             "SampleClass>recv>doSomething", "doSomething>def>UNKNOWN",
                             "doSomething>order><return>", "UNKNOWN>para><return>"});
}

TEST_CASE("two-statement usage yields the minimal 3-node graph") {
    Aug g = build_from("import p.A;\nclass C { void m() { A a = new A(); a.m(); } }", "m");
    CHECK(g.nodes.size() == 3);
    CHECK(g.edges.size() == 3);
    CHECK(node_set(g) == std::multiset<std::string>{"action:<init>", "data:A", "action:m"});
    CHECK(edge_set(g) == std::multiset<std::string>{"<init>>def>A", "A>recv>m", "<init>>order>m"});
}

TEST_CASE("empty body yields an empty graph") {
    Aug g = build_from("class C { void m() {} }", "m");
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
}

TEST_CASE("argument data nodes get para edges") {
    Aug g = build_from(
        "import p.A;\nimport p.B;\n"
        "class C { void m(B b) { A a = new A(b); a.use(b); } }",
        "m");
    auto edges = edge_set(g);
    CHECK(edges.count("B>para><init>") == 1);
    CHECK(edges.count("B>para>use") == 1);
    CHECK(edges.count("A>recv>use") == 1);
}

TEST_CASE("static calls take no receiver edge") {
    Aug g = build_from(
        "import p.Util;\nclass C { void m() { Util.helper(); } }", "m");
    CHECK(node_set(g) == std::multiset<std::string>{"action:helper"});
    CHECK(g.edges.empty());
}

TEST_CASE("unknown receivers become UNKNOWN data nodes") {
    Aug g = build_from("class C { void m() { System.out.println(); } }", "m");
    CHECK(node_set(g) == std::multiset<std::string>{"data:UNKNOWN", "action:println"});
    CHECK(edge_set(g) == std::multiset<std::string>{"UNKNOWN>recv>println"});
}

TEST_CASE("order chain follows source order across control flow") {
    Aug g = build_from(
        "import p.A;\n"
        "class C { void m(A a) { a.first(); if (a != null) { a.second(); } a.third(); } }",
        "m");
    std::vector<std::string> actions;
    std::map<int, int> order_out, order_in;
    for (const Edge& e : g.edges) {
        if (e.kind == EdgeKind::Order) {
            ++order_out[e.src];
            ++order_in[e.dst];
            CHECK(e.src < e.dst); // creation order implies acyclicity
        }
    }
    for (const auto& [id, count] : order_out) CHECK(count == 1);
    for (const auto& [id, count] : order_in) CHECK(count == 1);
    for (const Node& n : g.nodes) {
        if (n.kind == NodeKind::Action) actions.push_back(n.label);
    }
    CHECK(actions == std::vector<std::string>{"first", "second", "third"});
}

TEST_CASE("def and recv multiplicity invariants hold on the fixture corpus") {
    namespace fs = std::filesystem;
    int graphs = 0;
    for (const auto& entry : fs::directory_iterator(testutil::fixture_dir() / "javacorpus")) {
        if (entry.path().extension() != ".java") continue;
        auto unit = java::parse_compilation_unit(testutil::read_file(entry.path()));
        for (const java::MethodSite& site : java::all_method_sites(unit)) {
            Aug g = build_aug(*site.method, unit);
            std::map<int, int> def_in, recv_in;
            for (const Edge& e : g.edges) {
                CHECK(e.src >= 0);
                CHECK(e.dst < static_cast<int>(g.nodes.size()));
                if (e.kind == EdgeKind::Def) {
                    CHECK(g.nodes[e.src].kind == NodeKind::Action);
                    CHECK(g.nodes[e.dst].kind == NodeKind::Data);
                    ++def_in[e.dst];
                }
                if (e.kind == EdgeKind::Recv) {
                    CHECK(g.nodes[e.src].kind == NodeKind::Data);
                    CHECK(g.nodes[e.dst].kind == NodeKind::Action);
                    ++recv_in[e.dst];
                }
                if (e.kind == EdgeKind::Para) {
                    CHECK(g.nodes[e.src].kind == NodeKind::Data);
                    CHECK(g.nodes[e.dst].kind == NodeKind::Action);
                }
                if (e.kind == EdgeKind::Order) {
                    CHECK(e.src != e.dst);
                    CHECK(g.nodes[e.src].kind == NodeKind::Action);
                    CHECK(g.nodes[e.dst].kind == NodeKind::Action);
                }
            }
            for (const auto& [id, count] : def_in) CHECK(count <= 1);
            for (const auto& [id, count] : recv_in) CHECK(count <= 1);
            for (const Node& n : g.nodes) CHECK_FALSE(n.label.empty());
            ++graphs;
        }
    }
    CHECK(graphs > 10);
}

TEST_CASE("builder is deterministic") {
    auto source = testutil::read_file(testutil::fixture_dir() / "javacorpus/Widget.java");
    auto unit = java::parse_compilation_unit(source);
    const java::MethodDecl& m = method_named(unit, "render");
    CHECK(to_text(build_aug(m, unit)) == to_text(build_aug(m, unit)));
}

TEST_CASE("text format round-trips bit-exactly") {
    Aug g;
    g.method_ref = {"dir/Some File.java", "weird method%name", 7};
    int a = g.add_node(NodeKind::Action, "<init>");
    int b = g.add_node(NodeKind::Data, "Some Type");
    int c = g.add_node(NodeKind::Action, "do%thing");
    g.add_edge(a, b, EdgeKind::Def);
    g.add_edge(b, c, EdgeKind::Recv);
    g.add_edge(a, c, EdgeKind::Order);

    std::string text = to_text(g);
    std::vector<Aug> parsed = parse_augs(text);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].method_ref.doc_id == "dir/Some File.java");
    CHECK(parsed[0].method_ref.method_name == "weird method%name");
    CHECK(to_text(parsed[0]) == text);

    // multiple graphs in one stream
    std::vector<Aug> two = {g, parsed[0]};
    CHECK(parse_augs(to_text(two)).size() == 2);
}

TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS(parse_augs("N 0 action x\n"), FormatError);
    CHECK_THROWS_AS(parse_augs("AUG a m 0\nN 1 action x\n"), FormatError);
    CHECK_THROWS_AS(parse_augs("AUG a m 0\nN 0 widget x\n"), FormatError);
    CHECK_THROWS_AS(parse_augs("AUG a m 0\nN 0 action x\nE 0 5 def\n"), FormatError);
}

TEST_CASE("dot export mentions every node and edge kind") {
    Aug g;
    g.add_node(NodeKind::Action, "<init>");
    g.add_node(NodeKind::Data, "A");
    g.add_edge(0, 1, EdgeKind::Def);
    std::string dot = to_dot(g);
    CHECK(dot.find("shape=box") != std::string::npos);
    CHECK(dot.find("shape=ellipse") != std::string::npos);
    CHECK(dot.find("def") != std::string::npos);
    CHECK(dot.find("digraph") != std::string::npos);
}

TEST_CASE("relaxed containment basics") {
    Aug g = build_from("import p.A;\nclass C { void m() { A a = new A(); a.m(); } }", "m");
    CHECK(contains_relaxed(g, g));

    Aug sub;
    sub.add_node(NodeKind::Action, "<init>");
    sub.add_node(NodeKind::Data, "A");
    sub.add_edge(0, 1, EdgeKind::Def);
    CHECK(contains_relaxed(sub, g));

    Aug absent;
    absent.add_node(NodeKind::Action, "close");
    CHECK_FALSE(contains_relaxed(absent, g));

    // same label as data instead of action: kind matters for nodes
    Aug wrong_kind;
    wrong_kind.add_node(NodeKind::Data, "m");
    CHECK_FALSE(contains_relaxed(wrong_kind, g));
}

namespace {

// pattern needs two data nodes each feeding its own action; the candidate
// feeds both actions from one node. Multisets agree, structure does not.
std::pair<Aug, Aug> overestimation_pair() {
    Aug pattern;
    int d1 = pattern.add_node(NodeKind::Data, "X");
    int d2 = pattern.add_node(NodeKind::Data, "X");
    int a1 = pattern.add_node(NodeKind::Action, "f");
    int a2 = pattern.add_node(NodeKind::Action, "f");
    pattern.add_edge(d1, a1, EdgeKind::Para);
    pattern.add_edge(d2, a2, EdgeKind::Para);

    Aug candidate;
    int e1 = candidate.add_node(NodeKind::Data, "X");
    candidate.add_node(NodeKind::Data, "X");
    int b1 = candidate.add_node(NodeKind::Action, "f");
    int b2 = candidate.add_node(NodeKind::Action, "f");
    candidate.add_edge(e1, b1, EdgeKind::Para);
    candidate.add_edge(e1, b2, EdgeKind::Para);
    return {std::move(pattern), std::move(candidate)};
}

} // namespace

TEST_CASE("relaxation overestimates: multiset-contained but not isomorphic") {
    auto [pattern, candidate] = overestimation_pair();
    CHECK(contains_relaxed(pattern, candidate));
    CHECK_FALSE(exact_subgraph_oracle(pattern, candidate));
    // and the multiset views collide
    CHECK(canonical_multiset_key(pattern) == canonical_multiset_key(candidate));
}

TEST_CASE("exact containment implies relaxed containment on random pairs") {
    testutil::Rng rng(20260816);
    int exact_hits = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Aug pattern = graph_gen::random_aug(rng, 5);
        Aug candidate = graph_gen::random_aug(rng, 8);
        if (exact_subgraph_oracle(pattern, candidate)) {
            ++exact_hits;
            CHECK(contains_relaxed(pattern, candidate));
        }
    }
    CHECK(exact_hits > 20); // the property must actually be exercised
}

TEST_CASE("exact oracle finds real embeddings and enforces its size guard") {
    Aug g = build_from("import p.A;\nclass C { void m() { A a = new A(); a.m(); } }", "m");
    CHECK(exact_subgraph_oracle(g, g));

    Aug single;
    single.add_node(NodeKind::Data, "A");
    CHECK(exact_subgraph_oracle(single, g));

    Aug big;
    for (int i = 0; i < 11; ++i) big.add_node(NodeKind::Action, "a" + std::to_string(i));
    CHECK_THROWS_AS(exact_subgraph_oracle(big, g), SizeLimitExceeded);
}
