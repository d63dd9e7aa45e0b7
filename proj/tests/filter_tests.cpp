// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "augmine/filter/filter.hpp"
#include "augmine/search/search.hpp"
#include "test_util.hpp"

using namespace augmine;
using filter::MatchMode;
using search::Origin;
using search::SourceDoc;

namespace {

SourceDoc doc_of(const std::string& text, const std::string& identity = "doc") {
    return {Origin::Internal, identity, text, 0};
}

std::set<std::string> kws(std::initializer_list<std::string> xs) { return {xs}; }

// Independent oracle: split the text into maximal identifier runs and test
// membership. For identifier-only keywords this is exactly whole-token match.
std::set<std::string> identifier_runs(const std::string& text) {
    const auto ident = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
    };
    std::set<std::string> runs;
    size_t i = 0;
    while (i < text.size()) {
        if (!ident(text[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && ident(text[j])) ++j;
        runs.insert(text.substr(i, j - i));
        i = j;
    }
    return runs;
}

// True when `needle` is a subsequence of `hay` compared by identity.
bool is_subsequence(const std::vector<SourceDoc>& needle, const std::vector<SourceDoc>& hay) {
    size_t h = 0;
    for (const auto& d : needle) {
        while (h < hay.size() && hay[h].identity != d.identity) ++h;
        if (h == hay.size()) return false;
        ++h;
    }
    return true;
}

} // namespace

TEST_CASE("satisfaction ratio follows the keyword-proportion formula") {
    const auto set4 = kws({"alpha", "bravo", "charlie", "delta"});

    SUBCASE("half the keywords present") {
        const auto r = filter::satisfaction_ratio(doc_of("alpha x; charlie y;"), set4);
        CHECK(r.found == 2);
        CHECK(r.total == 4);
        CHECK(r.value() == 0.5);
    }
    SUBCASE("all keywords present") {
        const auto r = filter::satisfaction_ratio(doc_of("alpha bravo charlie delta"), set4);
        CHECK(r.found == 4);
        CHECK(r.value() == 1.0);
    }
    SUBCASE("no keyword present") {
        const auto r = filter::satisfaction_ratio(doc_of("unrelated text entirely"), set4);
        CHECK(r.found == 0);
        CHECK(r.value() == 0.0);
    }
    SUBCASE("empty keyword set is rejected") {
        CHECK_THROWS_AS(filter::satisfaction_ratio(doc_of("x"), {}), filter::EmptyKeywordSet);
    }
    SUBCASE("value stays within [0,1] and is invariant under set reordering") {
        // std::set already canonicalizes order; build from two insert orders.
        std::set<std::string> a{"x", "y", "z"};
        std::set<std::string> b{"z", "x", "y"};
        const auto ra = filter::satisfaction_ratio(doc_of("y q z"), a);
        const auto rb = filter::satisfaction_ratio(doc_of("y q z"), b);
        CHECK(ra.found == rb.found);
        CHECK(ra.total == rb.total);
        CHECK(ra.value() >= 0.0);
        CHECK(ra.value() <= 1.0);
    }
}

TEST_CASE("whole-token containment respects identifier boundaries") {
    CHECK(filter::contains_keyword("x.set(1);", "set"));
    CHECK(filter::contains_keyword("set", "set"));
    CHECK(filter::contains_keyword("a set b", "set"));
    CHECK_FALSE(filter::contains_keyword("setValue", "set"));
    CHECK_FALSE(filter::contains_keyword("reset", "set"));
    CHECK_FALSE(filter::contains_keyword("set1", "set"));
    CHECK_FALSE(filter::contains_keyword("_set", "set"));
    CHECK_FALSE(filter::contains_keyword("$set", "set"));
    CHECK_FALSE(filter::contains_keyword("set$", "set"));
    CHECK(filter::contains_keyword("setValue set", "set")); // later occurrence counts
    CHECK_FALSE(filter::contains_keyword("anything", ""));

    SUBCASE("dotted keywords bound at the dots") {
        CHECK(filter::contains_keyword("import a.b.c;", "a.b.c"));
        CHECK_FALSE(filter::contains_keyword("import xa.b.c;", "a.b.c"));
        CHECK_FALSE(filter::contains_keyword("import a.b.cd;", "a.b.c"));
    }
    SUBCASE("substring mode is the permissive reading") {
        CHECK(filter::contains_keyword("setValue", "set", MatchMode::Substring));
        CHECK_FALSE(filter::contains_keyword("sat", "set", MatchMode::Substring));
        const auto strict = filter::satisfaction_ratio(doc_of("setValue"), kws({"set"}));
        const auto loose =
            filter::satisfaction_ratio(doc_of("setValue"), kws({"set"}), MatchMode::Substring);
        CHECK(strict.found == 0);
        CHECK(loose.found == 1);
    }
}

TEST_CASE("randomized satisfaction ratios agree exactly with a token-run oracle") {
    const std::vector<std::string> vocab{"alpha", "beta",  "gamma", "delta", "epsilon",
                                         "set",   "reset", "value", "foo",   "bar9"};
    const std::vector<std::string> extras{"zeta", "omega_x", "missing$kw", "Q"};
    const std::vector<std::string> seps{" ", "\n", "(", ")", ";", ".", ",", "+", "\"", "", "_"};

    testutil::Rng rng(20260816ULL);
    const auto started = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        const int words = rng.pick(30, 80);
        for (int w = 0; w < words; ++w) {
            text += vocab[static_cast<size_t>(rng.pick(0, static_cast<int>(vocab.size()) - 1))];
            text += seps[static_cast<size_t>(rng.pick(0, static_cast<int>(seps.size()) - 1))];
        }
        std::set<std::string> kw_set;
        const int picks = rng.pick(4, 8);
        for (int k = 0; k < picks; ++k) {
            if (rng.pick(0, 3) == 0)
                kw_set.insert(
                    extras[static_cast<size_t>(rng.pick(0, static_cast<int>(extras.size()) - 1))]);
            else
                kw_set.insert(
                    vocab[static_cast<size_t>(rng.pick(0, static_cast<int>(vocab.size()) - 1))]);
        }

        const auto runs = identifier_runs(text);
        int oracle_found = 0;
        for (const auto& kw : kw_set)
            if (runs.count(kw)) ++oracle_found;

        const auto r = filter::satisfaction_ratio(doc_of(text), kw_set);
        REQUIRE(r.total == static_cast<int>(kw_set.size()));
        REQUIRE(r.found == oracle_found); // exact rational agreement, zero tolerance
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);
}

TEST_CASE("file filtering keeps order and honors the threshold exactly") {
    const auto kw_set = kws({"alpha", "bravo", "charlie", "delta"});
    const std::vector<SourceDoc> docs{
        doc_of("alpha bravo charlie delta", "full"),    // 4/4
        doc_of("alpha bravo charlie", "threequarters"), // 3/4
        doc_of("alpha bravo", "half"),                  // 2/4
        doc_of("alpha", "quarter"),                     // 1/4
        doc_of("nothing here", "zero"),                 // 0/4
    };

    SUBCASE("sr_min zero is the identity, even with an empty keyword set") {
        const auto same = filter::filter_files(docs, {}, 0.0);
        REQUIRE(same.size() == docs.size());
        for (size_t i = 0; i < docs.size(); ++i) CHECK(same[i].identity == docs[i].identity);
    }
    SUBCASE("sr_min one keeps only full satisfaction") {
        const auto kept = filter::filter_files(docs, kw_set, 1.0);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].identity == "full");
    }
    SUBCASE("boundary docs at the threshold are kept") {
        const auto kept = filter::filter_files(docs, kw_set, 0.25);
        REQUIRE(kept.size() == 4);
        CHECK(kept.back().identity == "quarter");
        const auto half = filter::filter_files(docs, kw_set, 0.5);
        REQUIRE(half.size() == 3);
        CHECK(half.back().identity == "half");
    }
    SUBCASE("mixed corpus at 0.5 equals a brute-force recomputation") {
        const auto kept = filter::filter_files(docs, kw_set, 0.5);
        std::vector<std::string> expected;
        for (const auto& d : docs) {
            const auto r = filter::satisfaction_ratio(d, kw_set);
            if (r.found * 2 >= r.total) expected.push_back(d.identity); // ratio >= 1/2 exactly
        }
        REQUIRE(kept.size() == expected.size());
        for (size_t i = 0; i < kept.size(); ++i) CHECK(kept[i].identity == expected[i]);
    }
    SUBCASE("decimal thresholds with no exact binary form still keep boundary docs") {
        std::vector<SourceDoc> ten;
        std::set<std::string> many;
        for (int i = 0; i < 10; ++i) many.insert("kw" + std::to_string(i));
        ten.push_back(doc_of("kw0", "one-of-ten")); // ratio exactly 0.1
        const auto kept = filter::filter_files(ten, many, 0.1);
        REQUIRE(kept.size() == 1);
    }
}

TEST_CASE("file filtering is monotone in the threshold and order preserving") {
    const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "eps", "zeta"};
    testutil::Rng rng(4242ULL);
    std::vector<SourceDoc> docs;
    for (int d = 0; d < 40; ++d) {
        std::string text;
        const int words = rng.pick(0, 12);
        for (int w = 0; w < words; ++w) {
            text += vocab[static_cast<size_t>(rng.pick(0, static_cast<int>(vocab.size()) - 1))];
            text += ' ';
        }
        docs.push_back(doc_of(text, "d" + std::to_string(d)));
    }
    const auto kw_set = kws({"alpha", "beta", "gamma", "delta"});

    const std::vector<double> grid{0.0, 0.25, 0.3, 0.5, 0.75, 1.0};
    std::vector<std::vector<SourceDoc>> results;
    for (const double sr : grid) results.push_back(filter::filter_files(docs, kw_set, sr));

    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(is_subsequence(results[i], docs));
        for (size_t j = i + 1; j < grid.size(); ++j) {
            // Higher threshold selects a subset.
            CHECK(is_subsequence(results[j], results[i]));
        }
    }
}

namespace {

const char* kTwoMethodDoc = R"(package demo;

import com.example.Service;

class Caller {
    void wanted() {
        Service s = new Service();
        s.doSomething();
    }

    void unrelated() {
        int count = 3;
        count += 1;
    }
}
)";

} // namespace

TEST_CASE("method filtering keeps methods that mention a keyword") {
    const std::vector<SourceDoc> docs{doc_of(kTwoMethodDoc, "Caller.java")};

    SUBCASE("only the method containing the keyword survives") {
        const auto result = filter::filter_methods(docs, kws({"doSomething"}));
        REQUIRE(result.methods.size() == 1);
        CHECK(result.methods[0].method_name == "wanted");
        CHECK(result.methods[0].doc_identity == "Caller.java");
        CHECK(result.methods[0].doc_index == 0);
        CHECK(result.diagnostics.empty());
    }
    SUBCASE("keywords disjoint from the vocabulary select nothing") {
        const auto result = filter::filter_methods(docs, kws({"absentEverywhere"}));
        CHECK(result.methods.empty());
    }
    SUBCASE("reserved words never count as keyword hits") {
        // Both methods use reserved words like void/int; neither is selected.
        const auto result = filter::filter_methods(docs, kws({"void", "int", "class"}));
        CHECK(result.methods.empty());
    }
    SUBCASE("string literal contents are not method tokens") {
        const std::vector<SourceDoc> lit{
            doc_of("class A { void m() { log(\"doSomething\"); } }", "Lit.java")};
        CHECK(filter::filter_methods(lit, kws({"doSomething"})).methods.empty());
        CHECK(filter::filter_methods(lit, kws({"log"})).methods.size() == 1);
    }
    SUBCASE("every selected method carries at least one keyword token") {
        const auto kw_set = kws({"Service", "count"});
        const auto result = filter::filter_methods(docs, kw_set);
        REQUIRE(result.methods.size() == 2);
        for (const auto& m : result.methods) {
            bool has = false;
            for (const auto& tok : m.tokens)
                if (kw_set.count(tok)) has = true;
            CHECK(has);
        }
    }
}

TEST_CASE("method filtering over a planted ten-method corpus matches the plan") {
    // Methods m0..m9; exactly m1, m3, m4, m8 mention a keyword.
    std::string src = "class Big {\n";
    for (int i = 0; i < 10; ++i) {
        const bool planted = i == 1 || i == 3 || i == 4 || i == 8;
        src += "    void m" + std::to_string(i) + "() { " +
               (planted ? std::string("target().run();") : std::string("plain();")) + " }\n";
    }
    src += "}\n";
    const std::vector<SourceDoc> docs{doc_of(src, "Big.java")};

    const auto result = filter::filter_methods(docs, kws({"target"}));
    std::vector<std::string> names;
    for (const auto& m : result.methods) names.push_back(m.method_name);
    CHECK(names == std::vector<std::string>{"m1", "m3", "m4", "m8"});

    SUBCASE("ordinals point back into the unparsed unit") {
        REQUIRE(result.methods.size() == 4);
        CHECK(result.methods[0].ordinal == 1);
        CHECK(result.methods[1].ordinal == 3);
        CHECK(result.methods[2].ordinal == 4);
        CHECK(result.methods[3].ordinal == 8);
    }
}

TEST_CASE("disabled method filter returns every method of every parseable doc") {
    const std::vector<SourceDoc> docs{
        doc_of(kTwoMethodDoc, "Caller.java"),
        doc_of("this is not java", "Broken.java"),
        doc_of("class B { void solo() {} }", "B.java"),
    };

    const auto all = filter::all_methods(docs);
    REQUIRE(all.methods.size() == 3);
    CHECK(all.methods[0].method_name == "wanted");
    CHECK(all.methods[1].method_name == "unrelated");
    CHECK(all.methods[2].method_name == "solo");
    CHECK(all.methods[2].doc_index == 2);
    REQUIRE(all.diagnostics.size() == 1);
    CHECK(all.diagnostics[0].find("Broken.java") != std::string::npos);

    SUBCASE("the enabled filter also skips unparseable docs with a diagnostic") {
        const auto result = filter::filter_methods(docs, kws({"doSomething"}));
        REQUIRE(result.methods.size() == 1);
        REQUIRE(result.diagnostics.size() == 1);
        CHECK(result.diagnostics[0].find("Broken.java") != std::string::npos);
    }
}

TEST_CASE("mean method satisfaction ratio is the arithmetic mean") {
    const std::vector<SourceDoc> docs{doc_of(kTwoMethodDoc, "Caller.java")};
    const auto all = filter::all_methods(docs);
    REQUIRE(all.methods.size() == 2);

    SUBCASE("one method containing all keywords scores 1.0") {
        const std::vector<filter::MethodSelection> one{all.methods[0]};
        CHECK(filter::mean_method_sr(one, kws({"Service", "doSomething"})) == 1.0);
    }
    SUBCASE("binary-exact ratios average exactly") {
        // kw set of 4: wanted() hits Service+doSomething (0.5), unrelated() hits
        // count (0.25); mean is 0.375.
        const auto kw_set = kws({"Service", "doSomething", "count", "absent"});
        CHECK(filter::mean_method_sr(all.methods, kw_set) == 0.375);
    }
    SUBCASE("the documented 0.2/0.4 example averages to 0.3") {
        const std::vector<SourceDoc> pair{
            doc_of("class P { void a() { k1(); } void b() { k1(); k2(); } }", "P.java")};
        const auto methods = filter::all_methods(pair).methods;
        REQUIRE(methods.size() == 2);
        const auto kw_set = kws({"k1", "k2", "x3", "x4", "x5"});
        CHECK(filter::mean_method_sr(methods, kw_set) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("empty method list is rejected") {
        CHECK_THROWS_AS(filter::mean_method_sr({}, kws({"x"})), filter::EmptyInput);
    }
    SUBCASE("fixture corpus mean matches brute-force recomputation") {
        const auto kw_set = kws({"Service", "count", "doSomething"});
        double expected = 0.0;
        for (const auto& m : all.methods) {
            int found = 0;
            for (const auto& kw : kw_set)
                if (std::find(m.tokens.begin(), m.tokens.end(), kw) != m.tokens.end()) ++found;
            expected += static_cast<double>(found) / 3.0;
        }
        expected /= static_cast<double>(all.methods.size());
        CHECK(filter::mean_method_sr(all.methods, kw_set) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("strategy config names render for reports") {
    CHECK(filter::to_string(filter::SearchLoc::Internal) == "internal");
    CHECK(filter::to_string(filter::SearchLoc::External) == "external");
    CHECK(filter::to_string(filter::SearchLoc::Both) == "both");
    CHECK(filter::to_string(filter::SearchImp::AllImports) == "all_imports");
    CHECK(filter::to_string(filter::SearchImp::MisusedImports) == "misused_imports");
    const filter::StrategyConfig def{};
    CHECK(def.sr == 0.0);
    CHECK_FALSE(def.method_filter);
}
