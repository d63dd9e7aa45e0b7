// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one self-contained check per shipped guarantee, each
// verified against an independent oracle or hand-computed value and printed
// as a single PASS/FAIL line with its runtime. Exit status is the number of
// failed checks.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "augmine/api/context.hpp"
#include "augmine/aug/graph.hpp"
#include "augmine/detection/detection.hpp"
#include "augmine/filter/filter.hpp"
#include "augmine/harness/harness.hpp"
#include "augmine/java/parser.hpp"
#include "augmine/miner/miner.hpp"
#include "augmine/search/search.hpp"
#include "augmine/stats/stats.hpp"
#include "augmine/vcs/vcs.hpp"
#include "graph_gen.hpp"
#include "mini_corpus.hpp"
#include "mining_oracle.hpp"
#include "test_util.hpp"

namespace {

using namespace augmine;
using aug::Aug;
using aug::EdgeKind;
using aug::NodeKind;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure(msg);
}

// ---------------------------------------------------------------- oracles

bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$';
}

// whole-token containment by direct scanning, independent of the filter code
bool token_present(const std::string& text, const std::string& kw) {
    for (std::size_t pos = text.find(kw); pos != std::string::npos;
         pos = text.find(kw, pos + 1)) {
        bool left_ok = pos == 0 || !ident_char(text[pos - 1]);
        std::size_t end = pos + kw.size();
        bool right_ok = end == text.size() || !ident_char(text[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

int tokens_found(const std::string& text, const std::set<std::string>& kws) {
    int found = 0;
    for (const std::string& kw : kws) {
        if (token_present(text, kw)) ++found;
    }
    return found;
}

// two-sided exact signed-rank p-value by enumerating every sign vector
double wilcoxon_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);
    }
    std::size_t n = diffs.size();
    std::vector<double> abs_sorted;
    for (double d : diffs) abs_sorted.push_back(std::fabs(d));
    std::sort(abs_sorted.begin(), abs_sorted.end());
    auto rank_of = [&](double v) {
        double sum = 0;
        int count = 0;
        for (std::size_t i = 0; i < abs_sorted.size(); ++i) {
            if (abs_sorted[i] == v) {
                sum += static_cast<double>(i + 1);
                ++count;
            }
        }
        return sum / count;
    };
    std::vector<double> ranks;
    double total = 0;
    double w_plus = 0;
    for (double d : diffs) {
        double r = rank_of(std::fabs(d));
        ranks.push_back(r);
        total += r;
        if (d > 0) w_plus += r;
    }
    double t = std::min(w_plus, total - w_plus);
    long long hits = 0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i & 1) != 0) w += ranks[i];
        }
        if (w <= t + 1e-9 || w >= total - t - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(1ull << n);
}

Aug chain3() {
    Aug g;
    int ctor = g.add_node(NodeKind::Action, "<init>");
    int obj = g.add_node(NodeKind::Data, "A");
    int call = g.add_node(NodeKind::Action, "use");
    g.add_edge(ctor, obj, EdgeKind::Def);
    g.add_edge(obj, call, EdgeKind::Recv);
    return g;
}

miner::Pattern as_pattern(Aug g, int support) {
    miner::Pattern p;
    p.graph = std::move(g);
    p.support = support;
    return p;
}

// -------------------------------------------------------------- criteria

// Satisfaction ratio equals brute-force token counting on randomized docs;
// sr=0 filters nothing, sr=1 keeps only full-coverage docs.
void criterion_satisfaction() {
    testutil::Rng rng(101u);
    static const char* pool[] = {"alpha", "beta",  "gamma",  "Res",   "use",   "close",
                                 "open",  "value", "widget", "x1",    "y2",    "parse"};
    static const char* seps[] = {" ", ".", "(", ");\n", " = ", "\n// ", "\t"};
    const int pool_n = 12, seps_n = 7;

    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        int words = rng.pick(5, 40);
        for (int w = 0; w < words; ++w) {
            std::string token = pool[rng.pick(0, pool_n - 1)];
            if (rng.pick(0, 5) == 0) token = "X" + token + "Y"; // embedded, not a token
            text += token;
            text += seps[rng.pick(0, seps_n - 1)];
        }
        std::set<std::string> kws;
        int k = rng.pick(1, 6);
        for (int i = 0; i < k; ++i) kws.insert(pool[rng.pick(0, pool_n - 1)]);
        if (rng.pick(0, 2) == 0) kws.insert("neverPresentKw");

        search::SourceDoc doc{search::Origin::External, "d" + std::to_string(trial), text, 0};
        filter::SatisfactionRatio sr = filter::satisfaction_ratio(doc, kws);
        int expected = tokens_found(text, kws);
        require(sr.found == expected && sr.total == static_cast<int>(kws.size()),
                "ratio mismatch on trial " + std::to_string(trial) + ": got " +
                    std::to_string(sr.found) + "/" + std::to_string(sr.total) + ", expected " +
                    std::to_string(expected) + "/" + std::to_string(kws.size()));

        std::vector<search::SourceDoc> docs = {doc};
        std::vector<search::SourceDoc> at_zero = filter::filter_files(docs, kws, 0.0);
        require(at_zero.size() == 1 && at_zero[0].identity == doc.identity,
                "sr=0 must be the identity filter");
        std::vector<search::SourceDoc> at_one = filter::filter_files(docs, kws, 1.0);
        bool full = expected == static_cast<int>(kws.size());
        require(at_one.size() == (full ? 1u : 0u),
                "sr=1 must keep exactly the full-coverage docs");
    }
}

// Shared-rank semantics: [7,7,3] -> [1,1,3], and random support vectors
// match the count-of-strictly-greater rule.
void criterion_ranks() {
    auto patterns_for = [](const std::vector<int>& supports) {
        std::vector<miner::Pattern> ps;
        for (std::size_t i = 0; i < supports.size(); ++i) {
            Aug g;
            g.add_node(NodeKind::Action, "op" + std::to_string(i)); // distinct fingerprints
            ps.push_back(as_pattern(std::move(g), supports[i]));
        }
        return ps;
    };

    std::vector<miner::RankedPattern> ranked = miner::rank_patterns(patterns_for({7, 7, 3}));
    require(ranked.size() == 3, "expected three ranked patterns");
    require(ranked[0].rank == 1 && ranked[1].rank == 1 && ranked[2].rank == 3,
            "supports [7,7,3] must rank [1,1,3], got [" + std::to_string(ranked[0].rank) +
                "," + std::to_string(ranked[1].rank) + "," + std::to_string(ranked[2].rank) +
                "]");
    require(miner::top_at_k(ranked, 2).size() == 2, "top@2 of [1,1,3] keeps the tie pair");

    testutil::Rng rng(202u);
    for (int trial = 0; trial < 100; ++trial) {
        int n = rng.pick(1, 12);
        std::vector<int> supports;
        for (int i = 0; i < n; ++i) supports.push_back(rng.pick(0, 9));
        std::vector<miner::RankedPattern> rp = miner::rank_patterns(patterns_for(supports));
        require(rp.size() == supports.size(), "ranking must keep every pattern");
        for (const miner::RankedPattern& entry : rp) {
            int greater = 0;
            for (int s : supports) {
                if (s > entry.pattern.support) ++greater;
            }
            require(entry.rank == greater + 1,
                    "rank of support " + std::to_string(entry.pattern.support) +
                        " must be " + std::to_string(greater + 1) + ", got " +
                        std::to_string(entry.rank));
        }
    }
}

// Overlap: self-overlap is 1, disjoint labels give 0, the hand example is
// exactly 3/4, and only strictly interior values classify as Misuse.
void criterion_overlap() {
    testutil::Rng rng(303u);
    for (int trial = 0; trial < 100; ++trial) {
        Aug g = graph_gen::random_aug(rng, 6);
        detection::Overlap o = detection::overlap(g, g);
        require(o.num == o.den && o.value() == 1.0 && !o.interior(),
                "self-overlap must be exactly 1");
    }

    Aug stranger;
    stranger.add_node(NodeKind::Action, "somethingElse");
    detection::Overlap zero = detection::overlap(chain3(), stranger);
    require(zero.num == 0 && !zero.interior(), "disjoint labels must overlap at 0");

    Aug partial; // <init> and the object, missing the final call
    int ctor = partial.add_node(NodeKind::Action, "<init>");
    int obj = partial.add_node(NodeKind::Data, "A");
    partial.add_edge(ctor, obj, EdgeKind::Def);
    detection::Overlap hand = detection::overlap(chain3(), partial);
    require(hand.num == 3 && hand.den == 4 && hand.interior(),
            "hand example must score exactly 3/4, got " + std::to_string(hand.num) + "/" +
                std::to_string(hand.den));

    using detection::Classification;
    require(detection::detect(chain3(), {as_pattern(chain3(), 5)}).classification ==
                Classification::Correct,
            "full overlap (= 1) must classify Correct");
    require(detection::detect(stranger, {as_pattern(chain3(), 5)}).classification ==
                Classification::Correct,
            "zero overlap must classify Correct");
    detection::DetectionVerdict interior =
        detection::detect(partial, {as_pattern(chain3(), 5)});
    require(interior.classification == Classification::Misuse &&
                interior.overlap.num == 3 && interior.overlap.den == 4,
            "interior overlap 3/4 must classify Misuse");
}

// Miner output equals the brute-force closed-frequent-subgraph enumeration
// on collision-free corpora, as (fingerprint, support) sets.
void criterion_miner_oracle() {
    testutil::Rng rng(404u);
    for (int corpus_i = 0; corpus_i < 200; ++corpus_i) {
        std::vector<Aug> corpus = mining_oracle::random_collision_free_corpus(rng);
        for (int min_support : {2, 3}) {
            miner::MiningConfig cfg;
            cfg.min_support_absolute = min_support;
            miner::MiningResult mined = miner::mine_patterns(corpus, cfg);
            require(!mined.truncated, "mining must not truncate on tiny corpora");
            auto got = mining_oracle::fingerprint_view(mined.patterns);
            auto want = mining_oracle::fingerprint_view(
                mining_oracle::closed_frequent_oracle(corpus, min_support));
            require(got == want, "corpus " + std::to_string(corpus_i) + ", min_support " +
                                     std::to_string(min_support) + ": miner found " +
                                     std::to_string(got.size()) + " patterns, oracle " +
                                     std::to_string(want.size()));
        }
    }
}

// Exact subgraph containment implies relaxed containment, and the relaxed
// check provably overestimates on a constructed pair.
void criterion_relaxation() {
    testutil::Rng rng(20260816u);
    int exact_hits = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Aug pattern = graph_gen::random_aug(rng, 5);
        Aug candidate = graph_gen::random_aug(rng, 8);
        if (aug::exact_subgraph_oracle(pattern, candidate)) {
            ++exact_hits;
            require(aug::contains_relaxed(pattern, candidate),
                    "exact containment without relaxed containment on trial " +
                        std::to_string(trial));
        }
    }
    require(exact_hits >= 20, "the implication was exercised only " +
                                  std::to_string(exact_hits) + " times");

    // two data nodes each feeding its own action vs. one node feeding both:
    // equal multisets, different structure
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
    require(aug::contains_relaxed(pattern, candidate) &&
                !aug::exact_subgraph_oracle(pattern, candidate),
            "the constructed pair must be relaxed-contained but not exactly contained");
}

// The worked keyword-extraction example: exactly the three used third-party
// types, none of the excluded ones, and the called method names.
void criterion_keywords() {
    java::CompilationUnit unit = java::parse_compilation_unit(
        testutil::read_file(testutil::fixture_dir() / "javacorpus/Extraction.java"));
    const java::MethodDecl* method = nullptr;
    for (const java::MethodSite& site : java::all_method_sites(unit)) {
        if (site.method->name == "doSomething") method = site.method;
    }
    require(method != nullptr, "fixture method doSomething not found");

    std::set<std::string> types = api::relevant_types(*method, unit);
    require(types == std::set<std::string>{"AClass", "BClass", "ZClass"},
            "relevant types must be exactly {AClass, BClass, ZClass}");
    require(types.count("CClass") == 0 && types.count("RClass") == 0 &&
                types.count("QClass") == 0,
            "unused, wildcard-only, and internal imports must be excluded");
    api::ApiContext ctx = api::extract_context(*method, unit);
    require(ctx.keywords.count("doSomething") == 1, "keywords must include the called names");
}

// Blame-based origin tracing on fixture repositories: the three-commit
// history blames the introducing commit; two blamed commits pick the later.
void criterion_szz() {
    const std::string body = "class A {\n    void m() {\n        int x = 1;\n    }\n}\n";
    {
        minicorpus::TempDir dir;
        minicorpus::git(dir.path, {"init", "-q"});
        minicorpus::git(dir.path, {"config", "user.email", "dev@example.com"});
        minicorpus::git(dir.path, {"config", "user.name", "Dev"});
        testutil::write_file(dir.path / "A.java", body);
        std::string c1 = minicorpus::commit_all(dir.path, "introduce", "2020-01-01 10:00:00 +0000");
        testutil::write_file(dir.path / "B.java", "class B {}\n");
        minicorpus::commit_all(dir.path, "unrelated", "2020-06-01 10:00:00 +0000");
        std::string fixed = body;
        fixed.replace(fixed.find("int x = 1;"), 10, "int x = 2;");
        testutil::write_file(dir.path / "A.java", fixed);
        std::string c3 = minicorpus::commit_all(dir.path, "fix", "2021-01-01 10:00:00 +0000");
        vcs::CommitRef blamed = vcs::misuse_introducing_commit({dir.path, c3});
        require(blamed.commit_id == c1,
                "three-commit fixture must blame the first commit, got " + blamed.commit_id);
    }
    {
        minicorpus::TempDir dir;
        minicorpus::git(dir.path, {"init", "-q"});
        minicorpus::git(dir.path, {"config", "user.email", "dev@example.com"});
        minicorpus::git(dir.path, {"config", "user.name", "Dev"});
        testutil::write_file(dir.path / "L.java",
                             "class L {\n    void m() {\n        alpha();\n    }\n}\n");
        minicorpus::commit_all(dir.path, "first", "2020-01-01 10:00:00 +0000");
        testutil::write_file(
            dir.path / "L.java",
            "class L {\n    void m() {\n        alpha();\n        beta();\n    }\n}\n");
        std::string c2 = minicorpus::commit_all(dir.path, "second", "2021-01-01 10:00:00 +0000");
        testutil::write_file(
            dir.path / "L.java",
            "class L {\n    void m() {\n        alpha2();\n        beta2();\n    }\n}\n");
        std::string c3 = minicorpus::commit_all(dir.path, "fix both", "2022-01-01 10:00:00 +0000");
        vcs::CommitRef blamed = vcs::misuse_introducing_commit({dir.path, c3});
        require(blamed.commit_id == c2,
                "among two blamed commits the later one must win, got " + blamed.commit_id);
    }
}

// Statistics: exact Wilcoxon p equals sign-vector enumeration, the Yates
// chi-squared matches hand arithmetic, kappa is 1 on identical ratings, and
// the published precision/recall table arithmetic reproduces.
void criterion_stats() {
    testutil::Rng rng(808u);
    int tested = 0;
    while (tested < 40) {
        int n = rng.pick(1, 10);
        std::vector<double> a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(static_cast<double>(rng.pick(0, 6)));
            b.push_back(static_cast<double>(rng.pick(0, 6)));
        }
        bool all_zero = true;
        for (int i = 0; i < n; ++i) {
            if (a[i] != b[i]) all_zero = false;
        }
        if (all_zero) continue;
        stats::WilcoxonResult r = stats::wilcoxon_signed_rank(a, b);
        require(r.exact, "n <= 10 must take the exact path");
        double oracle = wilcoxon_oracle(a, b);
        require(std::fabs(r.p_value - oracle) <= 1e-12,
                "exact p " + std::to_string(r.p_value) + " differs from enumeration " +
                    std::to_string(oracle));
        ++tested;
    }

    // [[20,5],[5,20]]: N=50, |ad-bc|-N/2 = 350, chi = 50*350^2/25^4 = 15.68
    stats::ChiSquareResult chi = stats::chi_square_yates(20, 5, 5, 20);
    require(std::fabs(chi.statistic - 15.68) <= 1e-2,
            "Yates statistic must be 15.68, got " + std::to_string(chi.statistic));

    std::vector<std::string> ratings = {"yes", "no", "yes", "maybe", "no"};
    require(stats::cohens_kappa(ratings, ratings) == 1.0,
            "kappa of identical ratings must be exactly 1");

    stats::PrecisionRecall precision = stats::precision_recall({8, 16, 0, 0});
    require(precision.precision_defined &&
                std::fabs(precision.precision * 100.0 - 33.33) <= 0.01,
            "precision 8/24 must print as 33.33%");
    stats::PrecisionRecall recall = stats::precision_recall({13, 0, 0, 102});
    require(recall.recall_defined && std::fabs(recall.recall * 100.0 - 11.30) <= 0.01,
            "recall 13/115 must print as 11.30%");
}

// shared by criteria 9 and 10
harness::MatrixReport run_mini_matrix(const minicorpus::MiniCorpus& m,
                                      search::SearchProvider& provider,
                                      const std::filesystem::path& out_dir, int workers) {
    harness::MatrixOptions options;
    options.base.provider = &provider;
    options.base.mining.min_support_absolute = 3;
    options.base.top_k = 3;
    options.base.out_dir = out_dir;
    options.workers = workers;
    return harness::run_matrix({m.entry}, options);
}

const harness::RunReport& target_cell(const harness::MatrixReport& report) {
    for (const harness::RunReport& r : report.runs) {
        if (r.config_name == "external_all_sr050_mfon") return r;
    }
    throw Failure("the all-imports, sr=0.5, method-filter cell is missing");
}

// End to end on the bundled mini corpus: 40 cells, the planted pattern at
// Top@1 in the target cell, and the misuse flagged at the hand-computed
// interior overlap (3 nodes + 3 edges matched) / (4 nodes + 3 inner edges).
void criterion_end_to_end() {
    minicorpus::MiniCorpus m = minicorpus::make_mini_corpus();
    search::FsCorpusProvider provider(m.corpus_dir);
    minicorpus::TempDir out;
    harness::MatrixReport report = run_mini_matrix(m, provider, out.path, 2);

    require(report.runs.size() == 40, "one entry must produce 40 cells, got " +
                                          std::to_string(report.runs.size()));
    const harness::RunReport& cell = target_cell(report);
    require(cell.stage_errors.empty(), "the target cell must complete cleanly");
    require(cell.fixing_pattern_rank == 1,
            "the planted pattern must rank Top@1, got rank " +
                std::to_string(cell.fixing_pattern_rank));
    require(cell.top_hit, "Top@k must report the planted pattern as a hit");
    require(cell.verdict_defined, "the misuse method must receive a verdict");
    require(cell.verdict.classification == detection::Classification::Misuse,
            "the misuse method must classify as Misuse");
    require(cell.verdict.overlap.num == 6 && cell.verdict.overlap.den == 7,
            "overlap must be the hand-computed 6/7, got " +
                std::to_string(cell.verdict.overlap.num) + "/" +
                std::to_string(cell.verdict.overlap.den));
}

// Two consecutive end-to-end runs produce byte-identical artifacts; the
// reports embed no timestamps, so no exclusions are needed.
void criterion_determinism() {
    minicorpus::MiniCorpus m = minicorpus::make_mini_corpus();
    search::FsCorpusProvider provider(m.corpus_dir);
    minicorpus::TempDir out1, out2;
    run_mini_matrix(m, provider, out1.path, 2);
    run_mini_matrix(m, provider, out2.path, 4); // worker count must not matter

    for (const char* rel : {"matrix.json", "reductions.csv", "frequencies.csv",
                            "comparisons.csv"}) {
        std::string first = testutil::read_file(out1.path / rel);
        std::string second = testutil::read_file(out2.path / rel);
        require(first == second, std::string(rel) + " differs between consecutive runs");
    }
    std::filesystem::path report =
        std::filesystem::path("runs") / "mini-resource" / "external_all_sr050_mfon" /
        "report.json";
    require(testutil::read_file(out1.path / report) == testutil::read_file(out2.path / report),
            "the target cell report differs between consecutive runs");
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<void()> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "satisfaction ratio equals brute-force token counting", 1.0,
         criterion_satisfaction},
        {2, "shared ranks follow the tie-group skip rule", 1.0, criterion_ranks},
        {3, "overlap identities and the 3/4 hand example", 5.0, criterion_overlap},
        {4, "mined patterns equal the closed-subgraph oracle", 60.0, criterion_miner_oracle},
        {5, "exact containment implies relaxed containment", 10.0, criterion_relaxation},
        {6, "keyword extraction on the worked example", 1.0, criterion_keywords},
        {7, "fixing commits blame their introducing commits", 5.0, criterion_szz},
        {8, "statistics match enumeration and hand arithmetic", 5.0, criterion_stats},
        {9, "mini-corpus matrix flags the planted misuse at Top@1", 120.0,
         criterion_end_to_end},
        {10, "consecutive runs are byte-identical", 240.0, criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > c.budget_seconds) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "exceeded the %.0fs budget", c.budget_seconds);
            error = buf;
        }
        if (error.empty()) {
            std::printf("PASS  criterion %2d: %s (%.2fs)\n", c.id, c.title, elapsed);
        } else {
            ++failures;
            std::printf("FAIL  criterion %2d: %s: %s (%.2fs)\n", c.id, c.title, error.c_str(),
                        elapsed);
        }
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", static_cast<int>(criteria.size()) - failures,
                static_cast<int>(criteria.size()));
    return failures;
}
