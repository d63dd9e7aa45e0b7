// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <chrono>
#include <string>
#include <vector>

#include <doctest.h>

#include "augmine/java/parser.hpp"
#include "augmine/vcs/vcs.hpp"
#include "test_util.hpp"

using namespace augmine;
using vcs::CommitRef;

namespace {

namespace fs = std::filesystem;

// Disposable git repository with date-controlled commits.
struct GitRepo {
    fs::path root;

    GitRepo() {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        root = fs::temp_directory_path() /
               ("augmine_repo_" + std::to_string(stamp) + "_" + std::to_string(counter++));
        fs::create_directories(root);
        require_ok({"init", "-q"});
        require_ok({"config", "user.email", "dev@example.com"});
        require_ok({"config", "user.name", "Dev"});
    }
    ~GitRepo() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }

    void require_ok(const std::vector<std::string>& args,
                    const std::vector<std::pair<std::string, std::string>>& env = {}) {
        const auto r = vcs::run_git(root, args, env);
        if (r.exit_code != 0)
            FAIL("git ", args[0], " failed: ", r.err);
    }

    void write(const std::string& rel, const std::string& content) {
        testutil::write_file(root / rel, content);
    }

    std::string commit_all(const std::string& message,
                           const std::string& date = "2023-06-01 12:00:00 +0000") {
        require_ok({"add", "-A"});
        require_ok({"commit", "-q", "-m", message},
                   {{"GIT_AUTHOR_DATE", date}, {"GIT_COMMITTER_DATE", date}});
        auto head = vcs::run_git(root, {"rev-parse", "HEAD"});
        REQUIRE(head.exit_code == 0);
        std::string id = head.out;
        while (!id.empty() && (id.back() == '\n' || id.back() == '\r')) id.pop_back();
        return id;
    }

    CommitRef ref(const std::string& id) const { return {root, id}; }
};

std::vector<std::string> names_of(const std::vector<vcs::MethodChange>& changes) {
    std::vector<std::string> out;
    for (const auto& c : changes) out.push_back(c.method_name);
    return out;
}

} // namespace

TEST_CASE("unified diff parsing reads hunk headers and file sides") {
    const std::string diff =
        "diff --git a/src/A.java b/src/A.java\n"
        "index 111..222 100644\n"
        "--- a/src/A.java\n"
        "+++ b/src/A.java\n"
        "@@ -4,2 +4,3 @@ class A\n"
        "-old\n"
        "+new\n"
        "+more\n"
        "@@ -10 +12,0 @@\n"
        "-gone\n"
        "diff --git a/New.java b/New.java\n"
        "--- /dev/null\n"
        "+++ b/New.java\n"
        "@@ -0,0 +1,5 @@\n"
        "diff --git a/Dead.java b/Dead.java\n"
        "--- a/Dead.java\n"
        "+++ /dev/null\n"
        "@@ -1,7 +0,0 @@\n";

    const auto hunks = vcs::parse_unified_diff(diff);
    REQUIRE(hunks.size() == 4);

    CHECK(hunks[0].pre_file == "src/A.java");
    CHECK(hunks[0].post_file == "src/A.java");
    CHECK(hunks[0].pre_start == 4);
    CHECK(hunks[0].pre_count == 2);
    CHECK(hunks[0].post_start == 4);
    CHECK(hunks[0].post_count == 3);

    // Count defaults to 1 when omitted; zero marks a pure deletion.
    CHECK(hunks[1].pre_start == 10);
    CHECK(hunks[1].pre_count == 1);
    CHECK(hunks[1].post_start == 12);
    CHECK(hunks[1].post_count == 0);

    CHECK(hunks[2].pre_file == "");
    CHECK(hunks[2].post_file == "New.java");
    CHECK(hunks[2].post_count == 5);

    CHECK(hunks[3].pre_file == "Dead.java");
    CHECK(hunks[3].post_file == "");
    CHECK(hunks[3].pre_count == 7);

    SUBCASE("CRLF diff output parses identically") {
        std::string crlf = diff;
        size_t pos = 0;
        while ((pos = crlf.find('\n', pos)) != std::string::npos) {
            crlf.replace(pos, 1, "\r\n");
            pos += 2;
        }
        const auto again = vcs::parse_unified_diff(crlf);
        REQUIRE(again.size() == hunks.size());
        CHECK(again[0].post_file == "src/A.java");
        CHECK(again[3].pre_count == 7);
    }
}

namespace {

const char* kInitialA =
    "class A {\n"                 // 1
    "    void foo() {\n"          // 2
    "        int x = 1;\n"        // 3
    "        use(x);\n"           // 4
    "    }\n"                     // 5
    "\n"                          // 6
    "    void bar() {\n"          // 7
    "        prepare();\n"        // 8
    "        finish();\n"         // 9
    "    }\n"                     // 10
    "}\n";                        // 11

} // namespace

TEST_CASE("changed methods cover added files, edits, and deletions") {
    GitRepo repo;
    repo.write("A.java", kInitialA);
    repo.write("README.md", "notes\n");
    const auto c1 = repo.commit_all("add A");

    SUBCASE("a root commit diffs against the empty tree") {
        const auto changes = vcs::changed_methods(repo.ref(c1));
        CHECK(names_of(changes) == std::vector<std::string>{"foo", "bar"});
        CHECK(changes[0].method_id == 0);
        CHECK(changes[1].method_id == 1);
        CHECK(changes[0].file == "A.java");
        CHECK(changes[0].declaration_span.start == 2);
        CHECK(changes[0].declaration_span.end == 5);
    }

    SUBCASE("editing one line flags only the enclosing method") {
        repo.write("A.java", std::string(kInitialA).replace(
                                 std::string(kInitialA).find("int x = 1;"), 10, "int x = 2;"));
        const auto c2 = repo.commit_all("fix x");
        const auto changes = vcs::changed_methods(repo.ref(c2));
        REQUIRE(changes.size() == 1);
        CHECK(changes[0].method_name == "foo");
        CHECK(changes[0].source_text ==
              "    void foo() {\n        int x = 2;\n        use(x);\n    }");
        for (const auto& range : changes[0].changed_lines)
            CHECK(range.overlaps(changes[0].declaration_span));

        SUBCASE("the captured declaration reparses to exactly one method") {
            const auto unit =
                java::parse_compilation_unit("class W {\n" + changes[0].source_text + "\n}");
            CHECK(java::all_method_sites(unit).size() == 1);
        }
    }

    SUBCASE("a commit without java changes yields nothing") {
        repo.write("README.md", "more notes\n");
        const auto c2 = repo.commit_all("docs only");
        CHECK(vcs::changed_methods(repo.ref(c2)).empty());
    }

    SUBCASE("a pure deletion inside a method still flags it") {
        std::string without_prepare = kInitialA;
        const auto at = without_prepare.find("        prepare();\n");
        without_prepare.erase(at, std::string("        prepare();\n").size());
        repo.write("A.java", without_prepare);
        const auto c2 = repo.commit_all("drop prepare call");
        const auto changes = vcs::changed_methods(repo.ref(c2));
        REQUIRE(changes.size() == 1);
        CHECK(changes[0].method_name == "bar");
    }

    SUBCASE("adding a file with two methods reports both") {
        repo.write("B.java", "class B {\n    void one() {}\n    void two() {}\n}\n");
        const auto c2 = repo.commit_all("add B");
        const auto changes = vcs::changed_methods(repo.ref(c2));
        CHECK(names_of(changes) == std::vector<std::string>{"one", "two"});
        CHECK(changes[0].file == "B.java");
    }

    SUBCASE("unparseable files are skipped with a diagnostic") {
        repo.write("Broken.java", "this is not java\n");
        repo.write("C.java", "class C {\n    void fine() { run(); }\n}\n");
        const auto c2 = repo.commit_all("add broken and fine");
        std::vector<std::string> diags;
        const auto changes = vcs::changed_methods(repo.ref(c2), &diags);
        CHECK(names_of(changes) == std::vector<std::string>{"fine"});
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].find("Broken.java") != std::string::npos);
    }

    SUBCASE("CRLF sources keep their spans") {
        repo.write("Crlf.java", "class K {\r\n    void win() {\r\n        a();\r\n    }\r\n}\r\n");
        const auto c2 = repo.commit_all("add crlf");
        const auto changes = vcs::changed_methods(repo.ref(c2));
        REQUIRE(changes.size() == 1);
        CHECK(changes[0].method_name == "win");
        CHECK(changes[0].declaration_span.start == 2);
    }

    SUBCASE("results are deterministic for a fixed repository") {
        repo.write("A.java", std::string(kInitialA) + "// trailer\n");
        const auto c2 = repo.commit_all("trailer");
        const auto first = vcs::changed_methods(repo.ref(c2));
        const auto second = vcs::changed_methods(repo.ref(c2));
        CHECK(names_of(first) == names_of(second));
    }

    SUBCASE("unknown commits are repository errors") {
        CHECK_THROWS_AS(vcs::changed_methods(repo.ref("deadbeefdeadbeefdeadbeefdeadbeefdeadbeef")),
                        vcs::RepositoryAccessError);
        CHECK_THROWS_AS(vcs::changed_methods({repo.root / "nope", c1}),
                        vcs::RepositoryAccessError);
    }
}

TEST_CASE("misuse-introducing commits are found by blaming the fix") {
    GitRepo repo;

    SUBCASE("three-commit history blames the introducing commit") {
        repo.write("A.java", kInitialA);
        const auto c1 = repo.commit_all("introduce", "2020-01-01 10:00:00 +0000");
        repo.write("B.java", "class B {}\n");
        repo.commit_all("unrelated", "2020-06-01 10:00:00 +0000");
        repo.write("A.java", std::string(kInitialA).replace(
                                 std::string(kInitialA).find("int x = 1;"), 10, "int x = 2;"));
        const auto c3 = repo.commit_all("fix", "2021-01-01 10:00:00 +0000");

        const auto blamed = vcs::misuse_introducing_commit(repo.ref(c3));
        CHECK(blamed.commit_id == c1);
        CHECK(blamed.repository_path == repo.root);
    }

    SUBCASE("among several blamed commits the latest committer date wins") {
        repo.write("L.java", "class L {\n    void m() {\n        alpha();\n    }\n}\n");
        const auto c1 = repo.commit_all("first", "2020-01-01 10:00:00 +0000");
        repo.write("L.java", "class L {\n    void m() {\n        alpha();\n        beta();\n    }\n}\n");
        const auto c2 = repo.commit_all("second", "2021-01-01 10:00:00 +0000");
        repo.write("L.java", "class L {\n    void m() {\n        alpha2();\n        beta2();\n    }\n}\n");
        const auto c3 = repo.commit_all("fix both", "2022-01-01 10:00:00 +0000");

        CHECK(vcs::misuse_introducing_commit(repo.ref(c3)).commit_id == c2);

        SUBCASE("history order does not override committer dates") {
            // A newer commit with an older committer date must lose.
            repo.write("L.java",
                       "class L {\n    void m() {\n        alpha2();\n        beta2();\n"
                       "        gamma();\n    }\n}\n");
            const auto c4 = repo.commit_all("late but backdated", "2019-01-01 10:00:00 +0000");
            repo.write("L.java",
                       "class L {\n    void m() {\n        alpha3();\n        beta3();\n"
                       "        gamma3();\n    }\n}\n");
            const auto c5 = repo.commit_all("fix all", "2023-01-01 10:00:00 +0000");
            // Blamed: c3 (2022) for alpha2/beta2, c4 (2019) for gamma.
            CHECK(vcs::misuse_introducing_commit(repo.ref(c5)).commit_id == c3);
        }
    }

    SUBCASE("equal committer dates tie-break on the greater hash") {
        const std::string same = "2020-05-05 10:00:00 +0000";
        repo.write("T.java", "class T {\n    void m() {\n        one();\n    }\n}\n");
        const auto c1 = repo.commit_all("one", same);
        repo.write("T.java", "class T {\n    void m() {\n        one();\n        two();\n    }\n}\n");
        const auto c2 = repo.commit_all("two", same);
        repo.write("T.java", "class T {\n    void m() {\n        uno();\n        dos();\n    }\n}\n");
        const auto c3 = repo.commit_all("fix", "2021-01-01 10:00:00 +0000");

        CHECK(vcs::misuse_introducing_commit(repo.ref(c3)).commit_id == std::max(c1, c2));
    }

    SUBCASE("a root fixing commit has nothing to blame") {
        repo.write("A.java", kInitialA);
        const auto c1 = repo.commit_all("only commit");
        CHECK_THROWS_AS(vcs::misuse_introducing_commit(repo.ref(c1)), vcs::NoBlamedLines);
    }

    SUBCASE("an addition-only fix has nothing to blame") {
        repo.write("A.java", kInitialA);
        repo.commit_all("base", "2020-01-01 10:00:00 +0000");
        repo.write("A.java", std::string(kInitialA) + "// appended note\n");
        const auto c2 = repo.commit_all("append", "2021-01-01 10:00:00 +0000");
        CHECK_THROWS_AS(vcs::misuse_introducing_commit(repo.ref(c2)), vcs::NoBlamedLines);
    }

    SUBCASE("fixed_files restricts which changes are blamed") {
        repo.write("A.java", "class A {\n    void m() {\n        olderLine();\n    }\n}\n");
        const auto c1 = repo.commit_all("a", "2020-01-01 10:00:00 +0000");
        repo.write("C.java", "class C {\n    void n() {\n        newerLine();\n    }\n}\n");
        const auto c2 = repo.commit_all("c", "2021-01-01 10:00:00 +0000");
        repo.write("A.java", "class A {\n    void m() {\n        fixedLine();\n    }\n}\n");
        repo.write("C.java", "class C {\n    void n() {\n        fixedLine();\n    }\n}\n");
        const auto c3 = repo.commit_all("fix both files", "2022-01-01 10:00:00 +0000");

        CHECK(vcs::misuse_introducing_commit(repo.ref(c3)).commit_id == c2);
        CHECK(vcs::misuse_introducing_commit(repo.ref(c3), {"A.java"}).commit_id == c1);
        CHECK(vcs::misuse_introducing_commit(repo.ref(c3), {"C.java"}).commit_id == c2);
    }

    SUBCASE("unknown commits are repository errors") {
        repo.write("A.java", kInitialA);
        repo.commit_all("base");
        CHECK_THROWS_AS(
            vcs::misuse_introducing_commit(repo.ref("deadbeefdeadbeefdeadbeefdeadbeefdeadbeef")),
            vcs::RepositoryAccessError);
    }
}
