// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "augmine/common.hpp"

namespace augmine::vcs {

struct RepositoryAccessError : Error {
    using Error::Error;
};

// The fix only added lines, so no pre-existing line can be blamed.
struct NoBlamedLines : Error {
    using Error::Error;
};

struct CommitRef {
    std::filesystem::path repository_path;
    std::string commit_id; // hex, full or abbreviated
};

struct MethodChange {
    std::string file; // relative path in the post-commit tree
    std::string method_name;
    int method_id = 0; // ordinal within the file's method list
    LineRange declaration_span;
    std::vector<LineRange> changed_lines; // each overlaps declaration_span
    std::string source_text;              // the full declaration
};

struct GitResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs `git -C repo <args...>` with stdout/stderr captured; never throws on a
// non-zero exit. extra_env entries are set in the child process only.
GitResult run_git(const std::filesystem::path& repo, const std::vector<std::string>& args,
                  const std::vector<std::pair<std::string, std::string>>& extra_env = {});

// One hunk of `diff --unified=0` output. Counts of zero mark pure
// additions/deletions; empty file names stand for /dev/null sides.
struct DiffHunk {
    std::string pre_file;
    std::string post_file;
    int pre_start = 0;
    int pre_count = 0;
    int post_start = 0;
    int post_count = 0;
};

std::vector<DiffHunk> parse_unified_diff(const std::string& diff_text);

// Every method declaration in the post-commit tree whose span overlaps an
// added or modified line of the commit's diff (root commits diff against the
// empty tree). A pure deletion marks the methods around its seam, so a
// removed call still flags its enclosing method. Unparseable files are
// skipped with a diagnostic.
std::vector<MethodChange> changed_methods(const CommitRef& commit,
                                          std::vector<std::string>* diagnostics = nullptr);

// Blames the fixing commit's pre-image lines on its parent and returns the
// blamed commit; among several, the latest by committer date wins, ties by
// lexicographically greatest hash. fixed_files restricts the diff when
// non-empty.
CommitRef misuse_introducing_commit(const CommitRef& fixing_commit,
                                    const std::vector<std::string>& fixed_files = {});

} // namespace augmine::vcs
