// SPDX-License-Identifier: Apache-2.0
#include "augmine/vcs/vcs.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "augmine/java/lexer.hpp"
#include "augmine/java/parser.hpp"

namespace augmine::vcs {

namespace {

std::string read_all(std::FILE* f) {
    std::rewind(f);
    std::string out;
    char buf[4096];
    size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string::size_type pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            if (pos < text.size()) lines.push_back(text.substr(pos));
            break;
        }
        std::string line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

// "a/path" or "b/path" with the marker prefix stripped; /dev/null becomes "".
std::string parse_diff_path(std::string token) {
    if (const auto tab = token.find('\t'); tab != std::string::npos) token.resize(tab);
    if (token == "/dev/null") return "";
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"')
        token = token.substr(1, token.size() - 2);
    if (token.size() >= 2 && (token[0] == 'a' || token[0] == 'b') && token[1] == '/')
        return token.substr(2);
    return token;
}

bool parse_hunk_header(const std::string& line, DiffHunk& hunk) {
    // "@@ -<a>[,<b>] +<c>[,<d>] @@"
    const char* p = line.c_str();
    if (std::strncmp(p, "@@ -", 4) != 0) return false;
    p += 4;
    char* end = nullptr;
    hunk.pre_start = static_cast<int>(std::strtol(p, &end, 10));
    if (end == p) return false;
    p = end;
    hunk.pre_count = 1;
    if (*p == ',') {
        hunk.pre_count = static_cast<int>(std::strtol(p + 1, &end, 10));
        p = end;
    }
    if (*p != ' ' || *(p + 1) != '+') return false;
    p += 2;
    hunk.post_start = static_cast<int>(std::strtol(p, &end, 10));
    if (end == p) return false;
    p = end;
    hunk.post_count = 1;
    if (*p == ',') {
        hunk.post_count = static_cast<int>(std::strtol(p + 1, &end, 10));
        p = end;
    }
    return std::strncmp(p, " @@", 3) == 0;
}

bool is_hex_hash(const std::string& s) {
    if (s.size() < 7 || s.size() > 40) return false;
    for (const char c : s)
        if (!std::isxdigit(static_cast<unsigned char>(c)) ||
            std::isupper(static_cast<unsigned char>(c)))
            return false;
    return true;
}

GitResult run_or_throw(const std::filesystem::path& repo, const std::vector<std::string>& args) {
    GitResult r = run_git(repo, args);
    if (r.exit_code != 0) {
        std::string cmd = "git";
        for (const auto& a : args) cmd += " " + a;
        throw RepositoryAccessError(cmd + " failed (" + std::to_string(r.exit_code) +
                                    "): " + r.err);
    }
    return r;
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    return s;
}

bool commit_exists(const std::filesystem::path& repo, const std::string& id) {
    return run_git(repo, {"rev-parse", "--verify", "--quiet", id + "^{commit}"}).exit_code == 0;
}

} // namespace

GitResult run_git(const std::filesystem::path& repo, const std::vector<std::string>& args,
                  const std::vector<std::pair<std::string, std::string>>& extra_env) {
    std::FILE* out_f = std::tmpfile();
    std::FILE* err_f = std::tmpfile();
    if (!out_f || !err_f) {
        if (out_f) std::fclose(out_f);
        if (err_f) std::fclose(err_f);
        throw RepositoryAccessError("cannot allocate output capture files");
    }

    std::vector<std::string> full{"git", "-C", repo.string()};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(full.size() + 1);
    for (auto& s : full) argv.push_back(const_cast<char*>(s.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = fork();
    if (pid < 0) {
        std::fclose(out_f);
        std::fclose(err_f);
        throw RepositoryAccessError("fork failed");
    }
    if (pid == 0) {
        for (const auto& [key, value] : extra_env) setenv(key.c_str(), value.c_str(), 1);
        dup2(fileno(out_f), STDOUT_FILENO);
        dup2(fileno(err_f), STDERR_FILENO);
        execvp("git", argv.data());
        _exit(127);
    }

    int status = 0;
    waitpid(pid, &status, 0);
    GitResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_all(out_f);
    result.err = read_all(err_f);
    std::fclose(out_f);
    std::fclose(err_f);
    if (result.exit_code == 127)
        throw RepositoryAccessError("git executable not found on PATH");
    return result;
}

std::vector<DiffHunk> parse_unified_diff(const std::string& diff_text) {
    std::vector<DiffHunk> hunks;
    std::string pre_file;
    std::string post_file;
    for (const std::string& line : split_lines(diff_text)) {
        if (line.rfind("--- ", 0) == 0) {
            pre_file = parse_diff_path(line.substr(4));
        } else if (line.rfind("+++ ", 0) == 0) {
            post_file = parse_diff_path(line.substr(4));
        } else if (line.rfind("@@", 0) == 0) {
            DiffHunk hunk;
            if (!parse_hunk_header(line, hunk)) continue;
            hunk.pre_file = pre_file;
            hunk.post_file = post_file;
            hunks.push_back(std::move(hunk));
        }
    }
    return hunks;
}

std::vector<MethodChange> changed_methods(const CommitRef& commit,
                                          std::vector<std::string>* diagnostics) {
    const auto& repo = commit.repository_path;
    if (!commit_exists(repo, commit.commit_id))
        throw RepositoryAccessError("unknown commit: " + commit.commit_id);

    std::string base;
    const GitResult parent =
        run_git(repo, {"rev-parse", "--verify", "--quiet", commit.commit_id + "^"});
    if (parent.exit_code == 0) {
        base = trimmed(parent.out);
    } else {
        // Root commit: diff against the empty tree.
        base = trimmed(run_or_throw(repo, {"hash-object", "-t", "tree", "/dev/null"}).out);
    }

    const GitResult diff =
        run_or_throw(repo, {"diff", "--unified=0", base, commit.commit_id});

    // Post-image changed ranges per .java file, in diff order.
    std::vector<std::string> file_order;
    std::map<std::string, std::vector<LineRange>> ranges;
    for (const DiffHunk& hunk : parse_unified_diff(diff.out)) {
        if (hunk.post_file.empty()) continue; // deleted file: no post methods
        const std::string& file = hunk.post_file;
        if (file.size() < 5 || file.compare(file.size() - 5, 5, ".java") != 0) continue;
        LineRange range{file, 0, 0};
        if (hunk.post_count >= 1) {
            range.start = hunk.post_start;
            range.end = hunk.post_start + hunk.post_count - 1;
        } else {
            // Pure deletion: mark the seam around the cut.
            range.start = std::max(1, hunk.post_start);
            range.end = std::max(range.start, hunk.post_start + 1);
        }
        if (!ranges.count(file)) file_order.push_back(file);
        ranges[file].push_back(std::move(range));
    }

    std::vector<MethodChange> changes;
    for (const std::string& file : file_order) {
        const GitResult show = run_or_throw(repo, {"show", commit.commit_id + ":" + file});
        java::CompilationUnit unit;
        try {
            unit = java::parse_compilation_unit(show.out);
        } catch (const java::SyntaxError& e) {
            if (diagnostics)
                diagnostics->push_back("parse skipped: " + file + ": " + e.what());
            continue;
        }
        const std::vector<std::string> lines = split_lines(show.out);
        for (const auto& site : java::all_method_sites(unit)) {
            const java::Span span = site.method->span;
            std::vector<LineRange> overlapping;
            for (const LineRange& range : ranges[file])
                if (range.overlaps(span.start, span.end)) overlapping.push_back(range);
            if (overlapping.empty()) continue;

            std::string text;
            for (int ln = span.start; ln <= span.end && ln <= static_cast<int>(lines.size());
                 ++ln) {
                if (ln > span.start) text += '\n';
                text += lines[static_cast<size_t>(ln - 1)];
            }
            changes.push_back({file, site.method->name, site.ordinal,
                               LineRange{file, span.start, span.end}, std::move(overlapping),
                               std::move(text)});
        }
    }
    return changes;
}

CommitRef misuse_introducing_commit(const CommitRef& fixing_commit,
                                    const std::vector<std::string>& fixed_files) {
    const auto& repo = fixing_commit.repository_path;
    if (!commit_exists(repo, fixing_commit.commit_id))
        throw RepositoryAccessError("unknown commit: " + fixing_commit.commit_id);

    const GitResult parent =
        run_git(repo, {"rev-parse", "--verify", "--quiet", fixing_commit.commit_id + "^"});
    if (parent.exit_code != 0)
        throw NoBlamedLines("fixing commit " + fixing_commit.commit_id + " has no parent");
    const std::string base = trimmed(parent.out);

    std::vector<std::string> diff_args{"diff", "--unified=0", base, fixing_commit.commit_id};
    if (!fixed_files.empty()) {
        diff_args.push_back("--");
        diff_args.insert(diff_args.end(), fixed_files.begin(), fixed_files.end());
    }
    const GitResult diff = run_or_throw(repo, diff_args);

    // Pre-image lines the fix modified or removed; additions blame nothing.
    std::map<std::string, long long> committer_time;
    bool blamed_any = false;
    for (const DiffHunk& hunk : parse_unified_diff(diff.out)) {
        if (hunk.pre_file.empty() || hunk.pre_count < 1) continue;
        const std::string range = std::to_string(hunk.pre_start) + "," +
                                  std::to_string(hunk.pre_start + hunk.pre_count - 1);
        const GitResult blame = run_or_throw(
            repo, {"blame", "--line-porcelain", "-L", range, base, "--", hunk.pre_file});

        std::string current;
        for (const std::string& line : split_lines(blame.out)) {
            if (!line.empty() && line[0] == '\t') continue; // source content line
            std::istringstream fields(line);
            std::string first;
            fields >> first;
            if (is_hex_hash(first)) {
                std::string group, pos;
                if (fields >> group >> pos) {
                    current = first;
                    blamed_any = true;
                    committer_time.emplace(current, 0);
                }
            } else if (first == "committer-time" && !current.empty()) {
                long long when = 0;
                fields >> when;
                committer_time[current] = when;
            }
        }
    }

    if (!blamed_any) throw NoBlamedLines("the fix introduced only new lines");

    std::string best;
    long long best_time = 0;
    for (const auto& [hash, when] : committer_time) {
        if (best.empty() || when > best_time || (when == best_time && hash > best)) {
            best = hash;
            best_time = when;
        }
    }
    return {repo, best};
}

} // namespace augmine::vcs
