// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "augmine/api/context.hpp"
#include "augmine/common.hpp"

namespace augmine::search {

struct IoError : Error {
    using Error::Error;
};

struct ProviderError : Error {
    using Error::Error;
};

struct EmptyQuery : Error {
    using Error::Error;
};

enum class Origin { Internal, External };

std::string to_string(Origin origin);

struct SourceDoc {
    Origin origin = Origin::Internal;
    std::string identity;   // provider-scoped id or path, unique per result set
    std::string raw_text;
    int relevance_rank = 0; // provider order

    // Dotted package statement, "" for the default package. Parsed on demand
    // from raw_text; tolerates leading comments and annotations.
    std::string package_name() const;
};

struct SearchQuery {
    std::vector<std::string> import_statements; // ordered, non-empty
    int page_limit = 10;                        // max pages one session may fetch
};

struct SearchHit {
    std::string identity;
    std::string raw_text;
    int relevance_rank = 0;
};

// Providers must be deterministic given fixed backing data and safe for
// concurrent queries.
class SearchProvider {
  public:
    virtual ~SearchProvider() = default;
    virtual std::vector<SearchHit> query(const SearchQuery& q, int page) = 0;
};

// Indexes the .java files under a local directory; a file matches when any
// queried import statement occurs in it as a raw substring. Ranks by
// lexicographic path order. Texts are loaded once at construction.
class FsCorpusProvider : public SearchProvider {
  public:
    explicit FsCorpusProvider(const std::filesystem::path& root, int page_size = 100);
    std::vector<SearchHit> query(const SearchQuery& q, int page) override;

  private:
    int page_size_;
    std::vector<std::pair<std::string, std::string>> files_; // (relative path, text)
};

struct HttpProviderOptions {
    int per_page = 100;
    int max_retries = 2; // additional attempts after the first failure
    std::chrono::milliseconds retry_delay{100};
    std::chrono::milliseconds min_request_interval{0}; // request rate limit
};

// Speaks a searchcode-compatible REST shape:
//   GET {base_url}/api/codesearch_I/?q=<terms>&p=<page>&per_page=<n>
// Response: JSON {"results": [{id, filename, repo, lines, url?}, ...]}.
// A result's text comes from its raw-fetch "url" when present, otherwise by
// joining its "lines" object in line-number order.
class HttpProvider : public SearchProvider {
  public:
    explicit HttpProvider(std::string base_url, HttpProviderOptions opts = {});
    std::vector<SearchHit> query(const SearchQuery& q, int page) override;

  private:
    std::string get_body(const std::string& path);

    std::string base_url_;
    HttpProviderOptions opts_;
    std::mutex gate_;
    std::chrono::steady_clock::time_point next_slot_{};
};

// Every .java file under project_root except exclude_file (a path relative to
// project_root). Discovery order is a deterministic lexicographic walk. When
// exclude_file matches nothing a warning is appended to diagnostics.
std::vector<SourceDoc> internal_candidates(const std::filesystem::path& project_root,
                                           const std::filesystem::path& exclude_file,
                                           std::vector<std::string>* diagnostics = nullptr);

struct ExternalSearchConfig {
    int session_cap = 1000; // per-session result cap
    int page_limit = 10;
};

// Two provider sessions: one with the misused imports (skipped when absent),
// one with all api imports; each capped, merged with identity dedup keeping
// session-1 ranks first, then docs whose package shares origin_package_prefix
// segment-wise are dropped.
std::vector<SourceDoc> external_candidates(const api::ApiContext& context,
                                           SearchProvider& provider,
                                           const std::string& origin_package_prefix,
                                           const ExternalSearchConfig& config = {});

// True when package_name equals prefix or extends it at a '.' boundary.
// An empty prefix never matches.
bool package_has_prefix(const std::string& package_name, const std::string& prefix);

// Exposed for tests: the package statement of a source text, "" when absent.
std::string parse_package_statement(const std::string& source);

} // namespace augmine::search
