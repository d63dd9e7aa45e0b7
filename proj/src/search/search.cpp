// SPDX-License-Identifier: Apache-2.0
#include "augmine/search/search.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace augmine::search {

namespace fs = std::filesystem;

std::string to_string(Origin origin) {
    return origin == Origin::Internal ? "internal" : "external";
}

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// All .java files under root as relative generic paths, lexicographic.
std::vector<std::string> java_files_under(const fs::path& root) {
    std::vector<std::string> rels;
    try {
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().extension() != ".java") continue;
            rels.push_back(entry.path().lexically_relative(root).generic_string());
        }
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("directory walk failed: ") + e.what());
    }
    std::sort(rels.begin(), rels.end());
    return rels;
}

} // namespace

std::string parse_package_statement(const std::string& source) {
    size_t i = 0;
    const size_t n = source.size();
    while (i < n) {
        const char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') ++i;
        } else if (c == '/' && i + 1 < n && source[i + 1] == '*') {
            const size_t close = source.find("*/", i + 2);
            if (close == std::string::npos) return "";
            i = close + 2;
        } else if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (i < n && source[i] != quote) {
                if (source[i] == '\\') ++i;
                ++i;
            }
            if (i < n) ++i;
        } else if (c == '@') {
            ++i;
            while (i < n && is_ident_char(source[i])) ++i;
        } else if (is_ident_start(c)) {
            const size_t start = i;
            while (i < n && is_ident_char(source[i])) ++i;
            if (source.substr(start, i - start) != "package") return "";
            std::string pkg;
            while (i < n && source[i] != ';') {
                if (!std::isspace(static_cast<unsigned char>(source[i]))) pkg += source[i];
                ++i;
            }
            return pkg;
        } else {
            ++i; // punctuation before the first word carries no package
        }
    }
    return "";
}

std::string SourceDoc::package_name() const {
    return parse_package_statement(raw_text);
}

bool package_has_prefix(const std::string& package_name, const std::string& prefix) {
    if (prefix.empty()) return false;
    if (package_name == prefix) return true;
    return package_name.size() > prefix.size() &&
           package_name.compare(0, prefix.size(), prefix) == 0 &&
           package_name[prefix.size()] == '.';
}

std::vector<SourceDoc> internal_candidates(const fs::path& project_root,
                                           const fs::path& exclude_file,
                                           std::vector<std::string>* diagnostics) {
    std::error_code ec;
    if (!fs::is_directory(project_root, ec) || ec)
        throw IoError("project root not readable: " + project_root.string());

    const std::string excluded = exclude_file.lexically_normal().generic_string();
    bool exclusion_hit = false;
    std::vector<SourceDoc> docs;
    for (const std::string& rel : java_files_under(project_root)) {
        if (rel == excluded) {
            exclusion_hit = true;
            continue;
        }
        docs.push_back({Origin::Internal, rel, read_text_file(project_root / rel),
                        static_cast<int>(docs.size())});
    }
    if (!exclusion_hit && diagnostics)
        diagnostics->push_back("exclude file '" + excluded + "' not found under " +
                               project_root.string());
    return docs;
}

FsCorpusProvider::FsCorpusProvider(const fs::path& root, int page_size)
    : page_size_(page_size) {
    if (page_size_ <= 0) throw ProviderError("page size must be positive");
    std::error_code ec;
    if (!fs::is_directory(root, ec) || ec)
        throw IoError("corpus root not readable: " + root.string());
    for (const std::string& rel : java_files_under(root))
        files_.emplace_back(rel, read_text_file(root / rel));
}

std::vector<SearchHit> FsCorpusProvider::query(const SearchQuery& q, int page) {
    std::vector<SearchHit> matches;
    for (const auto& [rel, text] : files_) {
        bool matched = false;
        for (const std::string& imp : q.import_statements) {
            if (!imp.empty() && text.find(imp) != std::string::npos) {
                matched = true;
                break;
            }
        }
        if (matched) matches.push_back({rel, text, static_cast<int>(matches.size())});
    }
    const size_t begin = static_cast<size_t>(page) * static_cast<size_t>(page_size_);
    if (page < 0 || begin >= matches.size()) return {};
    const size_t end = std::min(matches.size(), begin + static_cast<size_t>(page_size_));
    return {matches.begin() + static_cast<ptrdiff_t>(begin),
            matches.begin() + static_cast<ptrdiff_t>(end)};
}

namespace {

std::string url_encode(const std::string& s) {
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    for (const char c : s) {
        const bool unreserved = std::isalnum(static_cast<unsigned char>(c)) ||
                                c == '-' || c == '.' || c == '_' || c == '~';
        if (unreserved) {
            out += c;
        } else {
            out += '%';
            out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
            out += hex[static_cast<unsigned char>(c) & 0xF];
        }
    }
    return out;
}

std::string join_lines_object(const nlohmann::json& lines) {
    std::vector<std::pair<long long, const nlohmann::json*>> ordered;
    for (auto it = lines.begin(); it != lines.end(); ++it) {
        long long number = 0;
        try {
            number = std::stoll(it.key());
        } catch (const std::exception&) {
            throw ProviderError("non-numeric line key in search result: " + it.key());
        }
        ordered.emplace_back(number, &it.value());
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string text;
    for (size_t i = 0; i < ordered.size(); ++i) {
        if (i > 0) text += '\n';
        text += ordered[i].second->is_string() ? ordered[i].second->get<std::string>()
                                               : ordered[i].second->dump();
    }
    return text;
}

} // namespace

HttpProvider::HttpProvider(std::string base_url, HttpProviderOptions opts)
    : base_url_(std::move(base_url)), opts_(opts) {}

std::string HttpProvider::get_body(const std::string& path) {
    if (opts_.min_request_interval.count() > 0) {
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard<std::mutex> lock(gate_);
            const auto now = std::chrono::steady_clock::now();
            slot = std::max(now, next_slot_);
            next_slot_ = slot + opts_.min_request_interval;
        }
        std::this_thread::sleep_until(slot);
    }

    std::string last_error;
    const int attempts = opts_.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(opts_.retry_delay);
        httplib::Client client(base_url_);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(10, 0);
        auto res = client.Get(path);
        if (res && res->status >= 200 && res->status < 300) return res->body;
        last_error = res ? "HTTP status " + std::to_string(res->status)
                         : "transport: " + httplib::to_string(res.error());
    }
    throw ProviderError("GET " + base_url_ + path + " failed after " +
                        std::to_string(attempts) + " attempts (" + last_error + ")");
}

std::vector<SearchHit> HttpProvider::query(const SearchQuery& q, int page) {
    std::string terms;
    for (size_t i = 0; i < q.import_statements.size(); ++i) {
        if (i > 0) terms += ' ';
        terms += q.import_statements[i];
    }
    const std::string path = "/api/codesearch_I/?q=" + url_encode(terms) +
                             "&p=" + std::to_string(page) +
                             "&per_page=" + std::to_string(opts_.per_page);
    const std::string body = get_body(path);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed search response: ") + e.what());
    }
    if (!doc.contains("results") || !doc["results"].is_array())
        throw ProviderError("search response lacks a results array");

    std::vector<SearchHit> hits;
    for (const auto& result : doc["results"]) {
        SearchHit hit;
        if (result.contains("id")) {
            const auto& id = result["id"];
            hit.identity = id.is_string() ? id.get<std::string>() : id.dump();
        } else {
            hit.identity = result.value("filename", "");
        }
        if (result.contains("url") && result["url"].is_string()) {
            std::string raw_path = result["url"].get<std::string>();
            if (raw_path.empty() || raw_path.front() != '/') raw_path.insert(0, 1, '/');
            hit.raw_text = get_body(raw_path);
        } else if (result.contains("lines") && result["lines"].is_object()) {
            hit.raw_text = join_lines_object(result["lines"]);
        }
        hit.relevance_rank = page * opts_.per_page + static_cast<int>(hits.size());
        hits.push_back(std::move(hit));
    }
    return hits;
}

std::vector<SourceDoc> external_candidates(const api::ApiContext& context,
                                           SearchProvider& provider,
                                           const std::string& origin_package_prefix,
                                           const ExternalSearchConfig& config) {
    if (context.api_imports.empty())
        throw EmptyQuery("external search requires at least one api import");

    const auto run_session = [&](const std::vector<std::string>& imports) {
        std::vector<SourceDoc> session;
        if (imports.empty()) return session; // session skipped
        const SearchQuery q{imports, config.page_limit};
        for (int page = 0; page < config.page_limit; ++page) {
            if (static_cast<int>(session.size()) >= config.session_cap) break;
            auto hits = provider.query(q, page);
            if (hits.empty()) break;
            for (auto& hit : hits) {
                if (static_cast<int>(session.size()) >= config.session_cap) break;
                session.push_back({Origin::External, std::move(hit.identity),
                                   std::move(hit.raw_text), hit.relevance_rank});
            }
        }
        return session;
    };

    auto session1 = run_session(context.misused_imports);
    auto session2 = run_session(context.import_names());

    std::vector<SourceDoc> merged;
    std::set<std::string> seen;
    for (auto& doc : session1)
        if (seen.insert(doc.identity).second) merged.push_back(std::move(doc));
    for (auto& doc : session2)
        if (seen.insert(doc.identity).second) merged.push_back(std::move(doc));

    std::vector<SourceDoc> kept;
    for (auto& doc : merged)
        if (!package_has_prefix(doc.package_name(), origin_package_prefix))
            kept.push_back(std::move(doc));
    return kept;
}

} // namespace augmine::search
