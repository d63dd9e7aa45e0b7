// SPDX-License-Identifier: Apache-2.0
#include "augmine/filter/filter.hpp"

#include <cctype>

#include "augmine/java/lexer.hpp"
#include "augmine/java/parser.hpp"

namespace augmine::filter {

std::string to_string(SearchLoc loc) {
    switch (loc) {
    case SearchLoc::Internal: return "internal";
    case SearchLoc::External: return "external";
    default: return "both";
    }
}

std::string to_string(SearchImp imp) {
    return imp == SearchImp::AllImports ? "all_imports" : "misused_imports";
}

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

} // namespace

bool contains_keyword(const std::string& text, const std::string& keyword, MatchMode mode) {
    if (keyword.empty()) return false;
    if (mode == MatchMode::Substring) return text.find(keyword) != std::string::npos;
    size_t pos = 0;
    while ((pos = text.find(keyword, pos)) != std::string::npos) {
        const bool left_clear = pos == 0 || !is_ident_char(text[pos - 1]);
        const size_t end = pos + keyword.size();
        const bool right_clear = end == text.size() || !is_ident_char(text[end]);
        if (left_clear && right_clear) return true;
        ++pos;
    }
    return false;
}

SatisfactionRatio satisfaction_ratio(const search::SourceDoc& doc,
                                     const std::set<std::string>& kw_set,
                                     MatchMode mode) {
    if (kw_set.empty()) throw EmptyKeywordSet("satisfaction ratio needs a non-empty keyword set");
    SatisfactionRatio ratio{0, static_cast<int>(kw_set.size())};
    for (const std::string& kw : kw_set)
        if (contains_keyword(doc.raw_text, kw, mode)) ++ratio.found;
    return ratio;
}

std::vector<search::SourceDoc> filter_files(const std::vector<search::SourceDoc>& docs,
                                            const std::set<std::string>& kw_set,
                                            double sr_min,
                                            MatchMode mode) {
    if (sr_min <= 0.0) return docs;
    std::vector<search::SourceDoc> kept;
    for (const auto& doc : docs) {
        const SatisfactionRatio ratio = satisfaction_ratio(doc, kw_set, mode);
        // found/total >= sr_min, compared without division; the epsilon only
        // absorbs representation error of decimal thresholds like 0.1.
        if (static_cast<double>(ratio.found) + 1e-9 >= sr_min * static_cast<double>(ratio.total))
            kept.push_back(doc);
    }
    return kept;
}

namespace {

MethodFilterResult select_methods(const std::vector<search::SourceDoc>& docs,
                                  const std::set<std::string>& kw_set,
                                  bool filter_enabled) {
    MethodFilterResult out;
    for (size_t i = 0; i < docs.size(); ++i) {
        java::CompilationUnit unit;
        try {
            unit = java::parse_compilation_unit(docs[i].raw_text);
        } catch (const java::SyntaxError& e) {
            out.diagnostics.push_back("skipping unparseable doc '" + docs[i].identity +
                                      "': " + e.what());
            continue;
        }
        for (const auto& site : java::all_method_sites(unit)) {
            auto tokens = java::method_tokens(unit, *site.method);
            if (filter_enabled) {
                bool hit = false;
                for (const std::string& tok : tokens) {
                    if (!java::is_reserved_word(tok) && kw_set.count(tok)) {
                        hit = true;
                        break;
                    }
                }
                if (!hit) continue;
            }
            out.methods.push_back({static_cast<int>(i), docs[i].identity, site.ordinal,
                                   site.method->name, std::move(tokens)});
        }
    }
    return out;
}

} // namespace

MethodFilterResult filter_methods(const std::vector<search::SourceDoc>& docs,
                                  const std::set<std::string>& kw_set) {
    return select_methods(docs, kw_set, true);
}

MethodFilterResult all_methods(const std::vector<search::SourceDoc>& docs) {
    return select_methods(docs, {}, false);
}

double mean_method_sr(const std::vector<MethodSelection>& methods,
                      const std::set<std::string>& kw_set) {
    if (methods.empty()) throw EmptyInput("mean satisfaction ratio over zero methods");
    if (kw_set.empty()) throw EmptyKeywordSet("mean satisfaction ratio needs keywords");
    double sum = 0.0;
    for (const auto& method : methods) {
        const std::set<std::string> tokens(method.tokens.begin(), method.tokens.end());
        int found = 0;
        for (const std::string& kw : kw_set)
            if (tokens.count(kw)) ++found;
        sum += static_cast<double>(found) / static_cast<double>(kw_set.size());
    }
    return sum / static_cast<double>(methods.size());
}

} // namespace augmine::filter
