// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "augmine/common.hpp"
#include "augmine/search/search.hpp"

namespace augmine::filter {

struct EmptyKeywordSet : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

enum class SearchLoc { Internal, External, Both };
enum class SearchImp { AllImports, MisusedImports };

std::string to_string(SearchLoc loc);
std::string to_string(SearchImp imp);

// One cell of the strategy matrix. sr takes {0, 0.25, 0.5, 0.75, 1} in the
// replication matrix and any value in [0,1] otherwise.
struct StrategyConfig {
    SearchLoc search_loc = SearchLoc::Internal;
    SearchImp search_imp = SearchImp::AllImports;
    double sr = 0.0;
    bool method_filter = false;
};

// WholeToken requires no identifier character ([A-Za-z0-9_$]) adjacent to the
// occurrence; Substring is the naive alternative, kept selectable so both
// readings stay testable. An empty keyword never matches.
enum class MatchMode { WholeToken, Substring };

bool contains_keyword(const std::string& text, const std::string& keyword,
                      MatchMode mode = MatchMode::WholeToken);

// found/total keeps the ratio exact; value() is the real in [0,1].
struct SatisfactionRatio {
    int found = 0;
    int total = 0;

    double value() const { return total == 0 ? 0.0 : static_cast<double>(found) / total; }
};

SatisfactionRatio satisfaction_ratio(const search::SourceDoc& doc,
                                     const std::set<std::string>& kw_set,
                                     MatchMode mode = MatchMode::WholeToken);

// Docs whose satisfaction ratio is >= sr_min, input order preserved.
// sr_min <= 0 returns the input unchanged without touching the keyword set.
std::vector<search::SourceDoc> filter_files(const std::vector<search::SourceDoc>& docs,
                                            const std::set<std::string>& kw_set,
                                            double sr_min,
                                            MatchMode mode = MatchMode::WholeToken);

struct MethodSelection {
    int doc_index = 0;          // into the input doc list
    std::string doc_identity;
    int ordinal = 0;            // method position within its compilation unit
    std::string method_name;
    std::vector<std::string> tokens; // method tokens in source order
};

struct MethodFilterResult {
    std::vector<MethodSelection> methods;
    std::vector<std::string> diagnostics; // one entry per skipped unparseable doc
};

// Methods whose token set, Java reserved words removed, intersects kw_set.
// Unparseable docs are skipped with a diagnostic.
MethodFilterResult filter_methods(const std::vector<search::SourceDoc>& docs,
                                  const std::set<std::string>& kw_set);

// The disabled-filter path: every method of every parseable doc.
MethodFilterResult all_methods(const std::vector<search::SourceDoc>& docs);

// Arithmetic mean of per-method keyword satisfaction (token-level containment).
double mean_method_sr(const std::vector<MethodSelection>& methods,
                      const std::set<std::string>& kw_set);

} // namespace augmine::filter
