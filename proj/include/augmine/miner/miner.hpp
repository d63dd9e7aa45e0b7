// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "augmine/aug/graph.hpp"
#include "augmine/common.hpp"

namespace augmine::miner {

// A closed frequent usage pattern. Support counts methods, not embeddings:
// a method that contains the pattern five times still contributes one.
struct Pattern {
    aug::Aug graph; // method_ref cleared
    int support = 0;
    std::vector<aug::MethodRef> occurrences; // sorted, one per method
    bool closed = true;
};

struct MiningConfig {
    std::optional<int> min_support_absolute;
    std::optional<double> min_support_relative; // in (0,1], ceil(rel * methods)
    int max_pattern_nodes = 20;
    std::chrono::milliseconds timeout = std::chrono::minutes(10);
};

struct MiningResult {
    std::vector<Pattern> patterns;
    bool truncated = false;
    std::string truncation_reason; // "timeout" or "max_pattern_nodes"
};

struct RankedPattern {
    Pattern pattern;
    int rank = 0; // patterns with equal support share a rank; the next
                  // distinct support skips by the tie-group size
};

class EmptyInput : public Error {
  public:
    using Error::Error;
};

// Thrown only for invalid configs; an expiring deadline does not throw, it
// truncates the result instead.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Level-wise enumeration of connected subgraphs shared across methods.
// Candidates grow one adjacent node+edge at a time; extra edges between
// already-included nodes are absorbed in edge-count order within a level,
// and every intermediate stays a candidate so differing supports survive.
// Candidates cluster by graph_fingerprint equality, which treats equal
// node/edge multisets as isomorphic (a documented overestimate).
MiningResult mine_patterns(const std::vector<aug::Aug>& augs, const MiningConfig& config);

// 64-bit hash of the canonical multiset key. Isomorphic graphs always
// collide; non-isomorphic graphs may (accepted false merge).
std::uint64_t graph_fingerprint(const aug::Aug& g);

// Descending support with shared ranks; ties ordered by fingerprint.
std::vector<RankedPattern> rank_patterns(const std::vector<Pattern>& patterns);

// Every entry with rank <= k (so a tie group straddling k stays whole).
std::vector<RankedPattern> top_at_k(const std::vector<RankedPattern>& ranked, int k);

// Text form: the graph in AUG text format followed by SUPPORT and
// OCCURRENCES trailer lines. Plain AUG parsers skip the trailers.
std::string to_text(const Pattern& pattern);
std::string to_text(const std::vector<Pattern>& patterns);
std::vector<Pattern> parse_patterns(const std::string& text);

nlohmann::json to_json(const Pattern& pattern);
Pattern pattern_from_json(const nlohmann::json& j);

// Resolves the configured threshold against a method count, validating the
// config (exactly one of absolute/relative must be set).
int resolve_min_support(const MiningConfig& config, int method_count);

} // namespace augmine::miner
