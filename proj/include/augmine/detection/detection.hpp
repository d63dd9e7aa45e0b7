// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "augmine/aug/graph.hpp"
#include "augmine/common.hpp"
#include "augmine/miner/miner.hpp"

namespace augmine::detection {

// Manually distilled variants of the graph a fix introduces.
struct FixingPattern {
    std::vector<aug::Aug> variants; // non-empty, each variant non-empty
};

class EmptyPattern : public Error {
  public:
    using Error::Error;
};

class EmptyInput : public Error {
  public:
    using Error::Error;
};

// Parses one or more variants from the AUG text format and validates them.
FixingPattern load_fixing_pattern(const std::string& text);

struct MatchResult {
    std::vector<int> node_map;       // pattern node id -> usage node id, -1 if unmatched
    std::vector<int> matched_edges;  // indices into pattern's edge list

    int matched_nodes() const {
        int n = 0;
        for (int m : node_map) {
            if (m >= 0) ++n;
        }
        return n;
    }
};

// Injective mapping from pattern nodes to same-kind same-label usage nodes,
// maximizing matched nodes first and matched edges second. The search
// backtracks over per-label assignments within a state budget; once the
// budget is spent it completes greedily, so a full assignment always comes
// back even on adversarial inputs.
MatchResult match_nodes_edges(const aug::Aug& pattern, const aug::Aug& usage,
                              long state_budget = 10000);

// Exact rational overlap value. Kept as integers so the 0/1 classification
// boundary never depends on floating-point rounding.
struct Overlap {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool interior() const { return num > 0 && num < den; }
};

// (|matchedNodes| + |matchedEdges|) over (|nodes(p)| + |p-edges whose both
// endpoints were matched|): unmatched regions of the pattern count against
// the score, but their dangling edges do not inflate the denominator.
Overlap overlap(const aug::Aug& pattern, const aug::Aug& usage);

enum class Classification { Correct, Misuse };

const char* to_string(Classification c);

struct DetectionVerdict {
    aug::MethodRef usage_ref;
    std::optional<miner::Pattern> best_pattern;
    Overlap overlap;
    Classification classification = Classification::Correct;
};

// A usage is a misuse when some pattern overlaps it strictly between 0 and
// 1; the verdict carries the interior pattern with the highest overlap
// (ties: higher support, then fingerprint). With no interior overlap the
// usage is correct and the verdict reports the best total overlap, which is
// then exactly 0 or exactly 1.
DetectionVerdict detect(const aug::Aug& usage, const std::vector<miner::Pattern>& patterns);

// Highest per-variant share of graphs that contain the variant under
// relaxed containment.
double relative_pattern_frequency(const FixingPattern& fix, const std::vector<aug::Aug>& augs);

nlohmann::json verdict_to_json(const DetectionVerdict& verdict);

} // namespace augmine::detection
