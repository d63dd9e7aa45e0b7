// SPDX-License-Identifier: Apache-2.0
#include "augmine/detection/detection.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace augmine::detection {

namespace {

using aug::Aug;
using aug::Edge;

struct Matcher {
    const Aug& p;
    const Aug& u;
    long budget;

    std::vector<int> order;          // pattern nodes, grouped by (kind,label)
    std::vector<int> group_of;       // order index -> group id
    std::vector<int> group_quota;    // per group: required assignments
    std::vector<int> group_left;     // per group: pattern nodes not yet visited
    std::vector<int> group_assigned; // per group: assignments made
    std::vector<std::vector<int>> group_candidates; // per group: usage node ids

    std::vector<int> assign;
    std::vector<bool> used;
    std::vector<std::vector<int>> incident; // pattern node -> edge indices

    std::vector<int> best_assign;
    int best_edges = -1;

    explicit Matcher(const Aug& pattern, const Aug& usage, long state_budget)
        : p(pattern), u(usage), budget(state_budget) {
        std::map<std::pair<int, std::string>, std::vector<int>> p_groups, u_groups;
        for (const aug::Node& n : p.nodes) {
            p_groups[{static_cast<int>(n.kind), n.label}].push_back(n.id);
        }
        for (const aug::Node& n : u.nodes) {
            u_groups[{static_cast<int>(n.kind), n.label}].push_back(n.id);
        }
        for (auto& [key, p_nodes] : p_groups) {
            auto it = u_groups.find(key);
            int g = static_cast<int>(group_quota.size());
            std::vector<int> candidates = it == u_groups.end() ? std::vector<int>{}
                                                               : it->second;
            group_quota.push_back(static_cast<int>(
                std::min(p_nodes.size(), candidates.size())));
            group_left.push_back(static_cast<int>(p_nodes.size()));
            group_assigned.push_back(0);
            group_candidates.push_back(std::move(candidates));
            for (int v : p_nodes) {
                order.push_back(v);
                group_of.push_back(g);
            }
        }
        assign.assign(p.nodes.size(), -1);
        used.assign(u.nodes.size(), false);
        incident.resize(p.nodes.size());
        for (int ei = 0; ei < static_cast<int>(p.edges.size()); ++ei) {
            incident[p.edges[ei].src].push_back(ei);
            if (p.edges[ei].dst != p.edges[ei].src) {
                incident[p.edges[ei].dst].push_back(ei);
            }
        }
    }

    int edge_gain(int v, int w) const {
        int gain = 0;
        for (int ei : incident[v]) {
            const Edge& e = p.edges[ei];
            int other = e.src == v ? e.dst : e.src;
            if (other == v) continue;
            if (assign[other] < 0) continue;
            int usrc = e.src == v ? w : assign[other];
            int udst = e.dst == v ? w : assign[other];
            if (u.has_edge(usrc, udst, e.kind)) ++gain;
        }
        return gain;
    }

    void search(std::size_t pos, int edges) {
        if (pos == order.size()) {
            if (edges > best_edges) {
                best_edges = edges;
                best_assign = assign;
            }
            return;
        }
        int v = order[pos];
        int g = group_of[pos];
        bool exhausted = budget <= 0;
        --group_left[g];

        bool tried = false;
        for (int w : group_candidates[g]) {
            if (used[w]) continue;
            --budget;
            used[w] = true;
            assign[v] = w;
            ++group_assigned[g];
            search(pos + 1, edges + edge_gain(v, w));
            --group_assigned[g];
            assign[v] = -1;
            used[w] = false;
            tried = true;
            if (exhausted || budget <= 0) break; // greedy completion only
        }
        // skipping must still leave enough nodes to fill the group quota
        if (group_left[g] >= group_quota[g] - group_assigned[g] &&
            !(exhausted && tried)) {
            --budget;
            search(pos + 1, edges);
        }
        ++group_left[g];
    }
};

std::string fingerprint_hex(const Aug& g) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(miner::graph_fingerprint(g)));
    return buf;
}

// exact rational comparison a/b vs c/d for non-negative values
int compare_ratio(long long a, long long b, long long c, long long d) {
    long long lhs = a * d;
    long long rhs = c * b;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

} // namespace

const char* to_string(Classification c) {
    return c == Classification::Misuse ? "misuse" : "correct";
}

FixingPattern load_fixing_pattern(const std::string& text) {
    FixingPattern fix;
    fix.variants = aug::parse_augs(text);
    if (fix.variants.empty()) {
        throw aug::FormatError("fixing pattern: no variants found");
    }
    for (const Aug& v : fix.variants) {
        if (v.nodes.empty()) {
            throw aug::FormatError("fixing pattern: empty variant");
        }
    }
    return fix;
}

MatchResult match_nodes_edges(const Aug& pattern, const Aug& usage, long state_budget) {
    Matcher matcher(pattern, usage, state_budget);
    matcher.search(0, 0);

    MatchResult result;
    result.node_map = matcher.best_assign.empty() ? std::vector<int>(pattern.nodes.size(), -1)
                                                  : matcher.best_assign;
    for (int ei = 0; ei < static_cast<int>(pattern.edges.size()); ++ei) {
        const Edge& e = pattern.edges[ei];
        int src = result.node_map[e.src];
        int dst = result.node_map[e.dst];
        if (src >= 0 && dst >= 0 && usage.has_edge(src, dst, e.kind)) {
            result.matched_edges.push_back(ei);
        }
    }
    return result;
}

Overlap overlap(const Aug& pattern, const Aug& usage) {
    if (pattern.nodes.empty()) {
        throw EmptyPattern("overlap: pattern has no nodes");
    }
    MatchResult match = match_nodes_edges(pattern, usage);
    long long inner_edges = 0;
    for (const Edge& e : pattern.edges) {
        if (match.node_map[e.src] >= 0 && match.node_map[e.dst] >= 0) ++inner_edges;
    }
    Overlap o;
    o.num = match.matched_nodes() + static_cast<long long>(match.matched_edges.size());
    o.den = static_cast<long long>(pattern.nodes.size()) + inner_edges;
    return o;
}

DetectionVerdict detect(const Aug& usage, const std::vector<miner::Pattern>& patterns) {
    DetectionVerdict verdict;
    verdict.usage_ref = usage.method_ref;

    const miner::Pattern* best_interior = nullptr;
    Overlap best_interior_overlap;
    const miner::Pattern* best_total = nullptr;
    Overlap best_total_overlap;

    auto better = [](const Overlap& a, const miner::Pattern& ap, const Overlap& b,
                     const miner::Pattern& bp) {
        int cmp = compare_ratio(a.num, a.den, b.num, b.den);
        if (cmp != 0) return cmp > 0;
        if (ap.support != bp.support) return ap.support > bp.support;
        return miner::graph_fingerprint(ap.graph) < miner::graph_fingerprint(bp.graph);
    };

    for (const miner::Pattern& pattern : patterns) {
        if (pattern.graph.nodes.empty()) continue;
        Overlap o = overlap(pattern.graph, usage);
        if (best_total == nullptr || better(o, pattern, best_total_overlap, *best_total)) {
            best_total = &pattern;
            best_total_overlap = o;
        }
        if (o.interior() &&
            (best_interior == nullptr ||
             better(o, pattern, best_interior_overlap, *best_interior))) {
            best_interior = &pattern;
            best_interior_overlap = o;
        }
    }

    if (best_interior != nullptr) {
        verdict.classification = Classification::Misuse;
        verdict.best_pattern = *best_interior;
        verdict.overlap = best_interior_overlap;
    } else {
        verdict.classification = Classification::Correct;
        if (best_total != nullptr && best_total_overlap.num > 0) {
            verdict.best_pattern = *best_total;
            verdict.overlap = best_total_overlap;
        } else {
            verdict.overlap = Overlap{0, 1};
        }
    }
    return verdict;
}

double relative_pattern_frequency(const FixingPattern& fix, const std::vector<Aug>& augs) {
    if (augs.empty()) {
        throw EmptyInput("relative_pattern_frequency: no graphs to check");
    }
    long best = 0;
    for (const Aug& variant : fix.variants) {
        long count = 0;
        for (const Aug& g : augs) {
            if (aug::contains_relaxed(variant, g)) ++count;
        }
        best = std::max(best, count);
    }
    return static_cast<double>(best) / static_cast<double>(augs.size());
}

nlohmann::json verdict_to_json(const DetectionVerdict& verdict) {
    nlohmann::json j;
    j["usage_ref"] = {{"doc_id", verdict.usage_ref.doc_id},
                      {"method_name", verdict.usage_ref.method_name},
                      {"method_id", verdict.usage_ref.method_id}};
    j["overlap_numerator"] = verdict.overlap.num;
    j["overlap_denominator"] = verdict.overlap.den;
    j["classification"] = to_string(verdict.classification);
    if (verdict.best_pattern) {
        j["pattern_id"] = fingerprint_hex(verdict.best_pattern->graph);
    } else {
        j["pattern_id"] = nullptr;
    }
    return j;
}

} // namespace augmine::detection
