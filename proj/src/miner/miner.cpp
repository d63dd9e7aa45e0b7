// SPDX-License-Identifier: Apache-2.0
#include "augmine/miner/miner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace augmine::miner {

namespace {

using aug::Aug;
using aug::Edge;
using aug::MethodRef;

// An instance is a concrete sub-multigraph of one host AUG: the node ids and
// edge indices it covers, both sorted. The pattern it instantiates is that
// subgraph up to isomorphism, so no explicit node mapping is needed.
struct Instance {
    int host = 0;
    std::vector<int> nodes;
    std::vector<int> edges;
};

struct Cluster {
    std::vector<Instance> instances;
    std::set<std::tuple<int, std::vector<int>, std::vector<int>>> seen;
    std::set<std::string> parent_keys;
};

// edge count -> canonical key -> cluster; the inner map keeps processing
// order deterministic.
using Buckets = std::map<int, std::map<std::string, Cluster>>;

Aug subgraph_of(const Aug& host, const Instance& inst) {
    Aug g;
    std::map<int, int> local;
    for (int hid : inst.nodes) {
        local[hid] = g.add_node(host.nodes[hid].kind, host.nodes[hid].label);
    }
    for (int ei : inst.edges) {
        const Edge& e = host.edges[ei];
        g.add_edge(local[e.src], local[e.dst], e.kind);
    }
    return g;
}

void add_instance(Buckets& buckets, const std::vector<Aug>& augs, Instance inst,
                  const std::string* parent_key) {
    Aug sg = subgraph_of(augs[inst.host], inst);
    Cluster& cluster = buckets[static_cast<int>(inst.edges.size())]
                              [aug::canonical_multiset_key(sg)];
    if (parent_key != nullptr) cluster.parent_keys.insert(*parent_key);
    auto sig = std::make_tuple(inst.host, inst.nodes, inst.edges);
    if (!cluster.seen.insert(std::move(sig)).second) return;
    cluster.instances.push_back(std::move(inst));
}

std::vector<int> with_sorted_insert(const std::vector<int>& v, int x) {
    std::vector<int> out = v;
    out.insert(std::lower_bound(out.begin(), out.end(), x), x);
    return out;
}

// Encodes a ref component for the OCCURRENCES trailer: on top of the field
// escapes, '#' and ',' must not survive because they delimit the list.
std::string encode_ref_component(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (c == '%' || c == '#' || c == ',' || c <= 0x20 || c == 0x7f) {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    if (out.empty()) out = "%";
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

int resolve_min_support(const MiningConfig& config, int method_count) {
    bool has_abs = config.min_support_absolute.has_value();
    bool has_rel = config.min_support_relative.has_value();
    if (has_abs == has_rel) {
        throw ConfigError("mining config: exactly one of min_support_absolute "
                          "and min_support_relative must be set");
    }
    if (has_abs) {
        if (*config.min_support_absolute < 1) {
            throw ConfigError("mining config: min_support_absolute must be positive");
        }
        return *config.min_support_absolute;
    }
    double rel = *config.min_support_relative;
    if (!(rel > 0.0) || rel > 1.0) {
        throw ConfigError("mining config: min_support_relative must be in (0,1]");
    }
    // ceiling with a guard against representation noise (0.004 * 250 must
    // resolve to 1, not 2)
    double scaled = rel * static_cast<double>(method_count);
    auto threshold = static_cast<long>(std::ceil(scaled - 1e-9));
    return static_cast<int>(std::max(1L, threshold));
}

std::uint64_t graph_fingerprint(const Aug& g) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : aug::canonical_multiset_key(g)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

MiningResult mine_patterns(const std::vector<Aug>& augs, const MiningConfig& config) {
    if (augs.empty()) throw EmptyInput("mine_patterns: no input graphs");
    if (config.max_pattern_nodes < 1) {
        throw ConfigError("mining config: max_pattern_nodes must be positive");
    }
    if (config.timeout.count() <= 0) {
        throw ConfigError("mining config: timeout must be positive");
    }

    std::set<std::string> method_keys;
    for (const Aug& g : augs) method_keys.insert(g.method_ref.key());
    const int min_support = resolve_min_support(config, static_cast<int>(method_keys.size()));

    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + config.timeout;

    MiningResult result;
    bool expired = false;
    long ops = 0;
    auto check_deadline = [&]() {
        if (!expired && Clock::now() >= deadline) {
            expired = true;
            result.truncated = true;
            result.truncation_reason = "timeout";
        }
        return expired;
    };

    std::map<std::string, int> support_by_key;
    std::set<std::string> non_closed;
    std::set<std::string> incomplete; // emitted but extensions not fully explored
    std::map<std::string, Pattern> emitted;

    Buckets current;
    for (int h = 0; h < static_cast<int>(augs.size()); ++h) {
        for (int v = 0; v < static_cast<int>(augs[h].nodes.size()); ++v) {
            add_instance(current, augs, Instance{h, {v}, {}}, nullptr);
        }
    }

    for (int level = 1; !current.empty() && !check_deadline(); ++level) {
        Buckets next;
        const bool at_node_cap = level >= config.max_pattern_nodes;
        while (!current.empty() && !expired) {
            auto bucket_it = current.begin();
            auto bucket = std::move(bucket_it->second);
            current.erase(bucket_it);
            for (auto& [key, cluster] : bucket) {
                std::map<std::string, MethodRef> methods;
                for (const Instance& inst : cluster.instances) {
                    const MethodRef& ref = augs[inst.host].method_ref;
                    methods.emplace(ref.key(), ref);
                }
                const int support = static_cast<int>(methods.size());
                support_by_key[key] = support;
                for (const std::string& pk : cluster.parent_keys) {
                    auto it = support_by_key.find(pk);
                    if (it != support_by_key.end() && it->second == support) {
                        non_closed.insert(pk);
                    }
                }
                if (support < min_support) continue;

                Pattern pattern;
                pattern.graph = subgraph_of(augs[cluster.instances[0].host],
                                            cluster.instances[0]);
                pattern.support = support;
                for (auto& [mkey, ref] : methods) pattern.occurrences.push_back(ref);
                emitted.emplace(key, std::move(pattern));

                for (const Instance& inst : cluster.instances) {
                    const Aug& host = augs[inst.host];
                    for (int ei = 0; ei < static_cast<int>(host.edges.size()); ++ei) {
                        if (++ops % 1000 == 0 && check_deadline()) break;
                        if (std::binary_search(inst.edges.begin(), inst.edges.end(), ei)) {
                            continue;
                        }
                        const Edge& e = host.edges[ei];
                        bool src_in = std::binary_search(inst.nodes.begin(),
                                                         inst.nodes.end(), e.src);
                        bool dst_in = std::binary_search(inst.nodes.begin(),
                                                         inst.nodes.end(), e.dst);
                        if (src_in && dst_in) {
                            Instance ext{inst.host, inst.nodes,
                                         with_sorted_insert(inst.edges, ei)};
                            add_instance(current, augs, std::move(ext), &key);
                        } else if (src_in || dst_in) {
                            if (at_node_cap) {
                                if (!result.truncated) {
                                    result.truncated = true;
                                    result.truncation_reason = "max_pattern_nodes";
                                }
                                incomplete.insert(key);
                                continue;
                            }
                            int new_node = src_in ? e.dst : e.src;
                            Instance ext{inst.host,
                                         with_sorted_insert(inst.nodes, new_node),
                                         with_sorted_insert(inst.edges, ei)};
                            add_instance(next, augs, std::move(ext), &key);
                        }
                    }
                    if (expired) break;
                }
                if (expired) {
                    incomplete.insert(key);
                    break;
                }
            }
        }
        current = std::move(next);
    }

    for (auto& [key, pattern] : emitted) {
        if (non_closed.count(key) != 0) continue;
        pattern.closed = incomplete.count(key) == 0;
        result.patterns.push_back(std::move(pattern));
    }
    return result;
}

std::vector<RankedPattern> rank_patterns(const std::vector<Pattern>& patterns) {
    std::vector<RankedPattern> out;
    out.reserve(patterns.size());
    for (const Pattern& p : patterns) out.push_back(RankedPattern{p, 0});
    std::sort(out.begin(), out.end(), [](const RankedPattern& a, const RankedPattern& b) {
        if (a.pattern.support != b.pattern.support) {
            return a.pattern.support > b.pattern.support;
        }
        std::uint64_t fa = graph_fingerprint(a.pattern.graph);
        std::uint64_t fb = graph_fingerprint(b.pattern.graph);
        if (fa != fb) return fa < fb;
        return aug::canonical_multiset_key(a.pattern.graph) <
               aug::canonical_multiset_key(b.pattern.graph);
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i > 0 && out[i].pattern.support == out[i - 1].pattern.support) {
            out[i].rank = out[i - 1].rank;
        } else {
            out[i].rank = static_cast<int>(i) + 1;
        }
    }
    return out;
}

std::vector<RankedPattern> top_at_k(const std::vector<RankedPattern>& ranked, int k) {
    std::vector<RankedPattern> out;
    for (const RankedPattern& rp : ranked) {
        if (rp.rank <= k) out.push_back(rp);
    }
    return out;
}

std::string to_text(const Pattern& pattern) {
    Aug g = pattern.graph;
    g.method_ref = MethodRef{};
    std::ostringstream out;
    out << aug::to_text(g);
    out << "SUPPORT " << pattern.support << "\n";
    out << "OCCURRENCES ";
    for (std::size_t i = 0; i < pattern.occurrences.size(); ++i) {
        const MethodRef& ref = pattern.occurrences[i];
        if (i > 0) out << ",";
        out << encode_ref_component(ref.doc_id) << "#"
            << encode_ref_component(ref.method_name) << "#" << ref.method_id;
    }
    out << "\n";
    return out.str();
}

std::string to_text(const std::vector<Pattern>& patterns) {
    std::string out;
    for (const Pattern& p : patterns) out += to_text(p);
    return out;
}

std::vector<Pattern> parse_patterns(const std::string& text) {
    std::vector<Pattern> out;
    // segment into blocks starting at AUG lines; the graph parser skips the
    // trailer lines on its own
    std::vector<std::string> block_lines;

    auto flush = [&]() {
        if (block_lines.empty()) return;
        std::string block;
        for (const std::string& line : block_lines) block += line + "\n";
        std::vector<Aug> graphs = aug::parse_augs(block);
        if (graphs.size() != 1) {
            throw aug::FormatError("pattern block must contain exactly one graph");
        }
        Pattern p;
        p.graph = std::move(graphs[0]);
        std::optional<int> support_field;
        for (const std::string& line : block_lines) {
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "SUPPORT") {
                int value = 0;
                if (!(ls >> value) || value < 0) {
                    throw aug::FormatError("bad SUPPORT line: " + line);
                }
                support_field = value;
            } else if (tag == "OCCURRENCES") {
                std::string rest;
                std::getline(ls, rest);
                if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
                if (!rest.empty() && rest.back() == '\r') rest.pop_back();
                if (rest.empty()) continue;
                for (const std::string& item : split(rest, ',')) {
                    std::vector<std::string> parts = split(item, '#');
                    if (parts.size() != 3) {
                        throw aug::FormatError("bad occurrence ref: " + item);
                    }
                    MethodRef ref;
                    ref.doc_id = aug::decode_field(parts[0]);
                    ref.method_name = aug::decode_field(parts[1]);
                    try {
                        ref.method_id = std::stoi(parts[2]);
                    } catch (const std::exception&) {
                        throw aug::FormatError("bad occurrence id: " + item);
                    }
                    p.occurrences.push_back(std::move(ref));
                }
            }
        }
        p.support = support_field.value_or(static_cast<int>(p.occurrences.size()));
        if (support_field && !p.occurrences.empty() &&
            *support_field != static_cast<int>(p.occurrences.size())) {
            throw aug::FormatError("SUPPORT does not match OCCURRENCES count");
        }
        out.push_back(std::move(p));
        block_lines.clear();
    };

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("AUG", 0) == 0) flush();
        if (!line.empty()) block_lines.push_back(line);
    }
    flush();
    return out;
}

nlohmann::json to_json(const Pattern& pattern) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const aug::Node& n : pattern.graph.nodes) {
        nodes.push_back({{"id", n.id},
                         {"kind", std::string(aug::to_string(n.kind))},
                         {"label", n.label}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : pattern.graph.edges) {
        edges.push_back({{"src", e.src},
                         {"dst", e.dst},
                         {"kind", std::string(aug::to_string(e.kind))}});
    }
    nlohmann::json occ = nlohmann::json::array();
    for (const MethodRef& ref : pattern.occurrences) {
        occ.push_back({{"doc_id", ref.doc_id},
                       {"method_name", ref.method_name},
                       {"method_id", ref.method_id}});
    }
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(graph_fingerprint(pattern.graph)));
    return {{"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"support", pattern.support},
            {"occurrences", std::move(occ)},
            {"closed", pattern.closed},
            {"fingerprint", std::string(fp)}};
}

Pattern pattern_from_json(const nlohmann::json& j) {
    Pattern p;
    for (const nlohmann::json& n : j.at("nodes")) {
        p.graph.add_node(aug::node_kind_from(n.at("kind").get<std::string>()),
                         n.at("label").get<std::string>());
    }
    for (const nlohmann::json& e : j.at("edges")) {
        p.graph.add_edge(e.at("src").get<int>(), e.at("dst").get<int>(),
                         aug::edge_kind_from(e.at("kind").get<std::string>()));
    }
    p.support = j.at("support").get<int>();
    for (const nlohmann::json& o : j.value("occurrences", nlohmann::json::array())) {
        MethodRef ref;
        ref.doc_id = o.at("doc_id").get<std::string>();
        ref.method_name = o.at("method_name").get<std::string>();
        ref.method_id = o.at("method_id").get<int>();
        p.occurrences.push_back(std::move(ref));
    }
    p.closed = j.value("closed", true);
    return p;
}

} // namespace augmine::miner
