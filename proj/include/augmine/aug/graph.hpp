// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "augmine/common.hpp"

namespace augmine::aug {

enum class NodeKind { Action, Data };
enum class EdgeKind { Order, Def, Recv, Para };

struct Node {
    int id = 0;
    NodeKind kind = NodeKind::Action;
    std::string label;
};

struct Edge {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Order;

    bool operator==(const Edge& o) const = default;
};

struct MethodRef {
    std::string doc_id;
    std::string method_name;
    int method_id = 0;

    std::string key() const {
        return doc_id + "#" + method_name + "#" + std::to_string(method_id);
    }
    bool operator==(const MethodRef& o) const = default;
};

// Directed labeled multigraph of one method's API usage. Action nodes carry
// method names (plus <init> and <return>); data nodes carry type names or
// UNKNOWN. Parallel edges of different kinds are allowed, duplicates of the
// same kind are not.
struct Aug {
    MethodRef method_ref;
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    int add_node(NodeKind kind, const std::string& label) {
        int id = static_cast<int>(nodes.size());
        nodes.push_back({id, kind, label});
        return id;
    }

    bool has_edge(int src, int dst, EdgeKind kind) const {
        for (const Edge& e : edges) {
            if (e.src == src && e.dst == dst && e.kind == kind) return true;
        }
        return false;
    }

    void add_edge(int src, int dst, EdgeKind kind) {
        if (!has_edge(src, dst, kind)) edges.push_back({src, dst, kind});
    }
};

struct FormatError : Error {
    using Error::Error;
};

struct SizeLimitExceeded : Error {
    using Error::Error;
};

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);
NodeKind node_kind_from(const std::string& s);
EdgeKind edge_kind_from(const std::string& s);

// Line-oriented text format with a bit-exact round trip:
//   AUG <doc-id> <method> <id>
//   N <id> <kind> <label>
//   E <src> <dst> <kind>
// Fields are percent-encoded for '%', whitespace and control characters.
std::string to_text(const Aug& g);
std::string to_text(const std::vector<Aug>& graphs);
std::vector<Aug> parse_augs(const std::string& text);

std::string to_dot(const Aug& g);

std::string encode_field(const std::string& raw);
std::string decode_field(const std::string& enc);

// Multiset view used by relaxed containment and fingerprinting: sorted node
// (kind,label) entries, then sorted edge (srcLabel,kind,dstLabel) entries.
std::string canonical_multiset_key(const Aug& g);

// True iff the pattern's node-label multiset and edge-signature multiset are
// both contained in the candidate's. An overestimate of subgraph isomorphism.
bool contains_relaxed(const Aug& pattern, const Aug& candidate);

// Backtracking subgraph isomorphism for small patterns: a label- and
// kind-preserving injective node mapping under which every pattern edge maps
// to a same-kind candidate edge. Throws SizeLimitExceeded above max_nodes.
bool exact_subgraph_oracle(const Aug& pattern, const Aug& candidate, int max_nodes = 10);

} // namespace augmine::aug
