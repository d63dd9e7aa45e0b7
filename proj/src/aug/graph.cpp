// SPDX-License-Identifier: Apache-2.0
#include "augmine/aug/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace augmine::aug {

const char* to_string(NodeKind k) {
    return k == NodeKind::Action ? "action" : "data";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Order: return "order";
        case EdgeKind::Def: return "def";
        case EdgeKind::Recv: return "recv";
        case EdgeKind::Para: return "para";
    }
    return "order";
}

NodeKind node_kind_from(const std::string& s) {
    if (s == "action") return NodeKind::Action;
    if (s == "data") return NodeKind::Data;
    throw FormatError("unknown node kind '" + s + "'");
}

EdgeKind edge_kind_from(const std::string& s) {
    if (s == "order") return EdgeKind::Order;
    if (s == "def") return EdgeKind::Def;
    if (s == "recv") return EdgeKind::Recv;
    if (s == "para") return EdgeKind::Para;
    throw FormatError("unknown edge kind '" + s + "'");
}

namespace {

NodeKind parse_node_kind(const std::string& s, int line_no) {
    try {
        return node_kind_from(s);
    } catch (const FormatError&) {
        throw FormatError("unknown node kind '" + s + "' on line " + std::to_string(line_no));
    }
}

EdgeKind parse_edge_kind(const std::string& s, int line_no) {
    try {
        return edge_kind_from(s);
    } catch (const FormatError&) {
        throw FormatError("unknown edge kind '" + s + "' on line " + std::to_string(line_no));
    }
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string field;
    while (in >> field) out.push_back(field);
    return out;
}

int parse_int(const std::string& s, int line_no) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("bad integer '" + s + "' on line " + std::to_string(line_no));
    }
}

} // namespace

std::string encode_field(const std::string& raw) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c == '%' || c <= 0x20 || c == 0x7f) {
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

std::string decode_field(const std::string& enc) {
    if (enc == "%") return "";
    std::string out;
    out.reserve(enc.size());
    for (size_t i = 0; i < enc.size(); ++i) {
        if (enc[i] == '%' && i + 2 < enc.size()) {
            auto hexval = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'A' && c <= 'F') return c - 'A' + 10;
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                return -1;
            };
            int hi = hexval(enc[i + 1]), lo = hexval(enc[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(enc[i]);
    }
    return out;
}

std::string to_text(const Aug& g) {
    std::ostringstream os;
    os << "AUG " << encode_field(g.method_ref.doc_id) << " "
       << encode_field(g.method_ref.method_name) << " " << g.method_ref.method_id << "\n";
    for (const Node& n : g.nodes) {
        os << "N " << n.id << " " << to_string(n.kind) << " " << encode_field(n.label) << "\n";
    }
    for (const Edge& e : g.edges) {
        os << "E " << e.src << " " << e.dst << " " << to_string(e.kind) << "\n";
    }
    return os.str();
}

std::string to_text(const std::vector<Aug>& graphs) {
    std::string out;
    for (const Aug& g : graphs) out += to_text(g);
    return out;
}

std::vector<Aug> parse_augs(const std::string& text) {
    std::vector<Aug> out;
    Aug* current = nullptr;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_ws(line);
        if (f.empty()) continue;
        if (f[0] == "AUG") {
            if (f.size() != 4) throw FormatError("malformed AUG header on line " + std::to_string(line_no));
            Aug g;
            g.method_ref.doc_id = decode_field(f[1]);
            g.method_ref.method_name = decode_field(f[2]);
            g.method_ref.method_id = parse_int(f[3], line_no);
            out.push_back(std::move(g));
            current = &out.back();
            continue;
        }
        if (f[0] == "N") {
            if (!current) throw FormatError("node before AUG header on line " + std::to_string(line_no));
            if (f.size() != 4) throw FormatError("malformed node on line " + std::to_string(line_no));
            int id = parse_int(f[1], line_no);
            if (id != static_cast<int>(current->nodes.size()))
                throw FormatError("node ids must be dense, line " + std::to_string(line_no));
            current->add_node(parse_node_kind(f[2], line_no), decode_field(f[3]));
            continue;
        }
        if (f[0] == "E") {
            if (!current) throw FormatError("edge before AUG header on line " + std::to_string(line_no));
            if (f.size() != 4) throw FormatError("malformed edge on line " + std::to_string(line_no));
            int src = parse_int(f[1], line_no);
            int dst = parse_int(f[2], line_no);
            int n = static_cast<int>(current->nodes.size());
            if (src < 0 || src >= n || dst < 0 || dst >= n)
                throw FormatError("edge endpoint out of range on line " + std::to_string(line_no));
            current->edges.push_back({src, dst, parse_edge_kind(f[3], line_no)});
            continue;
        }
        // trailer lines (SUPPORT, OCCURRENCES, comments) are not graph content
    }
    return out;
}

namespace {

std::string escape_dot(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string to_dot(const Aug& g) {
    std::ostringstream os;
    os << "digraph aug {\n";
    os << "    rankdir=TB;\n";
    for (const Node& n : g.nodes) {
        os << "    n" << n.id << " [label=\"" << escape_dot(n.label) << "\", shape="
           << (n.kind == NodeKind::Action ? "box" : "ellipse") << "];\n";
    }
    for (const Edge& e : g.edges) {
        bool control = e.kind == EdgeKind::Order;
        os << "    n" << e.src << " -> n" << e.dst << " [label=\"" << to_string(e.kind)
           << "\", style=" << (control ? "dashed" : "solid") << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string canonical_multiset_key(const Aug& g) {
    std::vector<std::string> node_entries;
    node_entries.reserve(g.nodes.size());
    for (const Node& n : g.nodes) {
        node_entries.push_back(std::string(to_string(n.kind)) + ":" + n.label);
    }
    std::sort(node_entries.begin(), node_entries.end());

    std::vector<std::string> edge_entries;
    edge_entries.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
        edge_entries.push_back(g.nodes[e.src].label + ">" + to_string(e.kind) + ">" +
                               g.nodes[e.dst].label);
    }
    std::sort(edge_entries.begin(), edge_entries.end());

    std::string key;
    for (const std::string& s : node_entries) {
        key += s;
        key += '\n';
    }
    key += "||\n";
    for (const std::string& s : edge_entries) {
        key += s;
        key += '\n';
    }
    return key;
}

bool contains_relaxed(const Aug& pattern, const Aug& candidate) {
    std::map<std::pair<int, std::string>, int> node_counts;
    for (const Node& n : candidate.nodes) {
        ++node_counts[{static_cast<int>(n.kind), n.label}];
    }
    for (const Node& n : pattern.nodes) {
        if (--node_counts[{static_cast<int>(n.kind), n.label}] < 0) return false;
    }

    std::map<std::tuple<std::string, int, std::string>, int> edge_counts;
    for (const Edge& e : candidate.edges) {
        ++edge_counts[{candidate.nodes[e.src].label, static_cast<int>(e.kind),
                       candidate.nodes[e.dst].label}];
    }
    for (const Edge& e : pattern.edges) {
        if (--edge_counts[{pattern.nodes[e.src].label, static_cast<int>(e.kind),
                           pattern.nodes[e.dst].label}] < 0) {
            return false;
        }
    }
    return true;
}

namespace {

struct IsoSearch {
    const Aug& p;
    const Aug& c;
    std::vector<int> assign;  // p-node id -> c-node id or -1
    std::vector<bool> used;   // c-node id taken

    bool edges_ok(int pid) const {
        for (const Edge& e : p.edges) {
            if (e.src != pid && e.dst != pid) continue;
            int cs = assign[e.src], cd = assign[e.dst];
            if (cs < 0 || cd < 0) continue;
            if (!c.has_edge(cs, cd, e.kind)) return false;
        }
        return true;
    }

    bool extend(size_t i) {
        if (i == p.nodes.size()) return true;
        const Node& pn = p.nodes[i];
        for (const Node& cn : c.nodes) {
            if (used[cn.id] || cn.kind != pn.kind || cn.label != pn.label) continue;
            assign[pn.id] = cn.id;
            used[cn.id] = true;
            if (edges_ok(pn.id) && extend(i + 1)) return true;
            used[cn.id] = false;
            assign[pn.id] = -1;
        }
        return false;
    }
};

} // namespace

bool exact_subgraph_oracle(const Aug& pattern, const Aug& candidate, int max_nodes) {
    if (static_cast<int>(pattern.nodes.size()) > max_nodes) {
        throw SizeLimitExceeded("pattern has " + std::to_string(pattern.nodes.size()) +
                                " nodes, limit " + std::to_string(max_nodes));
    }
    IsoSearch search{pattern, candidate,
                     std::vector<int>(pattern.nodes.size(), -1),
                     std::vector<bool>(candidate.nodes.size(), false)};
    return search.extend(0);
}

} // namespace augmine::aug
