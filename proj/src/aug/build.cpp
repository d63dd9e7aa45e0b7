// SPDX-License-Identifier: Apache-2.0
#include "augmine/aug/build.hpp"

#include <unordered_map>
#include <unordered_set>

namespace augmine::aug {

namespace {

using java::Expr;
using java::ExprKind;
using java::Stmt;
using java::StmtKind;

constexpr const char* kUnknown = "UNKNOWN";

struct EvalResult {
    int data = -1;    // data node id or -1
    bool fresh = false; // freshly produced by an action in this expression
};

struct VarInfo {
    std::string type; // simple name; "" when unresolved
    bool primitive = false;
};

class Builder {
public:
    Builder(const java::MethodDecl& method, const java::CompilationUnit& unit)
        : method_(method), unit_(unit) {}

    Aug run() {
        collect_known_types();
        register_scope();
        for (const java::StmtPtr& s : method_.body) exec(*s);
        return std::move(g_);
    }

private:
    const java::MethodDecl& method_;
    const java::CompilationUnit& unit_;
    Aug g_;
    std::unordered_map<std::string, VarInfo> vars_;
    std::unordered_map<std::string, int> var_node_;
    std::unordered_map<std::string, int> path_node_;
    std::unordered_set<std::string> known_types_;
    int last_action_ = -1;

    void collect_known_types() {
        for (const java::ImportDecl& imp : unit_.imports) {
            if (!imp.is_wildcard && !imp.is_static) known_types_.insert(imp.simple_name());
        }
        collect_type_names(unit_.types);
    }

    void collect_type_names(const std::vector<java::TypeDecl>& types) {
        for (const java::TypeDecl& t : types) {
            known_types_.insert(t.name);
            collect_type_names(t.nested);
        }
    }

    void register_scope() {
        for (const java::Parameter& p : method_.parameters) {
            if (!p.name.empty()) vars_[p.name] = {p.type_name, p.is_primitive};
        }
        const java::TypeDecl* enclosing = nullptr;
        for (const java::MethodSite& site : java::all_method_sites(unit_)) {
            if (site.method == &method_) enclosing = site.type;
        }
        if (enclosing) {
            for (const java::FieldDecl& f : enclosing->fields) {
                for (const std::string& name : f.names) {
                    if (!vars_.count(name)) vars_[name] = {f.type_name, f.is_primitive};
                }
            }
        }
    }

    int new_action(const std::string& label) {
        int id = g_.add_node(NodeKind::Action, label);
        if (last_action_ >= 0) g_.add_edge(last_action_, id, EdgeKind::Order);
        last_action_ = id;
        return id;
    }

    static bool unresolved_type_name(const std::string& t) {
        return t.empty() || t == "var";
    }

    int var_data_node(const std::string& name) {
        auto bound = var_node_.find(name);
        if (bound != var_node_.end()) return bound->second;
        const VarInfo& info = vars_[name];
        std::string label = unresolved_type_name(info.type) ? kUnknown : info.type;
        int id = g_.add_node(NodeKind::Data, label);
        var_node_[name] = id;
        return id;
    }

    void declare_var(const std::string& name, const std::string& type, bool primitive) {
        vars_[name] = {type, primitive};
        var_node_.erase(name); // a new declaration shadows any previous node
    }

    // pretty path key for field-access chains ("System.out", "this.buf")
    static bool render_path(const Expr& e, std::string& out) {
        if (e.kind == ExprKind::Name) {
            out = e.text;
            return true;
        }
        if (e.kind == ExprKind::FieldAccess && e.target) {
            std::string prefix;
            if (!render_path(*e.target, prefix)) return false;
            out = prefix + "." + e.text;
            return true;
        }
        return false;
    }

    void maybe_relabel_fresh(EvalResult r, const std::string& type) {
        if (r.data < 0 || !r.fresh || unresolved_type_name(type)) return;
        if (g_.nodes[r.data].label == kUnknown) g_.nodes[r.data].label = type;
    }

    // --- expressions ---

    EvalResult eval(const Expr& e, bool want_value) {
        switch (e.kind) {
            case ExprKind::Literal:
                return {};
            case ExprKind::Name:
                return eval_name(e.text, want_value);
            case ExprKind::FieldAccess:
                return eval_field_access(e, want_value);
            case ExprKind::Call:
                return eval_call(e, want_value);
            case ExprKind::New:
                return eval_new(e);
            case ExprKind::ArrayNew:
                for (const java::ExprPtr& a : e.args) eval(*a, false);
                for (const java::ExprPtr& c : e.scanned_calls) eval(*c, false);
                return {};
            case ExprKind::Assign:
                return eval_assign(e);
            case ExprKind::Unary:
                eval(*e.args[0], false);
                return {};
            case ExprKind::Binary:
                for (size_t i = 0; i < e.args.size(); ++i) {
                    if (i > 0 && e.op_texts[i - 1] == "instanceof") continue;
                    eval(*e.args[i], false);
                }
                return {};
            case ExprKind::Ternary: {
                eval(*e.args[0], false);
                EvalResult a = eval(*e.args[1], want_value);
                EvalResult b = eval(*e.args[2], want_value);
                return a.data >= 0 ? a : b;
            }
            case ExprKind::Cast: {
                if (java::is_primitive_type(e.type_name)) {
                    eval(*e.args[0], false);
                    return {};
                }
                EvalResult r = eval(*e.args[0], want_value);
                maybe_relabel_fresh(r, e.type_name);
                return r;
            }
            case ExprKind::Index: {
                EvalResult r = eval(*e.target, want_value);
                for (const java::ExprPtr& a : e.args) eval(*a, false);
                return r;
            }
            case ExprKind::MethodRef:
                if (e.target) eval(*e.target, false);
                return {};
            case ExprKind::Opaque:
                for (const java::ExprPtr& a : e.args) eval(*a, false);
                for (const java::ExprPtr& c : e.scanned_calls) eval(*c, false);
                return {};
        }
        return {};
    }

    EvalResult eval_name(const std::string& name, bool want_value) {
        if (name == "this" || name == "super") return {};
        if (!want_value) return {}; // names materialize only in value positions
        auto it = vars_.find(name);
        if (it != vars_.end()) {
            if (it->second.primitive) return {};
            return {var_data_node(name), false};
        }
        if (known_types_.count(name)) return {}; // static type reference
        if (java::is_primitive_type(name)) return {};
        vars_[name] = {"", false};
        return {var_data_node(name), false};
    }

    EvalResult eval_field_access(const Expr& e, bool want_value) {
        if (e.target && e.target->kind == ExprKind::Name && e.target->text == "this") {
            return eval_name(e.text, want_value);
        }
        if (!want_value) {
            if (e.target) eval(*e.target, false);
            return {};
        }
        std::string path;
        if (render_path(e, path)) {
            auto it = path_node_.find(path);
            if (it != path_node_.end()) return {it->second, false};
            int id = g_.add_node(NodeKind::Data, kUnknown);
            path_node_[path] = id;
            return {id, false};
        }
        if (e.target) eval(*e.target, false);
        return {g_.add_node(NodeKind::Data, kUnknown), false};
    }

    bool is_static_receiver(const Expr& target) const {
        if (target.kind != ExprKind::Name) return false;
        if (vars_.count(target.text)) return false;
        return known_types_.count(target.text) > 0;
    }

    EvalResult eval_call(const Expr& e, bool want_value) {
        if (!e.has_call_args && !e.target) {
            // scan-recovered call: only the action is known
            new_action(e.is_constructor ? "<init>" : e.text);
            return {};
        }
        EvalResult receiver;
        if (e.target && !is_static_receiver(*e.target)) {
            receiver = eval(*e.target, true);
        }
        std::vector<int> arg_nodes;
        for (const java::ExprPtr& a : e.args) {
            EvalResult r = eval(*a, true);
            if (r.data >= 0) arg_nodes.push_back(r.data);
        }
        int action = new_action(e.text);
        if (receiver.data >= 0) g_.add_edge(receiver.data, action, EdgeKind::Recv);
        for (int arg : arg_nodes) g_.add_edge(arg, action, EdgeKind::Para);
        if (!want_value) return {};
        int data = g_.add_node(NodeKind::Data, kUnknown);
        g_.add_edge(action, data, EdgeKind::Def);
        return {data, true};
    }

    EvalResult eval_new(const Expr& e) {
        std::vector<int> arg_nodes;
        for (const java::ExprPtr& a : e.args) {
            EvalResult r = eval(*a, true);
            if (r.data >= 0) arg_nodes.push_back(r.data);
        }
        int action = new_action("<init>");
        for (int arg : arg_nodes) g_.add_edge(arg, action, EdgeKind::Para);
        for (const java::ExprPtr& c : e.scanned_calls) eval(*c, false);
        std::string label = unresolved_type_name(e.type_name) ? kUnknown : e.type_name;
        int data = g_.add_node(NodeKind::Data, label);
        g_.add_edge(action, data, EdgeKind::Def);
        return {data, true};
    }

    EvalResult eval_assign(const Expr& e) {
        bool plain = e.text == "=";
        EvalResult rhs = eval(*e.args[0], true);
        const Expr& lhs = *e.target;
        if (lhs.kind == ExprKind::Name) {
            auto it = vars_.find(lhs.text);
            if (it == vars_.end() && !known_types_.count(lhs.text)) {
                vars_[lhs.text] = {"", false};
                it = vars_.find(lhs.text);
            }
            if (it != vars_.end() && !it->second.primitive && plain && rhs.data >= 0) {
                maybe_relabel_fresh(rhs, it->second.type);
                var_node_[lhs.text] = rhs.data;
            }
        } else if (lhs.kind == ExprKind::FieldAccess &&
                   lhs.target->kind == ExprKind::Name && lhs.target->text == "this") {
            auto it = vars_.find(lhs.text);
            if (it == vars_.end()) {
                vars_[lhs.text] = {"", false};
                it = vars_.find(lhs.text);
            }
            if (!it->second.primitive && plain && rhs.data >= 0) {
                maybe_relabel_fresh(rhs, it->second.type);
                var_node_[lhs.text] = rhs.data;
            }
        } else if (lhs.kind == ExprKind::FieldAccess) {
            std::string path;
            if (render_path(lhs, path) && plain && rhs.data >= 0) {
                path_node_[path] = rhs.data;
            } else if (lhs.target) {
                eval(*lhs.target, false);
            }
        } else {
            eval(lhs, false);
        }
        return rhs;
    }

    // --- statements ---

    void exec(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const java::ExprPtr& e : s.extra_exprs) eval(*e, false);
                for (const java::StmtPtr& c : s.body) exec(*c);
                break;
            case StmtKind::LocalVar:
                exec_local_var(s);
                break;
            case StmtKind::ExprStmt:
                if (s.expr) eval(*s.expr, false);
                break;
            case StmtKind::If:
                eval(*s.expr, false);
                for (const java::StmtPtr& c : s.body) exec(*c);
                for (const java::StmtPtr& c : s.else_body) exec(*c);
                break;
            case StmtKind::While:
                eval(*s.expr, false);
                for (const java::StmtPtr& c : s.body) exec(*c);
                break;
            case StmtKind::DoWhile:
                for (const java::StmtPtr& c : s.body) exec(*c);
                eval(*s.expr, false);
                break;
            case StmtKind::For:
                for (const java::StmtPtr& c : s.init_stmts) exec(*c);
                if (s.expr) eval(*s.expr, false);
                for (const java::StmtPtr& c : s.body) exec(*c);
                for (const java::ExprPtr& e : s.extra_exprs) eval(*e, false);
                break;
            case StmtKind::ForEach:
                declare_var(s.var_name, s.type_name, s.type_is_primitive);
                eval(*s.expr, false);
                for (const java::StmtPtr& c : s.body) exec(*c);
                break;
            case StmtKind::Return: {
                EvalResult r;
                if (s.expr) r = eval(*s.expr, true);
                int action = new_action("<return>");
                if (r.data >= 0) g_.add_edge(r.data, action, EdgeKind::Para);
                break;
            }
            case StmtKind::Throw:
                if (s.expr) eval(*s.expr, false);
                break;
            case StmtKind::Try:
                for (const java::StmtPtr& c : s.init_stmts) exec(*c);
                for (const java::StmtPtr& c : s.body) exec(*c);
                for (const java::CatchClause& clause : s.catches) {
                    if (!clause.var_name.empty()) {
                        declare_var(clause.var_name,
                                    clause.exception_types.empty() ? ""
                                                                   : clause.exception_types[0],
                                    false);
                    }
                    for (const java::StmtPtr& c : clause.body) exec(*c);
                }
                for (const java::StmtPtr& c : s.else_body) exec(*c);
                break;
            case StmtKind::Opaque:
                for (const java::ExprPtr& e : s.scanned_calls) eval(*e, false);
                break;
            case StmtKind::Break:
            case StmtKind::Continue:
            case StmtKind::Empty:
                break;
        }
    }

    void exec_local_var(const Stmt& s) {
        for (const java::Declarator& d : s.declarators) {
            bool primitive = s.type_is_primitive && d.extra_array_dims == 0;
            declare_var(d.name, s.type_name, primitive);
            if (!d.init) continue;
            if (primitive) {
                eval(*d.init, false);
                continue;
            }
            EvalResult r = eval(*d.init, true);
            if (r.data >= 0) {
                maybe_relabel_fresh(r, s.type_name);
                var_node_[d.name] = r.data;
            }
        }
    }
};

} // namespace

Aug build_aug(const java::MethodDecl& method, const java::CompilationUnit& unit) {
    Builder builder(method, unit);
    return builder.run();
}

} // namespace augmine::aug
