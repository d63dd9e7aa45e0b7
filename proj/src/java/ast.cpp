// SPDX-License-Identifier: Apache-2.0
#include "augmine/java/ast.hpp"

#include <unordered_set>

namespace augmine::java {

namespace {

void walk_types(const TypeDecl& type, std::vector<MethodSite>& out, int& ordinal) {
    for (const MethodDecl& m : type.methods) {
        out.push_back({&type, &m, ordinal++});
    }
    for (const TypeDecl& nested : type.nested) {
        walk_types(nested, out, ordinal);
    }
}

void collect_calls_expr(const Expr* e, std::vector<const Expr*>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Call || e->kind == ExprKind::New) out.push_back(e);
    collect_calls_expr(e->target.get(), out);
    for (const ExprPtr& a : e->args) collect_calls_expr(a.get(), out);
    for (const ExprPtr& c : e->scanned_calls) collect_calls_expr(c.get(), out);
}

void collect_calls_stmt(const Stmt* s, std::vector<const Expr*>& out) {
    if (!s) return;
    collect_calls_expr(s->expr.get(), out);
    for (const ExprPtr& e : s->extra_exprs) collect_calls_expr(e.get(), out);
    for (const ExprPtr& e : s->scanned_calls) collect_calls_expr(e.get(), out);
    for (const Declarator& d : s->declarators) collect_calls_expr(d.init.get(), out);
    for (const StmtPtr& c : s->init_stmts) collect_calls_stmt(c.get(), out);
    for (const StmtPtr& c : s->body) collect_calls_stmt(c.get(), out);
    for (const StmtPtr& c : s->else_body) collect_calls_stmt(c.get(), out);
    for (const CatchClause& cc : s->catches) {
        for (const StmtPtr& c : cc.body) collect_calls_stmt(c.get(), out);
    }
}

} // namespace

std::vector<MethodSite> all_method_sites(const CompilationUnit& unit) {
    std::vector<MethodSite> out;
    int ordinal = 0;
    for (const TypeDecl& t : unit.types) walk_types(t, out, ordinal);
    return out;
}

bool is_primitive_type(const std::string& name) {
    static const std::unordered_set<std::string> names = {
        "boolean", "byte", "short", "int", "long", "char", "float", "double", "void",
    };
    return names.count(name) > 0;
}

std::vector<std::string> method_tokens(const CompilationUnit& unit, const MethodDecl& method) {
    std::vector<std::string> out;
    for (size_t i = method.token_begin; i < method.token_end && i < unit.tokens.size(); ++i) {
        const Token& t = unit.tokens[i];
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Keyword:
            case TokenKind::IntLiteral:
            case TokenKind::FloatLiteral:
            case TokenKind::CharLiteral:
                out.push_back(t.text);
                break;
            default:
                break;
        }
    }
    return out;
}

std::vector<const Expr*> collect_calls(const MethodDecl& method) {
    std::vector<const Expr*> out;
    for (const StmtPtr& s : method.body) collect_calls_stmt(s.get(), out);
    return out;
}

} // namespace augmine::java
