// SPDX-License-Identifier: Apache-2.0
#include "augmine/java/printer.hpp"

#include <sstream>

namespace augmine::java {

namespace {

std::string ind(int n) { return std::string(static_cast<size_t>(n) * 4, ' '); }

void print_expr(std::ostringstream& os, const Expr& e);

void print_args(std::ostringstream& os, const std::vector<ExprPtr>& args) {
    os << "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *args[i]);
    }
    os << ")";
}

void print_expr(std::ostringstream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal:
            if (e.literal_kind == TokenKind::StringLiteral) os << '"' << e.text << '"';
            else if (e.literal_kind == TokenKind::CharLiteral) os << '\'' << e.text << '\'';
            else os << e.text;
            break;
        case ExprKind::Name:
            os << e.text;
            break;
        case ExprKind::FieldAccess:
            print_expr(os, *e.target);
            os << "." << e.text;
            break;
        case ExprKind::Call:
            if (e.target) {
                print_expr(os, *e.target);
                os << ".";
            }
            os << e.text;
            if (e.has_call_args) {
                print_args(os, e.args);
            } else {
                os << "()";
            }
            break;
        case ExprKind::New:
            os << "new " << e.type_name;
            print_args(os, e.args);
            break;
        case ExprKind::ArrayNew:
            if (!e.type_name.empty()) {
                os << "new " << e.type_name;
                bool braced = !e.args.empty() && e.args[0]->kind == ExprKind::ArrayNew &&
                              e.args[0]->type_name.empty();
                if (braced) {
                    os << "[]";
                    print_expr(os, *e.args[0]);
                } else {
                    for (const ExprPtr& a : e.args) {
                        os << "[";
                        print_expr(os, *a);
                        os << "]";
                    }
                }
            } else { // bare initializer
                os << "{";
                for (size_t i = 0; i < e.args.size(); ++i) {
                    if (i) os << ", ";
                    print_expr(os, *e.args[i]);
                }
                os << "}";
            }
            break;
        case ExprKind::Assign:
            print_expr(os, *e.target);
            os << " " << e.text << " ";
            print_expr(os, *e.args[0]);
            break;
        case ExprKind::Unary:
            os << e.text;
            print_expr(os, *e.args[0]);
            break;
        case ExprKind::Binary:
            for (size_t i = 0; i < e.args.size(); ++i) {
                if (i) os << " " << e.op_texts[i - 1] << " ";
                print_expr(os, *e.args[i]);
            }
            break;
        case ExprKind::Ternary:
            print_expr(os, *e.args[0]);
            os << " ? ";
            print_expr(os, *e.args[1]);
            os << " : ";
            print_expr(os, *e.args[2]);
            break;
        case ExprKind::Cast:
            os << "(" << e.type_name << ") ";
            print_expr(os, *e.args[0]);
            break;
        case ExprKind::Index:
            print_expr(os, *e.target);
            os << "[";
            if (!e.args.empty()) print_expr(os, *e.args[0]);
            os << "]";
            break;
        case ExprKind::MethodRef:
            print_expr(os, *e.target);
            os << "::" << e.text;
            break;
        case ExprKind::Opaque:
            os << "0";
            break;
    }
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent);

void print_block(std::ostringstream& os, const std::vector<StmtPtr>& body, int indent) {
    os << "{\n";
    for (const StmtPtr& s : body) print_stmt(os, *s, indent + 1);
    os << ind(indent) << "}";
}

void print_local_var(std::ostringstream& os, const Stmt& s) {
    os << s.type_name << " ";
    for (size_t i = 0; i < s.declarators.size(); ++i) {
        const Declarator& d = s.declarators[i];
        if (i) os << ", ";
        os << d.name;
        for (int k = 0; k < d.extra_array_dims; ++k) os << "[]";
        if (d.init) {
            os << " = ";
            print_expr(os, *d.init);
        }
    }
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
    os << ind(indent);
    switch (s.kind) {
        case StmtKind::Block:
            if (!s.extra_exprs.empty()) {
                os << "synchronized (";
                print_expr(os, *s.extra_exprs[0]);
                os << ") ";
            }
            print_block(os, s.body, indent);
            os << "\n";
            break;
        case StmtKind::LocalVar:
            print_local_var(os, s);
            os << ";\n";
            break;
        case StmtKind::ExprStmt:
            print_expr(os, *s.expr);
            os << ";\n";
            break;
        case StmtKind::If:
            os << "if (";
            print_expr(os, *s.expr);
            os << ") ";
            print_block(os, s.body, indent);
            if (!s.else_body.empty()) {
                os << " else ";
                print_block(os, s.else_body, indent);
            }
            os << "\n";
            break;
        case StmtKind::While:
            os << "while (";
            print_expr(os, *s.expr);
            os << ") ";
            print_block(os, s.body, indent);
            os << "\n";
            break;
        case StmtKind::DoWhile:
            os << "do ";
            print_block(os, s.body, indent);
            os << " while (";
            print_expr(os, *s.expr);
            os << ");\n";
            break;
        case StmtKind::For:
            os << "for (";
            for (size_t i = 0; i < s.init_stmts.size(); ++i) {
                if (i) os << ", ";
                const Stmt& init = *s.init_stmts[i];
                if (init.kind == StmtKind::LocalVar) print_local_var(os, init);
                else print_expr(os, *init.expr);
            }
            os << "; ";
            if (s.expr) print_expr(os, *s.expr);
            os << "; ";
            for (size_t i = 0; i < s.extra_exprs.size(); ++i) {
                if (i) os << ", ";
                print_expr(os, *s.extra_exprs[i]);
            }
            os << ") ";
            print_block(os, s.body, indent);
            os << "\n";
            break;
        case StmtKind::ForEach:
            os << "for (" << s.type_name << " " << s.var_name << " : ";
            print_expr(os, *s.expr);
            os << ") ";
            print_block(os, s.body, indent);
            os << "\n";
            break;
        case StmtKind::Return:
            os << "return";
            if (s.expr) {
                os << " ";
                print_expr(os, *s.expr);
            }
            os << ";\n";
            break;
        case StmtKind::Throw:
            os << "throw ";
            print_expr(os, *s.expr);
            os << ";\n";
            break;
        case StmtKind::Try:
            os << "try ";
            if (!s.init_stmts.empty()) {
                os << "(";
                for (size_t i = 0; i < s.init_stmts.size(); ++i) {
                    if (i) os << "; ";
                    const Stmt& res = *s.init_stmts[i];
                    if (res.kind == StmtKind::LocalVar) print_local_var(os, res);
                    else print_expr(os, *res.expr);
                }
                os << ") ";
            }
            print_block(os, s.body, indent);
            for (const CatchClause& c : s.catches) {
                os << " catch (";
                for (size_t i = 0; i < c.exception_types.size(); ++i) {
                    if (i) os << " | ";
                    os << c.exception_types[i];
                }
                os << " " << c.var_name << ") ";
                print_block(os, c.body, indent);
            }
            if (!s.else_body.empty()) {
                os << " finally ";
                print_block(os, s.else_body, indent);
            }
            os << "\n";
            break;
        case StmtKind::Break:
            os << "break;\n";
            break;
        case StmtKind::Continue:
            os << "continue;\n";
            break;
        case StmtKind::Empty:
            os << ";\n";
            break;
        case StmtKind::Opaque:
            os << ";\n";
            break;
    }
}

void print_method(std::ostringstream& os, const MethodDecl& m, int indent) {
    os << ind(indent);
    for (const std::string& a : m.annotations) os << "@" << a << " ";
    if (!m.is_constructor) {
        os << (m.return_type.empty() ? "void" : m.return_type) << " ";
    }
    os << m.name << "(";
    for (size_t i = 0; i < m.parameters.size(); ++i) {
        const Parameter& p = m.parameters[i];
        if (i) os << ", ";
        os << p.type_name;
        for (int k = 0; k < p.array_dims; ++k) os << "[]";
        if (p.is_varargs) os << "...";
        os << " " << p.name;
    }
    os << ")";
    if (!m.thrown_types.empty()) {
        os << " throws ";
        for (size_t i = 0; i < m.thrown_types.size(); ++i) {
            if (i) os << ", ";
            os << m.thrown_types[i];
        }
    }
    if (m.is_abstract) {
        os << ";\n";
        return;
    }
    os << " {\n";
    for (const StmtPtr& s : m.body) print_stmt(os, *s, indent + 1);
    os << ind(indent) << "}\n";
}

void print_type(std::ostringstream& os, const TypeDecl& t, int indent) {
    os << ind(indent);
    switch (t.kind) {
        case TypeDecl::Kind::Class: os << "class "; break;
        case TypeDecl::Kind::Interface: os << "interface "; break;
        case TypeDecl::Kind::Enum: os << "enum "; break;
    }
    os << t.name;
    if (!t.extends_type.empty()) os << " extends " << t.extends_type;
    if (!t.implements_types.empty()) {
        os << " implements ";
        for (size_t i = 0; i < t.implements_types.size(); ++i) {
            if (i) os << ", ";
            os << t.implements_types[i];
        }
    }
    os << " {\n";
    for (const FieldDecl& f : t.fields) {
        os << ind(indent + 1) << f.type_name;
        for (size_t i = 0; i < f.names.size(); ++i) {
            os << (i ? ", " : " ") << f.names[i];
        }
        os << ";\n";
    }
    for (const MethodDecl& m : t.methods) print_method(os, m, indent + 1);
    for (const TypeDecl& nested : t.nested) print_type(os, nested, indent + 1);
    os << ind(indent) << "}\n";
}

} // namespace

std::string to_source(const CompilationUnit& unit) {
    std::ostringstream os;
    if (!unit.package_name.empty()) os << "package " << unit.package_name << ";\n";
    for (const ImportDecl& imp : unit.imports) {
        os << "import ";
        if (imp.is_static) os << "static ";
        os << imp.qualified_name;
        if (imp.is_wildcard) os << ".*";
        os << ";\n";
    }
    for (const TypeDecl& t : unit.types) print_type(os, t, 0);
    return os.str();
}

std::string to_source(const Expr& expr) {
    std::ostringstream os;
    print_expr(os, expr);
    return os.str();
}

std::string to_source(const Stmt& stmt, int indent) {
    std::ostringstream os;
    print_stmt(os, stmt, indent);
    return os.str();
}

} // namespace augmine::java
