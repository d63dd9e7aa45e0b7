// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "augmine/java/lexer.hpp"

namespace augmine::java {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
    Literal,      // text = literal text, literal_kind set
    Name,         // text = identifier
    FieldAccess,  // target.text
    Call,         // target? .text(args); is_constructor for `new T(...)`
    New,          // type_name(args), plus scanned_calls from anonymous bodies
    ArrayNew,     // new T[...]{...}; args hold dimension/initializer exprs
    Assign,       // target op= args[0]; text = operator
    Unary,        // text = operator, args[0]
    Binary,       // flat operand chain in args, operators in op_texts
    Ternary,      // args = {cond, then, else}
    Cast,         // (type_name) args[0]
    Index,        // target[args[0]]
    MethodRef,    // target::text
    Opaque,       // unparsed region; scanned_calls holds recovered calls
};

struct Expr {
    ExprKind kind = ExprKind::Opaque;
    std::string text;
    std::string type_name;       // New / ArrayNew / Cast simple type name
    ExprPtr target;
    std::vector<ExprPtr> args;
    std::vector<std::string> op_texts;
    std::vector<ExprPtr> scanned_calls;
    bool is_constructor = false; // Call only
    bool has_call_args = false;  // Call only: false for scan-recovered calls
    TokenKind literal_kind = TokenKind::End;
    int line = 0;
};

enum class StmtKind {
    Block,
    LocalVar,
    ExprStmt,
    If,
    While,
    DoWhile,
    For,
    ForEach,
    Return,
    Throw,
    Try,
    Break,
    Continue,
    Empty,
    Opaque,
};

struct Declarator {
    std::string name;
    ExprPtr init;
    int extra_array_dims = 0;
};

struct CatchClause {
    std::vector<std::string> exception_types; // simple names
    std::string var_name;
    std::vector<StmtPtr> body;
};

struct Stmt {
    StmtKind kind = StmtKind::Opaque;
    std::string type_name;                 // LocalVar / ForEach element type
    bool type_is_primitive = false;
    std::vector<Declarator> declarators;   // LocalVar
    std::string var_name;                  // ForEach variable
    ExprPtr expr;                          // condition / value / expression
    std::vector<ExprPtr> extra_exprs;      // For init/update expressions
    std::vector<StmtPtr> init_stmts;       // For init declarations, Try resources
    std::vector<StmtPtr> body;
    std::vector<StmtPtr> else_body;        // If else, Try finally
    std::vector<CatchClause> catches;      // Try
    std::vector<ExprPtr> scanned_calls;    // Opaque recovery
    int line = 0;
};

struct Span {
    int start = 0;
    int end = 0;
};

struct Parameter {
    std::string type_name;   // simple name; "" when unknown
    std::string name;
    bool is_primitive = false;
    bool is_varargs = false;
    int array_dims = 0;
};

struct MethodDecl {
    std::string name;
    bool is_constructor = false;
    bool is_abstract = false;          // no body
    std::vector<std::string> annotations;
    std::vector<Parameter> parameters;
    std::string return_type;           // simple name, "void" for none
    bool return_is_primitive = false;
    std::vector<std::string> thrown_types;
    std::vector<StmtPtr> body;
    Span span;
    size_t token_begin = 0;            // into CompilationUnit::tokens
    size_t token_end = 0;
    size_t body_token_begin = 0;       // body tokens, braces excluded
    size_t body_token_end = 0;
};

struct FieldDecl {
    std::string type_name;
    bool is_primitive = false;
    std::vector<std::string> names;
};

struct TypeDecl {
    enum class Kind { Class, Interface, Enum } kind = Kind::Class;
    std::string name;
    std::string extends_type;              // simple name or ""
    std::vector<std::string> implements_types;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;
    std::vector<TypeDecl> nested;
    Span span;
};

struct ImportDecl {
    std::string qualified_name; // without trailing ".*"
    bool is_wildcard = false;
    bool is_static = false;

    // Last dotted segment; meaningless for wildcard imports.
    std::string simple_name() const {
        auto pos = qualified_name.rfind('.');
        return pos == std::string::npos ? qualified_name : qualified_name.substr(pos + 1);
    }
};

struct CompilationUnit {
    std::string package_name; // "" for default package
    std::vector<ImportDecl> imports;
    std::vector<TypeDecl> types;
    std::vector<Token> tokens;
};

// Depth-first walk over every method in the unit, nested types included.
struct MethodSite {
    const TypeDecl* type = nullptr;
    const MethodDecl* method = nullptr;
    int ordinal = 0; // position within the unit's full method list
};

std::vector<MethodSite> all_method_sites(const CompilationUnit& unit);

bool is_primitive_type(const std::string& name);

// Identifier, keyword and numeric-literal token texts of the method
// declaration in source order. String literal contents and punctuation are
// excluded.
std::vector<std::string> method_tokens(const CompilationUnit& unit, const MethodDecl& method);

// Every call expression reachable from the method body, scan-recovered calls
// included. Constructor calls report the constructed type's simple name with
// is_constructor set.
std::vector<const Expr*> collect_calls(const MethodDecl& method);

} // namespace augmine::java
