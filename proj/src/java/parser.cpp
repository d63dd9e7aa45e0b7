// SPDX-License-Identifier: Apache-2.0
#include "augmine/java/parser.hpp"

#include <unordered_set>

namespace augmine::java {

namespace {

struct ParseFail {};

const std::unordered_set<std::string>& primitive_names() {
    static const std::unordered_set<std::string> names = {
        "boolean", "byte", "short", "int", "long", "char", "float", "double", "void",
    };
    return names;
}

struct TypeRef {
    std::string simple;
    bool primitive = false;
    int array_dims = 0;
};

struct ModifierInfo {
    std::vector<std::string> annotations;
    bool has_static = false;
    bool has_abstract = false;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    CompilationUnit parse() {
        check_balance();
        CompilationUnit unit;
        unit.tokens = toks_;

        if (cur().is_keyword("package")) {
            advance();
            unit.package_name = parse_dotted_name();
            expect_punct(";");
        }
        while (cur().is_keyword("import")) {
            advance();
            ImportDecl imp;
            if (cur().is_keyword("static")) {
                imp.is_static = true;
                advance();
            }
            imp.qualified_name = parse_dotted_name();
            if (cur().is_punct(".")) {
                // only reachable as ".*"
                advance();
                expect_punct("*");
                imp.is_wildcard = true;
            }
            expect_punct(";");
            unit.imports.push_back(std::move(imp));
        }

        while (!cur_is_end()) {
            if (cur().is_punct(";")) {
                advance();
                continue;
            }
            size_t start = pos_;
            ModifierInfo mods = parse_modifiers();
            if (cur().is_punct("@") && peek(1).is_keyword("interface")) {
                skip_annotation_type_decl();
                continue;
            }
            if (cur().is_keyword("class") || cur().is_keyword("interface") ||
                cur().is_keyword("enum")) {
                unit.types.push_back(parse_type_decl(start));
                continue;
            }
            throw SyntaxError("expected type declaration, found '" + cur().text + "'",
                              cur().line, cur().col);
        }
        return unit;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t n) const {
        size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool cur_is_end() const { return cur().kind == TokenKind::End; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }

    void expect_punct(const char* p) {
        if (!cur().is_punct(p)) fail();
        advance();
    }

    [[noreturn]] void fail() const { throw ParseFail{}; }

    void check_balance() {
        int paren = 0, brace = 0, bracket = 0;
        for (const Token& t : toks_) {
            if (t.kind != TokenKind::Punct) continue;
            if (t.text == "(") ++paren;
            else if (t.text == ")") --paren;
            else if (t.text == "{") ++brace;
            else if (t.text == "}") --brace;
            else if (t.text == "[") ++bracket;
            else if (t.text == "]") --bracket;
            if (paren < 0 || brace < 0 || bracket < 0)
                throw SyntaxError("unbalanced '" + t.text + "'", t.line, t.col);
        }
        if (paren != 0 || brace != 0 || bracket != 0) {
            const Token& t = toks_.back();
            throw SyntaxError("unbalanced brackets at end of file", t.line, t.col);
        }
    }

    std::string parse_dotted_name() {
        if (!cur().is_word()) fail();
        std::string name = cur().text;
        advance();
        while (cur().is_punct(".") && peek(1).is_word()) {
            advance();
            name += "." + cur().text;
            advance();
        }
        return name;
    }

    // --- modifiers and annotations ---

    static bool is_modifier(const Token& t) {
        if (t.kind != TokenKind::Keyword) return false;
        static const std::unordered_set<std::string> mods = {
            "public", "private", "protected", "static", "final", "abstract",
            "native", "synchronized", "strictfp", "transient", "volatile", "default",
        };
        return mods.count(t.text) > 0;
    }

    ModifierInfo parse_modifiers() {
        ModifierInfo info;
        for (;;) {
            if (cur().is_punct("@") && peek(1).kind == TokenKind::Identifier) {
                advance();
                std::string name = parse_dotted_name();
                auto dot = name.rfind('.');
                info.annotations.push_back(dot == std::string::npos ? name : name.substr(dot + 1));
                if (cur().is_punct("(")) skip_balanced("(", ")");
                continue;
            }
            if (is_modifier(cur())) {
                if (cur().text == "static") info.has_static = true;
                if (cur().text == "abstract") info.has_abstract = true;
                // `synchronized (expr)` is a statement, not a modifier
                if (cur().text == "synchronized" && peek(1).is_punct("(")) break;
                advance();
                continue;
            }
            break;
        }
        return info;
    }

    void skip_balanced(const char* open, const char* close) {
        if (!cur().is_punct(open)) fail();
        int depth = 0;
        while (!cur_is_end()) {
            if (cur().is_punct(open)) ++depth;
            else if (cur().is_punct(close)) {
                --depth;
                if (depth == 0) {
                    advance();
                    return;
                }
            }
            advance();
        }
        fail();
    }

    void skip_generic_args() {
        if (!cur().is_punct("<")) return;
        int depth = 0;
        while (!cur_is_end()) {
            if (cur().is_punct("<")) ++depth;
            else if (cur().is_punct(">")) {
                --depth;
                if (depth == 0) {
                    advance();
                    return;
                }
            } else if (cur().is_punct(";") || cur().is_punct("{") || cur().is_punct("}")) {
                fail(); // not a generic argument list after all
            }
            advance();
        }
        fail();
    }

    TypeRef parse_type() {
        while (cur().is_punct("@") && peek(1).kind == TokenKind::Identifier) {
            advance();
            parse_dotted_name();
            if (cur().is_punct("(")) skip_balanced("(", ")");
        }
        TypeRef ref;
        if (cur().kind == TokenKind::Keyword && primitive_names().count(cur().text)) {
            ref.simple = cur().text;
            ref.primitive = true;
            advance();
        } else if (cur().kind == TokenKind::Identifier) {
            ref.simple = cur().text;
            advance();
            if (cur().is_punct("<")) skip_generic_args();
            while (cur().is_punct(".") && peek(1).kind == TokenKind::Identifier) {
                advance();
                ref.simple = cur().text;
                advance();
                if (cur().is_punct("<")) skip_generic_args();
            }
        } else {
            fail();
        }
        while (cur().is_punct("[") && peek(1).is_punct("]")) {
            advance();
            advance();
            ++ref.array_dims;
        }
        return ref;
    }

    // --- type declarations ---

    void skip_annotation_type_decl() {
        advance(); // '@'
        advance(); // 'interface'
        while (!cur_is_end() && !cur().is_punct("{")) advance();
        if (cur().is_punct("{")) skip_balanced("{", "}");
    }

    TypeDecl parse_type_decl(size_t start_tok) {
        TypeDecl decl;
        if (cur().is_keyword("interface")) decl.kind = TypeDecl::Kind::Interface;
        else if (cur().is_keyword("enum")) decl.kind = TypeDecl::Kind::Enum;
        advance();
        if (cur().kind != TokenKind::Identifier) fail_fatal("expected type name");
        decl.name = cur().text;
        decl.span.start = toks_[start_tok].line;
        advance();
        if (cur().is_punct("<")) skip_generic_args();
        if (cur().is_keyword("extends")) {
            advance();
            TypeRef t = parse_type();
            decl.extends_type = t.simple;
            while (cur().is_punct(",")) { // interface extends list
                advance();
                decl.implements_types.push_back(parse_type().simple);
            }
        }
        if (cur().is_keyword("implements")) {
            advance();
            decl.implements_types.push_back(parse_type().simple);
            while (cur().is_punct(",")) {
                advance();
                decl.implements_types.push_back(parse_type().simple);
            }
        }
        if (cur().is_keyword("permits")) {
            advance();
            parse_type();
            while (cur().is_punct(",")) {
                advance();
                parse_type();
            }
        }
        if (!cur().is_punct("{")) fail_fatal("expected '{' in type declaration");
        advance();

        if (decl.kind == TypeDecl::Kind::Enum) skip_enum_constants();

        while (!cur().is_punct("}")) {
            if (cur_is_end()) fail_fatal("unexpected end of file in type body");
            parse_member(decl);
        }
        decl.span.end = cur().line;
        advance(); // '}'
        return decl;
    }

    [[noreturn]] void fail_fatal(const std::string& msg) const {
        throw SyntaxError(msg, cur().line, cur().col);
    }

    void skip_enum_constants() {
        // constants up to ';' (then regular members) or the closing '}'
        while (!cur_is_end()) {
            if (cur().is_punct(";")) {
                advance();
                return;
            }
            if (cur().is_punct("}")) return;
            if (cur().is_punct("(")) {
                skip_balanced("(", ")");
                continue;
            }
            if (cur().is_punct("{")) {
                skip_balanced("{", "}");
                continue;
            }
            advance();
        }
    }

    void parse_member(TypeDecl& decl) {
        size_t start = pos_;
        if (cur().is_punct(";")) {
            advance();
            return;
        }
        ModifierInfo mods = parse_modifiers();
        if (cur().is_punct("{")) { // initializer block
            skip_balanced("{", "}");
            return;
        }
        if (cur().is_punct("@") && peek(1).is_keyword("interface")) {
            skip_annotation_type_decl();
            return;
        }
        if (cur().is_keyword("class") || cur().is_keyword("interface") || cur().is_keyword("enum")) {
            decl.nested.push_back(parse_type_decl(start));
            return;
        }
        if (cur().is_punct("<")) {
            try {
                skip_generic_args();
            } catch (const ParseFail&) {
                skip_member_opaque();
                return;
            }
        }

        // constructor: the type name directly followed by '('
        if (cur().kind == TokenKind::Identifier && cur().text == decl.name && peek(1).is_punct("(")) {
            MethodDecl m;
            m.is_constructor = true;
            m.name = cur().text;
            m.annotations = mods.annotations;
            advance();
            parse_method_rest(m, start);
            decl.methods.push_back(std::move(m));
            return;
        }

        size_t saved = pos_;
        try {
            TypeRef type = parse_type();
            if (cur().kind != TokenKind::Identifier) fail();
            std::string name = cur().text;
            advance();
            if (cur().is_punct("(")) {
                MethodDecl m;
                m.name = name;
                m.annotations = mods.annotations;
                m.return_type = type.simple;
                m.return_is_primitive = type.primitive && type.array_dims == 0;
                parse_method_rest(m, start);
                decl.methods.push_back(std::move(m));
                return;
            }
            // field declaration
            FieldDecl f;
            f.type_name = type.simple;
            f.is_primitive = type.primitive && type.array_dims == 0;
            f.names.push_back(name);
            for (;;) {
                while (cur().is_punct("[") && peek(1).is_punct("]")) {
                    advance();
                    advance();
                }
                if (cur().is_punct("=")) {
                    advance();
                    skip_to_declarator_end();
                }
                if (cur().is_punct(",")) {
                    advance();
                    if (cur().kind != TokenKind::Identifier) fail();
                    f.names.push_back(cur().text);
                    advance();
                    continue;
                }
                expect_punct(";");
                break;
            }
            decl.fields.push_back(std::move(f));
        } catch (const ParseFail&) {
            pos_ = saved;
            skip_member_opaque();
        }
    }

    // after a failed member parse: consume to ';' or a balanced '{...}'
    void skip_member_opaque() {
        while (!cur_is_end()) {
            if (cur().is_punct(";")) {
                advance();
                return;
            }
            if (cur().is_punct("{")) {
                skip_balanced("{", "}");
                return;
            }
            if (cur().is_punct("}")) return;
            if (cur().is_punct("(")) {
                skip_balanced("(", ")");
                continue;
            }
            advance();
        }
    }

    void skip_to_declarator_end() {
        int depth = 0;
        while (!cur_is_end()) {
            const Token& t = cur();
            if (t.kind == TokenKind::Punct) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                else if (t.text == ")" || t.text == "]" || t.text == "}") {
                    if (depth == 0) return;
                    --depth;
                } else if (depth == 0 && (t.text == "," || t.text == ";")) {
                    return;
                }
            }
            advance();
        }
    }

    void parse_method_rest(MethodDecl& m, size_t start_tok) {
        m.token_begin = start_tok;
        m.span.start = toks_[start_tok].line;
        expect_punct("(");
        if (!cur().is_punct(")")) {
            for (;;) {
                parse_parameter(m);
                if (cur().is_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        while (cur().is_punct("[") && peek(1).is_punct("]")) {
            advance();
            advance();
        }
        if (cur().is_keyword("throws")) {
            advance();
            m.thrown_types.push_back(parse_type().simple);
            while (cur().is_punct(",")) {
                advance();
                m.thrown_types.push_back(parse_type().simple);
            }
        }
        if (cur().is_punct(";")) {
            m.is_abstract = true;
            m.span.end = cur().line;
            advance();
            m.token_end = pos_;
            m.body_token_begin = m.body_token_end = pos_;
            return;
        }
        if (cur().is_keyword("default")) { // annotation member default value
            while (!cur_is_end() && !cur().is_punct(";")) advance();
            m.is_abstract = true;
            m.span.end = cur().line;
            advance();
            m.token_end = pos_;
            m.body_token_begin = m.body_token_end = pos_;
            return;
        }
        if (!cur().is_punct("{")) fail();
        advance();
        m.body_token_begin = pos_;
        parse_statements_until_close(m.body);
        m.body_token_end = pos_;
        m.span.end = cur().line;
        advance(); // '}'
        m.token_end = pos_;
    }

    void parse_parameter(MethodDecl& m) {
        while (cur().is_keyword("final") ||
               (cur().is_punct("@") && peek(1).kind == TokenKind::Identifier)) {
            if (cur().is_keyword("final")) {
                advance();
            } else {
                advance();
                parse_dotted_name();
                if (cur().is_punct("(")) skip_balanced("(", ")");
            }
        }
        Parameter p;
        TypeRef type = parse_type();
        p.type_name = type.simple;
        p.array_dims = type.array_dims;
        p.is_primitive = type.primitive && type.array_dims == 0;
        if (cur().is_punct(".") && peek(1).is_punct(".") && peek(2).is_punct(".")) {
            advance();
            advance();
            advance();
            p.is_varargs = true;
        }
        if (cur().is_keyword("this")) { // receiver parameter
            advance();
            return;
        }
        if (cur().kind != TokenKind::Identifier) fail();
        p.name = cur().text;
        advance();
        while (cur().is_punct("[") && peek(1).is_punct("]")) {
            advance();
            advance();
            ++p.array_dims;
            p.is_primitive = false;
        }
        m.parameters.push_back(std::move(p));
    }

    // --- statements ---

    void parse_statements_until_close(std::vector<StmtPtr>& out) {
        while (!cur().is_punct("}")) {
            if (cur_is_end()) fail_fatal("unexpected end of file in block");
            out.push_back(parse_statement());
        }
    }

    std::vector<StmtPtr> parse_braced_block() {
        if (!cur().is_punct("{")) fail();
        advance();
        std::vector<StmtPtr> body;
        parse_statements_until_close(body);
        advance(); // '}'
        return body;
    }

    StmtPtr make_stmt(StmtKind kind) {
        auto s = std::make_unique<Stmt>();
        s->kind = kind;
        s->line = cur().line;
        return s;
    }

    // a single-statement or braced body, normalized to a flat list
    void parse_body_into(std::vector<StmtPtr>& out) {
        StmtPtr s = parse_statement();
        if (s->kind == StmtKind::Block && s->extra_exprs.empty()) {
            for (StmtPtr& child : s->body) out.push_back(std::move(child));
        } else {
            out.push_back(std::move(s));
        }
    }

    StmtPtr parse_statement() {
        size_t start = pos_;
        try {
            return parse_statement_inner();
        } catch (const ParseFail&) {
            pos_ = start;
            return opaque_recover();
        }
    }

    StmtPtr parse_statement_inner() {
        const Token& t = cur();
        if (t.is_punct("{")) {
            auto s = make_stmt(StmtKind::Block);
            s->body = parse_braced_block();
            return s;
        }
        if (t.is_punct(";")) {
            auto s = make_stmt(StmtKind::Empty);
            advance();
            return s;
        }
        if (t.kind == TokenKind::Keyword) {
            const std::string& kw = t.text;
            if (kw == "if") return parse_if();
            if (kw == "while") return parse_while();
            if (kw == "do") return parse_do_while();
            if (kw == "for") return parse_for();
            if (kw == "return") return parse_return();
            if (kw == "throw") return parse_throw();
            if (kw == "try") return parse_try();
            if (kw == "break" || kw == "continue") {
                auto s = make_stmt(kw == "break" ? StmtKind::Break : StmtKind::Continue);
                advance();
                if (cur().kind == TokenKind::Identifier) advance();
                expect_punct(";");
                return s;
            }
            if (kw == "synchronized" && peek(1).is_punct("(")) {
                auto s = make_stmt(StmtKind::Block);
                advance();
                expect_punct("(");
                s->extra_exprs.push_back(parse_expression());
                expect_punct(")");
                s->body = parse_braced_block();
                return s;
            }
            if (kw == "class" || kw == "interface" || kw == "enum") {
                fail(); // local type declaration: recover opaquely
            }
        }
        // label: `name: statement`
        if (cur().kind == TokenKind::Identifier && peek(1).is_punct(":")) {
            advance();
            advance();
            return parse_statement_inner();
        }
        // local variable declaration, then expression statement
        size_t saved = pos_;
        if (StmtPtr decl = try_parse_local_var()) return decl;
        pos_ = saved;
        auto s = make_stmt(StmtKind::ExprStmt);
        s->expr = parse_expression();
        expect_punct(";");
        return s;
    }

    StmtPtr try_parse_local_var() {
        try {
            auto s = make_stmt(StmtKind::LocalVar);
            while (cur().is_keyword("final") ||
                   (cur().is_punct("@") && peek(1).kind == TokenKind::Identifier)) {
                if (cur().is_keyword("final")) {
                    advance();
                } else {
                    advance();
                    parse_dotted_name();
                    if (cur().is_punct("(")) skip_balanced("(", ")");
                }
            }
            TypeRef type = parse_type();
            if (cur().kind != TokenKind::Identifier) fail();
            s->type_name = type.simple;
            s->type_is_primitive = type.primitive && type.array_dims == 0;
            for (;;) {
                Declarator d;
                if (cur().kind != TokenKind::Identifier) fail();
                d.name = cur().text;
                advance();
                while (cur().is_punct("[") && peek(1).is_punct("]")) {
                    advance();
                    advance();
                    ++d.extra_array_dims;
                }
                if (cur().is_punct("=")) {
                    advance();
                    d.init = cur().is_punct("{") ? parse_array_initializer() : parse_expression();
                }
                s->declarators.push_back(std::move(d));
                if (cur().is_punct(",")) {
                    advance();
                    continue;
                }
                expect_punct(";");
                return s;
            }
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    StmtPtr parse_if() {
        auto s = make_stmt(StmtKind::If);
        advance();
        expect_punct("(");
        s->expr = parse_expression();
        expect_punct(")");
        parse_body_into(s->body);
        if (cur().is_keyword("else")) {
            advance();
            parse_body_into(s->else_body);
        }
        return s;
    }

    StmtPtr parse_while() {
        auto s = make_stmt(StmtKind::While);
        advance();
        expect_punct("(");
        s->expr = parse_expression();
        expect_punct(")");
        parse_body_into(s->body);
        return s;
    }

    StmtPtr parse_do_while() {
        auto s = make_stmt(StmtKind::DoWhile);
        advance();
        parse_body_into(s->body);
        if (!cur().is_keyword("while")) fail();
        advance();
        expect_punct("(");
        s->expr = parse_expression();
        expect_punct(")");
        expect_punct(";");
        return s;
    }

    StmtPtr parse_for() {
        size_t start = pos_;
        advance();
        expect_punct("(");
        // enhanced for: [final] Type name : expr
        try {
            auto s = make_stmt(StmtKind::ForEach);
            s->line = toks_[start].line;
            size_t saved = pos_;
            while (cur().is_keyword("final") ||
                   (cur().is_punct("@") && peek(1).kind == TokenKind::Identifier)) {
                if (cur().is_keyword("final")) {
                    advance();
                } else {
                    advance();
                    parse_dotted_name();
                    if (cur().is_punct("(")) skip_balanced("(", ")");
                }
            }
            TypeRef type = parse_type();
            if (cur().kind != TokenKind::Identifier) {
                pos_ = saved;
                fail();
            }
            std::string var = cur().text;
            advance();
            if (!cur().is_punct(":")) {
                pos_ = saved;
                fail();
            }
            advance();
            s->type_name = type.simple;
            s->type_is_primitive = type.primitive && type.array_dims == 0;
            s->var_name = var;
            s->expr = parse_expression();
            expect_punct(")");
            parse_body_into(s->body);
            return s;
        } catch (const ParseFail&) {
            pos_ = start;
        }

        auto s = make_stmt(StmtKind::For);
        advance();
        expect_punct("(");
        if (!cur().is_punct(";")) {
            size_t saved = pos_;
            if (StmtPtr init = try_parse_local_var_no_semi()) {
                s->init_stmts.push_back(std::move(init));
            } else {
                pos_ = saved;
                for (;;) {
                    auto init = make_stmt(StmtKind::ExprStmt);
                    init->expr = parse_expression();
                    s->init_stmts.push_back(std::move(init));
                    if (!cur().is_punct(",")) break;
                    advance();
                }
            }
        }
        expect_punct(";");
        if (!cur().is_punct(";")) s->expr = parse_expression();
        expect_punct(";");
        if (!cur().is_punct(")")) {
            s->extra_exprs.push_back(parse_expression());
            while (cur().is_punct(",")) {
                advance();
                s->extra_exprs.push_back(parse_expression());
            }
        }
        expect_punct(")");
        parse_body_into(s->body);
        return s;
    }

    // classic-for init: declaration without the trailing ';'
    StmtPtr try_parse_local_var_no_semi() {
        try {
            auto s = make_stmt(StmtKind::LocalVar);
            TypeRef type = parse_type();
            if (cur().kind != TokenKind::Identifier) fail();
            s->type_name = type.simple;
            s->type_is_primitive = type.primitive && type.array_dims == 0;
            for (;;) {
                Declarator d;
                if (cur().kind != TokenKind::Identifier) fail();
                d.name = cur().text;
                advance();
                if (cur().is_punct("=")) {
                    advance();
                    d.init = cur().is_punct("{") ? parse_array_initializer() : parse_expression();
                }
                s->declarators.push_back(std::move(d));
                if (cur().is_punct(",")) {
                    advance();
                    continue;
                }
                if (!cur().is_punct(";")) fail();
                return s;
            }
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    StmtPtr parse_return() {
        auto s = make_stmt(StmtKind::Return);
        advance();
        if (!cur().is_punct(";")) s->expr = parse_expression();
        expect_punct(";");
        return s;
    }

    StmtPtr parse_throw() {
        auto s = make_stmt(StmtKind::Throw);
        advance();
        s->expr = parse_expression();
        expect_punct(";");
        return s;
    }

    StmtPtr parse_try() {
        auto s = make_stmt(StmtKind::Try);
        advance();
        if (cur().is_punct("(")) {
            advance();
            while (!cur().is_punct(")")) {
                size_t saved = pos_;
                if (StmtPtr res = try_parse_resource()) {
                    s->init_stmts.push_back(std::move(res));
                } else {
                    pos_ = saved;
                    auto use = make_stmt(StmtKind::ExprStmt);
                    use->expr = parse_expression();
                    s->init_stmts.push_back(std::move(use));
                }
                if (cur().is_punct(";")) advance();
            }
            advance(); // ')'
        }
        s->body = parse_braced_block();
        while (cur().is_keyword("catch")) {
            advance();
            expect_punct("(");
            CatchClause clause;
            if (cur().is_keyword("final")) advance();
            clause.exception_types.push_back(parse_type().simple);
            while (cur().is_punct("|")) {
                advance();
                clause.exception_types.push_back(parse_type().simple);
            }
            if (cur().kind != TokenKind::Identifier) fail();
            clause.var_name = cur().text;
            advance();
            expect_punct(")");
            clause.body = parse_braced_block();
            s->catches.push_back(std::move(clause));
        }
        if (cur().is_keyword("finally")) {
            advance();
            s->else_body = parse_braced_block();
        }
        if (s->catches.empty() && s->else_body.empty() && s->init_stmts.empty()) fail();
        return s;
    }

    StmtPtr try_parse_resource() {
        try {
            auto s = make_stmt(StmtKind::LocalVar);
            if (cur().is_keyword("final")) advance();
            TypeRef type = parse_type();
            if (cur().kind != TokenKind::Identifier) fail();
            s->type_name = type.simple;
            s->type_is_primitive = type.primitive && type.array_dims == 0;
            Declarator d;
            d.name = cur().text;
            advance();
            if (!cur().is_punct("=")) fail();
            advance();
            d.init = parse_expression();
            s->declarators.push_back(std::move(d));
            if (!cur().is_punct(";") && !cur().is_punct(")")) fail();
            return s;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    // consume a statement that failed to parse; keep any calls it contains
    StmtPtr opaque_recover() {
        auto s = make_stmt(StmtKind::Opaque);
        size_t begin = pos_;
        int depth = 0;
        while (!cur_is_end()) {
            const Token& t = cur();
            if (t.kind == TokenKind::Punct) {
                if (t.text == "(" || t.text == "[") {
                    ++depth;
                } else if (t.text == ")" || t.text == "]") {
                    if (depth == 0) break;
                    --depth;
                } else if (t.text == "{") {
                    if (depth == 0) {
                        skip_balanced("{", "}");
                        // trailing while of do-while, else-chains etc. end here
                        break;
                    }
                    ++depth;
                } else if (t.text == "}") {
                    if (depth == 0) break;
                    --depth;
                } else if (t.text == ";" && depth == 0) {
                    advance();
                    break;
                }
            }
            advance();
        }
        if (pos_ == begin) fail_fatal("parser made no progress");
        scan_calls(begin, pos_, s->scanned_calls);
        return s;
    }

    void scan_calls(size_t begin, size_t end, std::vector<ExprPtr>& out) {
        for (size_t i = begin; i < end && i + 1 < toks_.size(); ++i) {
            if (toks_[i].kind != TokenKind::Identifier) continue;
            if (!toks_[i + 1].is_punct("(")) continue;
            if (i > 0 && toks_[i - 1].is_punct("@")) continue;
            auto call = std::make_unique<Expr>();
            call->kind = ExprKind::Call;
            call->text = toks_[i].text;
            call->line = toks_[i].line;
            call->is_constructor = i > 0 && toks_[i - 1].is_keyword("new");
            out.push_back(std::move(call));
        }
    }

    // --- expressions ---

    ExprPtr make_expr(ExprKind kind) {
        auto e = std::make_unique<Expr>();
        e->kind = kind;
        e->line = cur().line;
        return e;
    }

    ExprPtr parse_expression() { return parse_assignment(); }

    static bool is_assign_op(const Token& t) {
        if (t.kind != TokenKind::Punct) return false;
        return t.text == "=" || t.text == "+=" || t.text == "-=" || t.text == "*=" ||
               t.text == "/=" || t.text == "%=" || t.text == "&=" || t.text == "|=" ||
               t.text == "^=";
    }

    ExprPtr parse_assignment() {
        ExprPtr lhs = parse_ternary();
        if (is_assign_op(cur())) {
            auto e = make_expr(ExprKind::Assign);
            e->text = cur().text;
            e->line = lhs->line;
            advance();
            e->target = std::move(lhs);
            e->args.push_back(parse_assignment());
            return e;
        }
        return lhs;
    }

    ExprPtr parse_ternary() {
        ExprPtr cond = parse_binary();
        if (cur().is_punct("?")) {
            auto e = make_expr(ExprKind::Ternary);
            e->line = cond->line;
            advance();
            e->args.push_back(std::move(cond));
            e->args.push_back(parse_expression());
            expect_punct(":");
            e->args.push_back(parse_ternary());
            return e;
        }
        return cond;
    }

    static bool is_binary_op(const Token& t) {
        if (t.kind == TokenKind::Keyword) return t.text == "instanceof";
        if (t.kind != TokenKind::Punct) return false;
        static const std::unordered_set<std::string> ops = {
            "+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=",
            "&", "|", "^", "&&", "||",
        };
        return ops.count(t.text) > 0;
    }

    ExprPtr parse_binary() {
        ExprPtr first = parse_unary();
        if (!is_binary_op(cur())) return first;
        auto e = make_expr(ExprKind::Binary);
        e->line = first->line;
        e->args.push_back(std::move(first));
        while (is_binary_op(cur())) {
            if (cur().is_keyword("instanceof")) {
                e->op_texts.push_back("instanceof");
                advance();
                TypeRef t = parse_type();
                auto name = make_expr(ExprKind::Name);
                name->text = t.simple;
                e->args.push_back(std::move(name));
                if (cur().kind == TokenKind::Identifier) advance(); // pattern variable
                continue;
            }
            e->op_texts.push_back(cur().text);
            advance();
            e->args.push_back(parse_unary());
        }
        return e;
    }

    ExprPtr parse_unary() {
        const Token& t = cur();
        if (t.is_punct("!") || t.is_punct("~") || t.is_punct("+") || t.is_punct("-") ||
            t.is_punct("++") || t.is_punct("--")) {
            auto e = make_expr(ExprKind::Unary);
            e->text = t.text;
            advance();
            e->args.push_back(parse_unary());
            return e;
        }
        if (t.is_punct("(")) {
            size_t saved = pos_;
            if (ExprPtr cast = try_parse_cast()) return cast;
            pos_ = saved;
        }
        return parse_postfix();
    }

    static bool starts_expression(const Token& t) {
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::IntLiteral:
            case TokenKind::FloatLiteral:
            case TokenKind::CharLiteral:
            case TokenKind::StringLiteral:
                return true;
            case TokenKind::Keyword:
                return t.text == "new" || t.text == "this" || t.text == "super" ||
                       t.text == "true" || t.text == "false" || t.text == "null";
            case TokenKind::Punct:
                return t.text == "(" || t.text == "!" || t.text == "~";
            default:
                return false;
        }
    }

    ExprPtr try_parse_cast() {
        try {
            advance(); // '('
            TypeRef type = parse_type();
            if (!cur().is_punct(")")) fail();
            bool plain_name = type.array_dims == 0 && !type.primitive;
            advance();
            const Token& next = cur();
            bool castable = starts_expression(next) ||
                            (!plain_name && (next.is_punct("+") || next.is_punct("-")));
            if (!castable) fail();
            // `(name)(...)` is a call of a parenthesized value, not a cast,
            // unless the target looks like a type; accept the cast reading.
            auto e = make_expr(ExprKind::Cast);
            e->type_name = type.simple;
            e->args.push_back(parse_unary());
            return e;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    bool looks_like_lambda_params() {
        // at '(': scan to the matching ')' and check for '->'
        size_t i = pos_;
        int depth = 0;
        while (i < toks_.size() && toks_[i].kind != TokenKind::End) {
            const Token& t = toks_[i];
            if (t.is_punct("(")) ++depth;
            else if (t.is_punct(")")) {
                --depth;
                if (depth == 0) return i + 1 < toks_.size() && toks_[i + 1].is_punct("->");
            } else if (t.is_punct(";") || t.is_punct("{")) {
                return false;
            }
            ++i;
        }
        return false;
    }

    ExprPtr parse_lambda_after_arrow() {
        auto e = make_expr(ExprKind::Opaque);
        e->text = "lambda";
        advance(); // '->'
        if (cur().is_punct("{")) {
            size_t begin = pos_;
            skip_balanced("{", "}");
            scan_calls(begin, pos_, e->scanned_calls);
        } else {
            e->args.push_back(parse_ternary());
        }
        return e;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (cur().is_punct(".")) {
                if (peek(1).is_punct("<")) {
                    advance();
                    skip_generic_args();
                    if (cur().kind != TokenKind::Identifier) fail();
                } else if (peek(1).kind == TokenKind::Identifier) {
                    advance();
                } else if (peek(1).is_keyword("this") || peek(1).is_keyword("class") ||
                           peek(1).is_keyword("super")) {
                    advance();
                    auto fa = make_expr(ExprKind::FieldAccess);
                    fa->text = cur().text;
                    fa->line = e->line;
                    advance();
                    fa->target = std::move(e);
                    e = std::move(fa);
                    continue;
                } else if (peek(1).is_keyword("new")) {
                    advance();
                    e = parse_creation(); // inner-class creation; outer ignored
                    continue;
                } else {
                    break;
                }
                std::string name = cur().text;
                int line = cur().line;
                advance();
                if (cur().is_punct("(")) {
                    auto call = make_expr(ExprKind::Call);
                    call->text = name;
                    call->line = line;
                    call->target = std::move(e);
                    call->has_call_args = true;
                    parse_call_args(call->args);
                    e = std::move(call);
                } else {
                    auto fa = make_expr(ExprKind::FieldAccess);
                    fa->text = name;
                    fa->line = line;
                    fa->target = std::move(e);
                    e = std::move(fa);
                }
                continue;
            }
            if (cur().is_punct("::")) {
                advance();
                auto mr = make_expr(ExprKind::MethodRef);
                if (cur().kind == TokenKind::Identifier || cur().is_keyword("new")) {
                    mr->text = cur().text;
                    advance();
                } else {
                    fail();
                }
                mr->target = std::move(e);
                e = std::move(mr);
                continue;
            }
            if (cur().is_punct("[")) {
                advance();
                auto ix = make_expr(ExprKind::Index);
                ix->line = e->line;
                if (!cur().is_punct("]")) ix->args.push_back(parse_expression());
                expect_punct("]");
                ix->target = std::move(e);
                e = std::move(ix);
                continue;
            }
            if (cur().is_punct("++") || cur().is_punct("--")) {
                auto u = make_expr(ExprKind::Unary);
                u->text = cur().text;
                u->line = e->line;
                advance();
                u->args.push_back(std::move(e));
                e = std::move(u);
                continue;
            }
            break;
        }
        return e;
    }

    void parse_call_args(std::vector<ExprPtr>& out) {
        expect_punct("(");
        if (!cur().is_punct(")")) {
            out.push_back(parse_expression());
            while (cur().is_punct(",")) {
                advance();
                out.push_back(parse_expression());
            }
        }
        expect_punct(")");
    }

    ExprPtr parse_array_initializer() {
        auto e = make_expr(ExprKind::ArrayNew);
        expect_punct("{");
        while (!cur().is_punct("}")) {
            if (cur().is_punct("{")) {
                e->args.push_back(parse_array_initializer());
            } else {
                e->args.push_back(parse_expression());
            }
            if (cur().is_punct(",")) advance();
        }
        advance(); // '}'
        return e;
    }

    ExprPtr parse_creation() {
        if (!cur().is_keyword("new")) fail();
        int line = cur().line;
        advance();
        TypeRef type = parse_type();
        if (cur().is_punct("[") || type.array_dims > 0) {
            auto e = make_expr(ExprKind::ArrayNew);
            e->type_name = type.simple;
            e->line = line;
            while (cur().is_punct("[")) {
                advance();
                if (!cur().is_punct("]")) e->args.push_back(parse_expression());
                expect_punct("]");
            }
            if (cur().is_punct("{")) e->args.push_back(parse_array_initializer());
            return e;
        }
        auto e = make_expr(ExprKind::New);
        e->type_name = type.simple;
        e->line = line;
        parse_call_args(e->args);
        if (cur().is_punct("{")) { // anonymous class body
            size_t begin = pos_;
            skip_balanced("{", "}");
            scan_calls(begin, pos_, e->scanned_calls);
        }
        return e;
    }

    ExprPtr parse_primary() {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::IntLiteral:
            case TokenKind::FloatLiteral:
            case TokenKind::CharLiteral:
            case TokenKind::StringLiteral: {
                auto e = make_expr(ExprKind::Literal);
                e->text = t.text;
                e->literal_kind = t.kind;
                advance();
                return e;
            }
            case TokenKind::Identifier: {
                if (peek(1).is_punct("->")) {
                    advance();
                    return parse_lambda_after_arrow();
                }
                std::string name = t.text;
                int line = t.line;
                advance();
                if (cur().is_punct("(")) {
                    auto call = make_expr(ExprKind::Call);
                    call->text = name;
                    call->line = line;
                    call->has_call_args = true;
                    parse_call_args(call->args);
                    return call;
                }
                auto e = make_expr(ExprKind::Name);
                e->text = name;
                e->line = line;
                return e;
            }
            case TokenKind::Keyword: {
                const std::string& kw = t.text;
                if (kw == "true" || kw == "false" || kw == "null") {
                    auto e = make_expr(ExprKind::Literal);
                    e->text = kw;
                    e->literal_kind = TokenKind::Keyword;
                    advance();
                    return e;
                }
                if (kw == "new") return parse_creation();
                if (kw == "this" || kw == "super") {
                    advance();
                    if (cur().is_punct("(")) { // constructor delegation
                        auto e = make_expr(ExprKind::Opaque);
                        e->text = kw + "-delegation";
                        parse_call_args(e->args);
                        return e;
                    }
                    auto e = make_expr(ExprKind::Name);
                    e->text = kw;
                    return e;
                }
                if (primitive_names().count(kw)) { // e.g. int.class
                    auto e = make_expr(ExprKind::Name);
                    e->text = kw;
                    advance();
                    return e;
                }
                if (kw == "switch") { // switch expression: opaque with call scan
                    auto e = make_expr(ExprKind::Opaque);
                    e->text = "switch";
                    size_t begin = pos_;
                    advance();
                    if (cur().is_punct("(")) skip_balanced("(", ")");
                    if (cur().is_punct("{")) skip_balanced("{", "}");
                    else fail();
                    scan_calls(begin, pos_, e->scanned_calls);
                    return e;
                }
                fail();
            }
            case TokenKind::Punct: {
                if (t.text == "(") {
                    if (looks_like_lambda_params()) {
                        skip_balanced("(", ")");
                        return parse_lambda_after_arrow();
                    }
                    advance();
                    ExprPtr inner = parse_expression();
                    expect_punct(")");
                    return inner;
                }
                fail();
            }
            default:
                fail();
        }
    }
};

} // namespace

CompilationUnit parse_compilation_unit(const std::string& source) {
    std::vector<Token> tokens = lex(source);
    Parser parser(std::move(tokens));
    try {
        return parser.parse();
    } catch (const ParseFail&) {
        throw SyntaxError("unable to segment compilation unit", 0, 0);
    }
}

} // namespace augmine::java
