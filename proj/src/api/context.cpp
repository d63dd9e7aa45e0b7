// SPDX-License-Identifier: Apache-2.0
#include "augmine/api/context.hpp"

#include <unordered_map>
#include <unordered_set>

namespace augmine::api {

namespace {

std::string owning_qualifier(const java::ImportDecl& imp) {
    if (!imp.is_static) return imp.qualified_name;
    auto dot = imp.qualified_name.rfind('.');
    return dot == std::string::npos ? imp.qualified_name : imp.qualified_name.substr(0, dot);
}

const java::TypeDecl* enclosing_type(const java::MethodDecl& method,
                                     const java::CompilationUnit& unit) {
    for (const java::MethodSite& site : java::all_method_sites(unit)) {
        if (site.method == &method) return site.type;
    }
    return nullptr;
}

} // namespace

std::vector<std::string> split_segments(const std::string& dotted) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= dotted.size()) {
        size_t dot = dotted.find('.', start);
        if (dot == std::string::npos) {
            out.push_back(dotted.substr(start));
            break;
        }
        out.push_back(dotted.substr(start, dot - start));
        start = dot + 1;
    }
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

ImportClass classify_import(const java::ImportDecl& imp, const std::string& package_name) {
    if (package_name.empty()) return ImportClass::Internal;
    std::string owner = owning_qualifier(imp);
    if (owner == "java.lang" || owner.rfind("java.lang.", 0) == 0) return ImportClass::JavaLang;

    std::vector<std::string> pkg = split_segments(package_name);
    std::vector<std::string> own = split_segments(owner);
    size_t k = std::min<size_t>(3, pkg.size());
    if (own.size() < k) return ImportClass::ThirdParty;
    for (size_t i = 0; i < k; ++i) {
        if (pkg[i] != own[i]) return ImportClass::ThirdParty;
    }
    return ImportClass::Internal;
}

std::set<std::string> relevant_types(const java::MethodDecl& method,
                                     const java::CompilationUnit& unit) {
    std::unordered_map<std::string, const java::ImportDecl*> third_party;
    for (const java::ImportDecl& imp : unit.imports) {
        if (imp.is_wildcard) continue;
        if (classify_import(imp, unit.package_name) != ImportClass::ThirdParty) continue;
        third_party.emplace(imp.simple_name(), &imp);
    }
    if (third_party.empty()) return {};

    std::unordered_set<std::string> mentioned;
    for (const java::Parameter& p : method.parameters) {
        if (!p.is_primitive) mentioned.insert(p.type_name);
    }
    if (!method.return_type.empty() && !method.return_is_primitive) {
        mentioned.insert(method.return_type);
    }
    for (const std::string& t : method.thrown_types) mentioned.insert(t);
    for (size_t i = method.body_token_begin;
         i < method.body_token_end && i < unit.tokens.size(); ++i) {
        const java::Token& t = unit.tokens[i];
        if (t.kind == java::TokenKind::Identifier) mentioned.insert(t.text);
    }

    bool overrides = false;
    for (const std::string& a : method.annotations) {
        if (a == "Override") overrides = true;
    }
    if (overrides) {
        if (const java::TypeDecl* type = enclosing_type(method, unit)) {
            if (!type->extends_type.empty()) mentioned.insert(type->extends_type);
        }
    }

    std::set<std::string> out;
    for (const auto& [simple, imp] : third_party) {
        if (mentioned.count(simple)) out.insert(simple);
    }
    return out;
}

ApiContext extract_context(const java::MethodDecl& method, const java::CompilationUnit& unit) {
    ApiContext ctx;
    std::set<std::string> rel = relevant_types(method, unit);

    std::unordered_set<std::string> seen;
    for (const java::ImportDecl& imp : unit.imports) {
        if (imp.is_wildcard) continue;
        if (!rel.count(imp.simple_name())) continue;
        if (classify_import(imp, unit.package_name) != ImportClass::ThirdParty) continue;
        if (!seen.insert(imp.qualified_name).second) continue;
        ctx.api_imports.push_back(imp);
    }

    ctx.keywords.insert(rel.begin(), rel.end());
    for (const java::Expr* call : java::collect_calls(method)) {
        if (call->kind == java::ExprKind::Call && !call->is_constructor) {
            ctx.keywords.insert(call->text);
        }
    }
    for (const std::string& a : method.annotations) {
        if (a == "Override") {
            ctx.keywords.insert(method.name);
            break;
        }
    }
    return ctx;
}

} // namespace augmine::api
