// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "augmine/java/ast.hpp"

namespace augmine::api {

enum class ImportClass { Internal, ThirdParty, JavaLang };

struct ApiContext {
    std::vector<java::ImportDecl> api_imports; // third-party, non-wildcard
    std::set<std::string> keywords;
    std::vector<std::string> misused_imports;  // qualified names, externally supplied

    std::vector<std::string> import_names() const {
        std::vector<std::string> out;
        out.reserve(api_imports.size());
        for (const auto& imp : api_imports) out.push_back(imp.qualified_name);
        return out;
    }
};

// Package-prefix classification: an import is Internal when the first
// min(3, package segment count) package qualifiers match the import's
// qualifiers segment-by-segment. java.lang.* is classified separately; with
// no package declaration every import counts as Internal.
ImportClass classify_import(const java::ImportDecl& imp, const std::string& package_name);

// Explicitly imported third-party type names the method uses: as parameter,
// return or thrown type, mentioned in a body expression, or the inherited
// class type of an @Override method.
std::set<std::string> relevant_types(const java::MethodDecl& method,
                                     const java::CompilationUnit& unit);

// API imports plus keywords (relevant type names, every called method name,
// and the method's own name when it overrides).
ApiContext extract_context(const java::MethodDecl& method, const java::CompilationUnit& unit);

std::vector<std::string> split_segments(const std::string& dotted);

} // namespace augmine::api
