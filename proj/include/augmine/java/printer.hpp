// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "augmine/java/ast.hpp"

namespace augmine::java {

// Renders the AST back to Java source. Constructs inside the parsed subset
// re-parse to a structurally equal tree; opaque nodes print as placeholders.
std::string to_source(const CompilationUnit& unit);
std::string to_source(const Expr& expr);
std::string to_source(const Stmt& stmt, int indent = 0);

} // namespace augmine::java
