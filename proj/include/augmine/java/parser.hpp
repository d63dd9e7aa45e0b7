// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "augmine/java/ast.hpp"

namespace augmine::java {

// Parses Java source covering the subset needed for usage-graph extraction:
// package/import declarations, class/interface/enum members, local variable
// declarations, assignments, (chained) calls, object creation, return,
// if/else, loops, try/catch/finally and throw. Constructs outside the subset
// (lambdas, switch bodies, anonymous class bodies, ...) are consumed without
// error and kept as opaque statements that still surface contained call
// expressions. Throws SyntaxError only when the file cannot be segmented at
// all (lexing failure or unbalanced braces).
CompilationUnit parse_compilation_unit(const std::string& source);

} // namespace augmine::java
