// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "augmine/aug/graph.hpp"
#include "augmine/java/ast.hpp"

namespace augmine::aug {

// Builds the usage graph of one method: every call and constructor yields an
// Action node, return statements yield <return>, object instances yield Data
// nodes labeled with the statically resolved type or UNKNOWN. Def edges run
// from producing action to produced data, Recv from receiver data to the
// invoked action, Para from argument data to the consuming action, and Order
// chains consecutive actions in source order. Unresolvable types degrade to
// UNKNOWN; the method_ref is left for the caller to fill.
Aug build_aug(const java::MethodDecl& method, const java::CompilationUnit& unit);

} // namespace augmine::aug
