#pragma once

// Node instantiation shared by the interpreters and the distribution
// pipeline: fresh renaming of a node body and expansion of an application
// into plain equations.

#include <functional>
#include <string>
#include <vector>

#include "sdf/ast.hpp"
#include "sdf/spatial_types.hpp"

namespace sdf {

/// `x` becomes `x$i<k>`.
Ident instance_name(const Ident& x, int k);

/// Conjoin `v = _abs_` for every variable of `want` that `d` does not
/// define, so that both branches of a conditional define the same names.
DeclPtr pad_branch(DeclPtr d, const std::set<Ident>& want);

/// Smallest k such that no identifier in `d` carries an instance suffix >= k.
int next_instance_index(const DeclPtr& d);

/// Put every computation of `d` at `s`: right-hand sides and conditions are
/// wrapped in `at s`, applications without a location get `at s`.
DeclPtr locate_decl(const DeclPtr& d, const Location& s);

/// Split `(p1, ..., pn) = (e1, ..., en)`, also through `at`, into one
/// equation per component. Other declarations are returned unchanged.
std::vector<DeclPtr> split_equation(const DeclPtr& eq);

/// Rewrite `lhs = f(arg) [at s]` into
///   `param = arg and lhs = body and decls`
/// where the body of `callee` is renamed with instance index `k`. A located
/// application locates the whole expansion. The callee's location parameters
/// are left untouched; substitute them first when they matter.
DeclPtr expand_application(const Decl::App& app, const NodeDef& callee, int k);

/// Compile-time inlining of a typed program. Every application whose callee
/// is not kept is replaced by a fresh copy of the callee's body: location
/// parameters become the locations chosen during typing, node-valued
/// parameters bound to a known node are resolved, and a located application
/// locates the whole copy. Bodies of the remaining nodes are inlined the same
/// way. The result shares no expression with the input and must be typed
/// again before use.
Program inline_program(const ElaboratedProgram& el, const std::function<bool(const Ident&)>& keep);

}  // namespace sdf
