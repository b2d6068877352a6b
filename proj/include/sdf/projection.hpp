#pragma once

// Type-directed projection: one program per constant location, with the
// communications of the typing turned into extra node inputs and outputs.
//
// Naming: the copy of variable x on location A is `x$A`, the projection of
// node f on A is `f$A`, channels keep their inferred names (`c$N`) and the
// local holding a broadcast condition is `cond$N`. Absent values are `_abs_`.

#include <map>
#include <string>
#include <vector>

#include "sdf/ast.hpp"
#include "sdf/spatial_types.hpp"

namespace sdf {

Ident located_name(const Ident& x, const Location& a);

/// Natural order on channel names (`c$2` before `c$10`).
bool channel_less(const std::string& a, const std::string& b);

struct ProjectedNode {
  Ident origin;
  Location location;
  std::vector<std::string> chan_inputs;   // appended to the original input, in channel order
  std::vector<std::string> chan_outputs;  // appended to the original result
  NodeDef def;
};

struct LocationProgram {
  Location location;
  std::vector<NodeDef> shared;          // single-location nodes used as they are
  std::vector<ProjectedNode> nodes;
  DeclPtr main = make_empty();
  std::map<Ident, Ident> external;      // main input on this location -> source input
  std::vector<std::string> receives;    // main-level channels read here
  std::vector<std::string> sends;       // main-level channels written here

  Program program() const;
};

struct Wire {
  std::string channel;
  Location from;
  Location to;
  std::string sort;
};

struct DeploymentPlan {
  ElaboratedProgram source;             // the typed program that was projected
  std::vector<LocationProgram> locations;
  std::vector<Wire> wiring;

  const LocationProgram& at(const Location& a) const;
};

/// Type `p`, inline every node that is neither single-location nor free of
/// location variables, and type the result again.
ElaboratedProgram prepare_projection(const Program& p);

struct ExprProjection {
  ExprPtr expr;
  DeclPtr chans;  // channel equations produced while projecting
};

/// Projection of an expression of main on `a`.
ExprProjection project_expr(const ElaboratedProgram& el, const ExprPtr& e, const Location& a);

/// Projection of a declaration of main on `a`.
DeclPtr project_decl(const ElaboratedProgram& el, const DeclPtr& d, const Location& a);

/// Project every node and main on every declared location. Throws
/// CompileError with PROJ001-PROJ004 diagnostics.
DeploymentPlan project_program(const ElaboratedProgram& el);

}  // namespace sdf
