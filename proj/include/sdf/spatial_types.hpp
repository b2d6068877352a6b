#pragma once

// Spatial type inference: where every stream is computed, which location
// constraints a node needs, and where values cross locations (channels).
//
// Communication is only inferred at variable occurrences: each use of a data
// variable may read it on another location than the one that defines it.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdf/arch.hpp"
#include "sdf/ast.hpp"

namespace sdf {

enum class BaseSort { Int, Bool };

struct LocalType;
using LocalTypePtr = std::shared_ptr<const LocalType>;

/// Types of values that live on one location.
struct LocalType {
  struct Base { BaseSort sort; };
  struct TVar { std::string name; };
  struct Func { LocalTypePtr dom, cod; };
  struct Prod { LocalTypePtr first, second; };
  std::variant<Base, TVar, Func, Prod> node;
};

struct SpatialType;
using TypePtr = std::shared_ptr<const SpatialType>;

/// `Func` is a node type with its effect (the locations its computation
/// involves); `At` is a local type placed on a location. Products and local
/// functions placed on one location are always stored in their expanded
/// `Prod`/`Func` forms.
struct SpatialType {
  struct Func { TypePtr dom; std::vector<Location> eff; TypePtr cod; };
  struct Prod { TypePtr first, second; };
  struct At { LocalTypePtr local; Location loc; };
  std::variant<Func, Prod, At> node;
};

LocalTypePtr local_base(BaseSort s);
LocalTypePtr local_var(std::string name);
LocalTypePtr local_func(LocalTypePtr a, LocalTypePtr b);
LocalTypePtr local_prod(LocalTypePtr a, LocalTypePtr b);
TypePtr type_at(LocalTypePtr t, Location s);
TypePtr type_prod(TypePtr a, TypePtr b);
TypePtr type_func(TypePtr dom, std::vector<Location> eff, TypePtr cod);

/// A communication: the value named `name` is sent from `from` to `to`.
struct Channel {
  std::string name;
  Location from;
  Location to;
  LocalTypePtr payload;
};

struct Scheme {
  std::vector<std::string> tvars;
  std::vector<std::string> lvars;
  std::vector<Constraint> constraints;
  TypePtr body;
  std::vector<Channel> chans;
};

std::string to_string(const LocalTypePtr& t);
std::string to_string(const TypePtr& t);
std::string to_string(const Scheme& s);
std::string to_string(const Channel& c);

/// Locations a value of this type occupies (effect of a node type).
std::vector<Location> locations(const TypePtr& t);

/// Schemes of `fby` and the binary operators, keyed by "fby", "+", "=", ...
std::map<std::string, Scheme> initial_env();

struct Substitution {
  std::map<std::string, LocalTypePtr> types;
  std::map<std::string, Location> locs;
};

/// Most general unifier of two types whose type and location variables are
/// all flexible. TYPE001 location clash, TYPE002 shape clash, TYPE003 cyclic type.
Substitution unify(const TypePtr& a, const TypePtr& b);

struct Instance {
  TypePtr type;
  std::vector<Constraint> constraints;
  std::vector<Channel> chans;
};

/// Fresh copy of a scheme (variables `'tN` and `dN`, channels renamed `c$N`,
/// numbering from `fresh`). When `at` is set the instance is forced onto that
/// single location (TYPE004 if the scheme spans several).
Instance instantiate(const Scheme& s, const std::optional<Location>& at, int fresh = 1);

// ---- elaboration -----------------------------------------------------------

/// Communication point of a variable occurrence. `channel` is empty when the
/// value is read where it is defined.
struct CommPoint {
  Location from;
  Location to;
  std::optional<std::string> channel;
};

struct ExprInfo {
  TypePtr type;
  std::vector<Location> locs;
};

struct DeclInfo {
  std::vector<Location> locs;
  // application
  std::map<std::string, Location> loc_instance;         // callee location variable -> caller location
  std::map<std::string, std::string> chan_renaming;     // callee channel -> caller channel
  TypePtr callee_type;
  // conditional
  std::optional<Location> cond_loc;
  std::vector<std::pair<Location, std::optional<std::string>>> broadcast;  // target, channel
};

struct NodeElab {
  Scheme scheme;                  // public form (canonical variable names)
  TypePtr type;                   // body in terms of the node's own location variables
  std::vector<Location> lvars;    // generalized location variables
  std::vector<Channel> chans;     // node channels, in name order
  std::map<Ident, TypePtr> vars;  // inputs and local variables
  std::map<std::string, Location> loc_params;  // declared location parameter -> name in `scheme`
};

struct ElaboratedProgram {
  Program program;
  ArchGraph arch;
  std::map<Ident, NodeElab> nodes;
  std::map<Ident, TypePtr> main_vars;  // inputs and variables defined by main
  std::vector<Channel> main_chans;
  std::map<const Expr*, ExprInfo> exprs;
  std::map<const Expr*, CommPoint> comms;
  std::map<const Decl*, DeclInfo> decls;

  const ExprInfo& info(const ExprPtr& e) const;
  const DeclInfo& info(const DeclPtr& d) const;
  const CommPoint* comm(const ExprPtr& e) const;
};

/// Type a whole program. Throws CompileError with every diagnostic
/// (ARCH001, TYPE001-TYPE011) when the program is rejected.
ElaboratedProgram infer_program(const Program& p);

}  // namespace sdf
