#pragma once

// Distributed semantics: every value carries the location it lives on, and
// the run checks that computations only combine co-located values and that
// values move along declared links.

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sdf/interp_central.hpp"
#include "sdf/spatial_types.hpp"

namespace sdf {

class DistValue {
 public:
  struct Located {
    Value value;  // never a pair
    Location at;
  };
  struct NodeVal {
    const NodeDef* node = nullptr;
  };
  using PairBox = std::shared_ptr<const std::pair<DistValue, DistValue>>;

  DistValue() : v_(Located{Value::abs(), Location{}}) {}
  /// Pairs are split so that `(1, 2)@A` is stored as `(1@A, 2@A)`.
  static DistValue located(const Value& v, const Location& at);
  static DistValue pair(DistValue a, DistValue b);
  static DistValue node(const NodeDef* n) { return DistValue(NodeVal{n}); }

  bool is_located() const { return std::holds_alternative<Located>(v_); }
  bool is_pair() const { return std::holds_alternative<PairBox>(v_); }
  bool is_node() const { return std::holds_alternative<NodeVal>(v_); }
  const Located& as_located() const { return std::get<Located>(v_); }
  const DistValue& first() const { return std::get<PairBox>(v_)->first; }
  const DistValue& second() const { return std::get<PairBox>(v_)->second; }
  const NodeDef* node_def() const { return std::get<NodeVal>(v_).node; }

  friend bool operator==(const DistValue& a, const DistValue& b);

 private:
  template <class T>
  explicit DistValue(T v) : v_(std::move(v)) {}
  std::variant<Located, PairBox, NodeVal> v_;
};

std::string to_string(const DistValue& v);

/// Locations a value occupies. DIST001 on a node value.
std::set<Location> loc_of(const DistValue& v);

/// Drop every location annotation.
Value erase(const DistValue& v);

using DistEnv = std::map<Ident, DistValue>;
ReactionEnv erase(const DistEnv& r);

/// Place a plain value according to a data type (components of products go
/// to the locations of the corresponding components of the type).
DistValue locate(const Value& v, const TypePtr& t);

/// `v : t`: every leaf sits on the location its type names and has the
/// type's sort; `_abs_` inhabits every type, node values every node type.
bool inhabits(const DistValue& v, const TypePtr& t);

struct DistStep {
  DistEnv env;               // variables defined by main
  std::set<Location> locs;   // locations involved in the instant
};

struct DistTrace {
  std::vector<DistStep> steps;
};

/// Step-by-step execution of a typed declaration without applications (see
/// `prepare_dist`). Variables are forced on demand within an instant, as in
/// the centralized reactor.
///
/// Errors: DIST002 value sent without a link, DIST003 operator on values of
/// different locations, DIST004 computation escaping its `at`, DIST005
/// communication of a value spread over several locations, plus the EVAL
/// codes of the centralized semantics.
class DistMachine {
 public:
  DistMachine(const ElaboratedProgram& el, DeclPtr d);
  ~DistMachine();
  DistMachine(const DistMachine&) = delete;
  DistMachine& operator=(const DistMachine&) = delete;

  /// One instant; `inputs` holds the free variables of the declaration.
  DistStep step(const DistEnv& inputs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Type `p`, inline every application, and type the result again.
ElaboratedProgram prepare_dist(const Program& p);

/// Run main for `n` instants under the distributed semantics. Inputs are
/// placed where typing put them. Errors carry the failing instant.
DistTrace run_dist(const Program& p, const Trace& inputs, int n);

}  // namespace sdf
