#pragma once

// Centralized synchronous semantics. A declaration reacts once per instant:
// every equation emits a value, every `fby` shifts its state, and node
// applications are inlined the first time they react.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdf/ast.hpp"

namespace sdf {

class Value {
 public:
  struct Abs {
    friend bool operator==(Abs, Abs) { return true; }
  };
  struct Closure {
    const NodeDef* node = nullptr;
    friend bool operator==(const Closure& a, const Closure& b) { return a.node == b.node; }
  };
  using PairBox = std::shared_ptr<const std::pair<Value, Value>>;

  Value() : v_(Abs{}) {}
  static Value integer(std::int64_t i) { return Value(i); }
  static Value boolean(bool b) { return Value(b); }
  static Value abs() { return Value(); }
  static Value pair(Value a, Value b);
  static Value closure(const NodeDef* n) { return Value(Closure{n}); }
  static Value from_literal(const Literal& l);

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_abs() const { return std::holds_alternative<Abs>(v_); }
  bool is_pair() const { return std::holds_alternative<PairBox>(v_); }
  bool is_closure() const { return std::holds_alternative<Closure>(v_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const Value& first() const { return std::get<PairBox>(v_)->first; }
  const Value& second() const { return std::get<PairBox>(v_)->second; }
  const NodeDef* node() const { return std::get<Closure>(v_).node; }

  friend bool operator==(const Value& a, const Value& b);

 private:
  template <class T>
  explicit Value(T v) : v_(std::move(v)) {}
  std::variant<std::int64_t, bool, Abs, PairBox, Closure> v_;
};

std::string to_string(const Value& v);

/// Expression that emits `v` forever (pairs become pair expressions).
ExprPtr value_to_expr(const Value& v);

/// Pointwise operator. EVAL002 on ill-sorted operands, RT003 when an operand is ⊥.
Value apply_op(BinOpKind op, const Value& a, const Value& b);

/// Bind the variables of `p` to the components of `v`. EVAL004 on arity
/// mismatch; ⊥ binds every variable of a tuple pattern to ⊥.
void bind_pattern(const Pattern& p, const Value& v, std::map<Ident, Value>& out);

using ReactionEnv = std::map<Ident, Value>;

struct Trace {
  std::vector<ReactionEnv> steps;
};

/// Closures of every node, by name.
ReactionEnv initial_node_env(const std::vector<NodeDef>& nodes);

/// Thrown by a lookup function when an input is not available yet. The
/// reactor keeps everything computed so far, so the step can be retried.
struct Blocked {
  Ident var;
};

/// One instant of `e` under `r`: the emitted value and the rewritten expression.
std::pair<Value, ExprPtr> step_expr(const ReactionEnv& r, const ExprPtr& e);

/// One instant of `d` under `r` (nodes are looked up in `r` as closures).
/// Returns the bindings of the variables `d` defines and its rewriting.
std::pair<ReactionEnv, DeclPtr> step_decl(const ReactionEnv& r, const DeclPtr& d);

/// Demand-driven evaluation of a declaration across instants.
///
/// Within an instant, variables are forced on demand; a variable whose
/// evaluation needs itself is an instantaneous cycle (EVAL003). Free names
/// go through `lookup`, which may throw Blocked; forcing can then be retried
/// after more input arrived.
class Reactor {
 public:
  using Lookup = std::function<Value(const Ident&)>;

  Reactor(DeclPtr d, Lookup lookup);
  ~Reactor();
  Reactor(const Reactor&) = delete;
  Reactor& operator=(const Reactor&) = delete;

  void begin_step();
  const Value& force(const Ident& x);
  /// Force every variable defined by the taken path of the declaration.
  void force_all();
  /// Like force_all, but keeps going past equations that block and returns
  /// the first blocked input (none when everything was computed).
  std::optional<Blocked> try_force_all();
  /// Shift every delay of the taken path. May throw Blocked, in which case
  /// nothing has changed and the call can be repeated.
  void finish_step();

  /// Variables defined at the top of the declaration (instance names included).
  std::set<Ident> defined() const;
  const Value* value(const Ident& x) const;
  const ReactionEnv& values() const { return env_; }
  DeclPtr current() const;

 private:
  struct Block;
  struct Leaf;
  Value eval(const ExprPtr& e, Block* scope);
  ExprPtr advance(const ExprPtr& e, Block* scope);
  Value lookup_var(const Ident& x, Block* scope, SourceSpan span);
  void force_in(const Ident& x, Block* scope);
  Block* taken_branch(Leaf& l, Block* scope, const Ident& x);
  void force_block(Block* b, std::optional<Blocked>* blocked);
  void plan_advance(Block* b, std::vector<std::function<void()>>& commits);
  std::unique_ptr<Block> build(const DeclPtr& d, Block* parent);
  DeclPtr rebuild(const Block& b) const;

  std::unique_ptr<Block> root_;
  Lookup lookup_;
  ReactionEnv env_;
  int epoch_ = 0;
  int next_instance_ = 1;
};

/// Run the main declaration of `p` for `n` instants. Inputs are the free
/// variables of main; outputs are the variables main defines. Errors carry
/// the failing instant in their message.
Trace run(const Program& p, const Trace& inputs, int n);

}  // namespace sdf
