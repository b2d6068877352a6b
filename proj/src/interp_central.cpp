#include "sdf/interp_central.hpp"

#include "sdf/inline.hpp"

namespace sdf {

Value Value::pair(Value a, Value b) {
  return Value(std::make_shared<const std::pair<Value, Value>>(std::move(a), std::move(b)));
}

Value Value::from_literal(const Literal& l) {
  if (const auto* i = std::get_if<std::int64_t>(&l)) return integer(*i);
  if (const auto* b = std::get_if<bool>(&l)) return boolean(*b);
  return abs();
}

bool operator==(const Value& a, const Value& b) {
  if (a.v_.index() != b.v_.index()) return false;
  if (a.is_pair()) return a.first() == b.first() && a.second() == b.second();
  return a.v_ == b.v_;
}

std::string to_string(const Value& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_abs()) return "_abs_";
  if (v.is_pair()) return "(" + to_string(v.first()) + ", " + to_string(v.second()) + ")";
  return "<node " + v.node()->name + ">";
}

ExprPtr value_to_expr(const Value& v) {
  if (v.is_int()) return make_int(v.as_int());
  if (v.is_bool()) return make_bool(v.as_bool());
  if (v.is_abs()) return make_abs();
  if (v.is_pair()) return make_pair(value_to_expr(v.first()), value_to_expr(v.second()));
  return make_var(v.node()->name);
}

Value apply_op(BinOpKind op, const Value& a, const Value& b) {
  if (a.is_abs() || b.is_abs())
    throw Error("RT003", std::string("operator ") + to_string(op) + " read the absent value _abs_");
  auto ill = [&]() {
    return Error("EVAL002", std::string("operator ") + to_string(op) + " applied to " + to_string(a) + " and " +
                                to_string(b));
  };
  switch (op) {
    case BinOpKind::Add:
    case BinOpKind::Sub:
    case BinOpKind::Mul: {
      if (!a.is_int() || !b.is_int()) throw ill();
      // two's complement wrap-around instead of signed overflow
      auto x = static_cast<std::uint64_t>(a.as_int());
      auto y = static_cast<std::uint64_t>(b.as_int());
      std::uint64_t r = op == BinOpKind::Add ? x + y : op == BinOpKind::Sub ? x - y : x * y;
      return Value::integer(static_cast<std::int64_t>(r));
    }
    case BinOpKind::Eq:
      if (a.is_int() && b.is_int()) return Value::boolean(a.as_int() == b.as_int());
      if (a.is_bool() && b.is_bool()) return Value::boolean(a.as_bool() == b.as_bool());
      throw ill();
    case BinOpKind::Lt:
      if (!a.is_int() || !b.is_int()) throw ill();
      return Value::boolean(a.as_int() < b.as_int());
    case BinOpKind::And:
    case BinOpKind::Or:
      if (!a.is_bool() || !b.is_bool()) throw ill();
      return Value::boolean(op == BinOpKind::And ? (a.as_bool() && b.as_bool()) : (a.as_bool() || b.as_bool()));
  }
  throw ill();
}

void bind_pattern(const Pattern& p, const Value& v, std::map<Ident, Value>& out) {
  if (p.is_single()) {
    out[p.name()] = v;
    return;
  }
  const auto& items = p.items();
  if (v.is_abs()) {
    for (const auto& x : pattern_vars(p)) out[x] = Value::abs();
    return;
  }
  const Value* cur = &v;
  for (size_t i = 0; i + 1 < items.size(); ++i) {
    if (cur->is_abs()) {
      for (size_t j = i; j < items.size(); ++j) bind_pattern(items[j], *cur, out);
      return;
    }
    if (!cur->is_pair()) throw Error("EVAL004", "pattern " + to_string(p) + " does not match " + to_string(v));
    bind_pattern(items[i], cur->first(), out);
    cur = &cur->second();
  }
  bind_pattern(items.back(), *cur, out);
}

ReactionEnv initial_node_env(const std::vector<NodeDef>& nodes) {
  ReactionEnv r;
  for (const auto& n : nodes) r[n.name] = Value::closure(&n);
  return r;
}

// ---- reactor ---------------------------------------------------------------

struct Reactor::Leaf {
  enum Kind { Eq, App, If } kind = Eq;
  DeclPtr decl;                       // Eq / App
  std::unique_ptr<Block> expansion;   // App, once inlined
  ExprPtr cond;                       // If
  std::unique_ptr<Block> then_b, else_b;
  int done = -1;
  bool busy = false;
  int cond_epoch = -1;
  bool cond_value = false;
};

struct Reactor::Block {
  Block* parent = nullptr;
  std::vector<std::unique_ptr<Leaf>> leaves;
  std::map<Ident, Leaf*> def;
};

namespace {

struct BusyGuard {
  bool& flag;
  explicit BusyGuard(bool& f) : flag(f) { flag = true; }
  ~BusyGuard() { flag = false; }
};

}  // namespace

Reactor::Reactor(DeclPtr d, Lookup lookup) : lookup_(std::move(lookup)) {
  next_instance_ = next_instance_index(d);
  root_ = build(d, nullptr);
}

Reactor::~Reactor() = default;

std::unique_ptr<Reactor::Block> Reactor::build(const DeclPtr& d, Block* parent) {
  auto b = std::make_unique<Block>();
  b->parent = parent;
  for (const auto& item : flatten_and(d)) {
    for (const auto& leaf_decl : split_equation(item)) {
      auto l = std::make_unique<Leaf>();
      if (leaf_decl->is<Decl::Eq>()) {
        l->kind = Leaf::Eq;
        l->decl = leaf_decl;
      } else if (leaf_decl->is<Decl::App>()) {
        l->kind = Leaf::App;
        l->decl = leaf_decl;
      } else {
        const auto& i = *leaf_decl->as<Decl::If>();
        l->kind = Leaf::If;
        l->cond = i.cond;
        l->then_b = build(i.then_branch, b.get());
        l->else_b = build(i.else_branch, b.get());
      }
      for (const auto& x : defined_vars(leaf_decl)) b->def[x] = l.get();
      b->leaves.push_back(std::move(l));
    }
  }
  return b;
}

DeclPtr Reactor::rebuild(const Block& b) const {
  std::vector<DeclPtr> parts;
  for (const auto& l : b.leaves) {
    if (l->kind == Leaf::If)
      parts.push_back(make_if(l->cond, rebuild(*l->then_b), rebuild(*l->else_b)));
    else if (l->expansion)
      parts.push_back(rebuild(*l->expansion));
    else
      parts.push_back(l->decl);
  }
  return make_conj(parts);
}

DeclPtr Reactor::current() const { return rebuild(*root_); }

std::set<Ident> Reactor::defined() const {
  std::set<Ident> out;
  for (const auto& [x, l] : root_->def) out.insert(x);
  return out;
}

const Value* Reactor::value(const Ident& x) const {
  auto it = env_.find(x);
  return it == env_.end() ? nullptr : &it->second;
}

void Reactor::begin_step() {
  ++epoch_;
  env_.clear();
}

Value Reactor::lookup_var(const Ident& x, Block* scope, SourceSpan span) {
  if (auto it = env_.find(x); it != env_.end()) return it->second;
  for (Block* b = scope; b; b = b->parent) {
    if (b->def.count(x)) {
      force_in(x, b);
      return env_.at(x);
    }
  }
  try {
    return lookup_(x);
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), span);
  }
}

Reactor::Block* Reactor::taken_branch(Leaf& l, Block* b, const Ident& x) {
  if (l.cond_epoch != epoch_) {
    if (l.busy) throw Error("EVAL003", "instantaneous cycle through '" + x + "'", l.cond->span);
    BusyGuard g(l.busy);
    Value c = eval(l.cond, b);
    if (!c.is_bool()) throw Error("EVAL005", "condition is " + to_string(c) + ", not a boolean", l.cond->span);
    l.cond_value = c.as_bool();
    l.cond_epoch = epoch_;
  }
  return l.cond_value ? l.then_b.get() : l.else_b.get();
}

void Reactor::force_in(const Ident& x, Block* b) {
  if (env_.count(x)) return;
  Leaf& l = *b->def.at(x);
  switch (l.kind) {
    case Leaf::Eq: {
      if (l.done == epoch_) return;
      if (l.busy) throw Error("EVAL003", "instantaneous cycle through '" + x + "'", l.decl->span);
      BusyGuard g(l.busy);
      const auto& eq = *l.decl->as<Decl::Eq>();
      Value v = eval(eq.rhs, b);
      ReactionEnv out;
      try {
        bind_pattern(eq.lhs, v, out);
      } catch (const Error& e) {
        throw Error(e.code(), e.message(), l.decl->span);
      }
      for (auto& [k, val] : out) env_[k] = std::move(val);
      l.done = epoch_;
      return;
    }
    case Leaf::App: {
      if (!l.expansion) {
        if (l.busy) throw Error("EVAL003", "instantaneous cycle through '" + x + "'", l.decl->span);
        BusyGuard g(l.busy);
        const auto& app = *l.decl->as<Decl::App>();
        Value f = lookup_var(app.callee, b, l.decl->span);
        if (!f.is_closure())
          throw Error("EVAL006", "'" + app.callee + "' is applied but is not a node", l.decl->span);
        l.expansion = build(expand_application(app, *f.node(), next_instance_++), b);
      }
      force_in(x, l.expansion.get());
      return;
    }
    case Leaf::If: {
      Block* branch = taken_branch(l, b, x);
      if (!branch->def.count(x))
        throw Error("EVAL001", "'" + x + "' is not defined by the taken branch", l.cond->span);
      force_in(x, branch);
      return;
    }
  }
}

const Value& Reactor::force(const Ident& x) {
  if (!root_->def.count(x)) throw Error("EVAL001", "'" + x + "' is not defined");
  force_in(x, root_.get());
  return env_.at(x);
}

void Reactor::force_block(Block* b, std::optional<Blocked>* blocked) {
  for (const auto& lp : b->leaves) {
    Leaf& l = *lp;
    try {
      if (l.kind == Leaf::If) {
        force_block(taken_branch(l, b, "if"), blocked);
        continue;
      }
      auto vars = defined_vars(l.decl);
      if (!vars.empty()) force_in(*vars.begin(), b);
      if (l.kind == Leaf::App) force_block(l.expansion.get(), blocked);
    } catch (const Blocked& x) {
      if (!blocked) throw;
      if (!*blocked) *blocked = x;
    }
  }
}

void Reactor::force_all() { force_block(root_.get(), nullptr); }

std::optional<Blocked> Reactor::try_force_all() {
  std::optional<Blocked> blocked;
  force_block(root_.get(), &blocked);
  return blocked;
}

Value Reactor::eval(const ExprPtr& e, Block* scope) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Imm>) {
          return Value::from_literal(n.value);
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          return lookup_var(n.name, scope, e->span);
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          Value a = eval(n.first, scope);
          return Value::pair(std::move(a), eval(n.second, scope));
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          Value a = eval(n.lhs, scope);
          Value b = eval(n.rhs, scope);
          try {
            return apply_op(n.op, a, b);
          } catch (const Error& err) {
            throw Error(err.code(), err.message(), e->span);
          }
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return eval(n.init, scope);
        } else {
          return eval(n.body, scope);
        }
      },
      e->node);
}

ExprPtr Reactor::advance(const ExprPtr& e, Block* scope) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Imm> || std::is_same_v<T, Expr::Var>) {
          return e;
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          auto a = advance(n.first, scope), b = advance(n.second, scope);
          return a == n.first && b == n.second ? e : make_pair(a, b, e->span);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          auto a = advance(n.lhs, scope), b = advance(n.rhs, scope);
          return a == n.lhs && b == n.rhs ? e : make_binop(n.op, a, b, e->span);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return make_fby(value_to_expr(eval(n.next, scope)), advance(n.next, scope), e->span);
        } else {
          auto b = advance(n.body, scope);
          return b == n.body ? e : make_at(b, n.loc, e->span);
        }
      },
      e->node);
}

void Reactor::plan_advance(Block* b, std::vector<std::function<void()>>& commits) {
  for (const auto& lp : b->leaves) {
    Leaf* l = lp.get();
    if (l->kind == Leaf::If) {
      ExprPtr c = advance(l->cond, b);
      commits.push_back([l, c]() { l->cond = c; });
      plan_advance(l->cond_value ? l->then_b.get() : l->else_b.get(), commits);
    } else if (l->kind == Leaf::App) {
      if (l->expansion) plan_advance(l->expansion.get(), commits);
    } else {
      const auto& eq = *l->decl->as<Decl::Eq>();
      ExprPtr rhs = advance(eq.rhs, b);
      if (rhs != eq.rhs) {
        DeclPtr nd = make_eq(eq.lhs, rhs, l->decl->span);
        commits.push_back([l, nd]() { l->decl = nd; });
      }
    }
  }
}

void Reactor::finish_step() {
  std::vector<std::function<void()>> commits;
  plan_advance(root_.get(), commits);
  for (auto& c : commits) c();
}

// ---- functional interface ---------------------------------------------------

namespace {

Reactor::Lookup env_lookup(const ReactionEnv& r) {
  return [&r](const Ident& x) -> Value {
    auto it = r.find(x);
    if (it == r.end()) throw Error("EVAL001", "unbound variable '" + x + "'");
    return it->second;
  };
}

}  // namespace

std::pair<Value, ExprPtr> step_expr(const ReactionEnv& r, const ExprPtr& e) {
  const Ident out = "e$";
  Reactor re(make_eq(Pattern::single(out), e), env_lookup(r));
  re.begin_step();
  Value v = re.force(out);
  re.finish_step();
  return {v, re.current()->as<Decl::Eq>()->rhs};
}

std::pair<ReactionEnv, DeclPtr> step_decl(const ReactionEnv& r, const DeclPtr& d) {
  Reactor re(d, env_lookup(r));
  re.begin_step();
  re.force_all();
  re.finish_step();
  ReactionEnv out;
  for (const auto& x : defined_vars(d))
    if (const Value* v = re.value(x)) out[x] = *v;
  return {out, re.current()};
}

Trace run(const Program& p, const Trace& inputs, int n) {
  ReactionEnv nodes = initial_node_env(p.nodes);
  int k = 0;
  static const ReactionEnv kNoInput;
  Reactor re(p.main, [&](const Ident& x) -> Value {
    const ReactionEnv& in = k < static_cast<int>(inputs.steps.size()) ? inputs.steps[k] : kNoInput;
    if (auto it = in.find(x); it != in.end()) return it->second;
    if (auto it = nodes.find(x); it != nodes.end()) return it->second;
    throw Error("EVAL001", "unbound variable '" + x + "'");
  });
  auto outputs = defined_vars(p.main);
  Trace t;
  for (k = 0; k < n; ++k) {
    try {
      re.begin_step();
      re.force_all();
      re.finish_step();
    } catch (const Error& e) {
      throw Error(e.code(), "instant " + std::to_string(k) + ": " + e.message(), e.span());
    }
    ReactionEnv step;
    for (const auto& x : outputs)
      if (const Value* v = re.value(x)) step[x] = *v;
    t.steps.push_back(std::move(step));
  }
  return t;
}

}  // namespace sdf
