#include "sdf/interp_dist.hpp"

#include <stdexcept>

#include "sdf/diagnostics.hpp"
#include "sdf/inline.hpp"

namespace sdf {

DistValue DistValue::located(const Value& v, const Location& at) {
  if (v.is_pair()) return pair(located(v.first(), at), located(v.second(), at));
  if (v.is_closure()) return node(v.node());
  return DistValue(Located{v, at});
}

DistValue DistValue::pair(DistValue a, DistValue b) {
  return DistValue(std::make_shared<const std::pair<DistValue, DistValue>>(std::move(a), std::move(b)));
}

bool operator==(const DistValue& a, const DistValue& b) {
  if (a.v_.index() != b.v_.index()) return false;
  if (a.is_located()) return a.as_located().value == b.as_located().value && a.as_located().at == b.as_located().at;
  if (a.is_pair()) return a.first() == b.first() && a.second() == b.second();
  return a.node_def() == b.node_def();
}

std::string to_string(const DistValue& v) {
  if (v.is_located()) return to_string(v.as_located().value) + "@" + to_string(v.as_located().at);
  if (v.is_pair()) return "(" + to_string(v.first()) + ", " + to_string(v.second()) + ")";
  return "<node " + v.node_def()->name + ">";
}

std::set<Location> loc_of(const DistValue& v) {
  if (v.is_located()) return {v.as_located().at};
  if (v.is_node()) throw Error("DIST001", "a node value has no location");
  auto a = loc_of(v.first());
  auto b = loc_of(v.second());
  a.insert(b.begin(), b.end());
  return a;
}

Value erase(const DistValue& v) {
  if (v.is_located()) return v.as_located().value;
  if (v.is_node()) return Value::closure(v.node_def());
  return Value::pair(erase(v.first()), erase(v.second()));
}

ReactionEnv erase(const DistEnv& r) {
  ReactionEnv out;
  for (const auto& [x, v] : r) out[x] = erase(v);
  return out;
}

DistValue locate(const Value& v, const TypePtr& t) {
  if (const auto* at = std::get_if<SpatialType::At>(&t->node)) return DistValue::located(v, at->loc);
  if (const auto* p = std::get_if<SpatialType::Prod>(&t->node)) {
    if (v.is_pair()) return DistValue::pair(locate(v.first(), p->first), locate(v.second(), p->second));
    return DistValue::pair(locate(v, p->first), locate(v, p->second));
  }
  if (v.is_closure()) return DistValue::node(v.node());
  if (!std::holds_alternative<SpatialType::Func>(t->node)) return DistValue();
  const auto& f = std::get<SpatialType::Func>(t->node);
  return DistValue::located(v, f.eff.empty() ? Location{} : f.eff.front());
}

namespace {

bool has_sort(const Value& v, const LocalTypePtr& t) {
  if (v.is_abs()) return true;
  if (const auto* b = std::get_if<LocalType::Base>(&t->node))
    return b->sort == BaseSort::Int ? v.is_int() : v.is_bool();
  if (const auto* p = std::get_if<LocalType::Prod>(&t->node))
    return v.is_pair() && has_sort(v.first(), p->first) && has_sort(v.second(), p->second);
  if (std::holds_alternative<LocalType::Func>(t->node)) return v.is_closure();
  return true;
}

}  // namespace

bool inhabits(const DistValue& v, const TypePtr& t) {
  if (v.is_located() && v.as_located().value.is_abs()) return true;
  if (const auto* at = std::get_if<SpatialType::At>(&t->node)) {
    if (!v.is_located()) return false;
    const auto& l = v.as_located();
    return (!at->loc.is_const() || l.at == at->loc) && has_sort(l.value, at->local);
  }
  if (const auto* p = std::get_if<SpatialType::Prod>(&t->node))
    return v.is_pair() && inhabits(v.first(), p->first) && inhabits(v.second(), p->second);
  return v.is_node();
}

// ---- machine -----------------------------------------------------------------

namespace {

struct Site {
  const Decl* eq;
  std::vector<std::pair<const Decl*, bool>> path;  // enclosing conditionals and the branch taken
};

}  // namespace

struct DistMachine::Impl {
  const ElaboratedProgram& el;
  DeclPtr root;
  std::map<Ident, std::vector<Site>> sites;
  std::map<const Expr*, Value> state;

  // current instant
  const DistEnv* inputs = nullptr;
  DistEnv env;
  std::set<Ident> busy;
  std::set<const Decl*> done;
  std::map<const Decl*, DistValue> conds;
  std::set<const Decl*> cond_busy;
  std::vector<const Expr*> fbys;
  std::set<const Expr*> fby_seen;
  std::set<Location> locs;
  std::set<Location>* touched = nullptr;

  Impl(const ElaboratedProgram& e, DeclPtr d) : el(e), root(std::move(d)) { collect(root, {}); }

  void collect(const DeclPtr& d, std::vector<std::pair<const Decl*, bool>> path) {
    if (const auto* eq = d->as<Decl::Eq>()) {
      for (const auto& x : pattern_vars(eq->lhs)) sites[x].push_back({d.get(), path});
    } else if (const auto* a = d->as<Decl::And>()) {
      collect(a->left, path);
      collect(a->right, path);
    } else if (const auto* c = d->as<Decl::If>()) {
      path.push_back({d.get(), true});
      collect(c->then_branch, path);
      path.back().second = false;
      collect(c->else_branch, path);
    } else if (d->is<Decl::App>()) {
      throw std::logic_error("distributed execution needs an inlined program");
    }
  }

  void note(const Location& l) {
    locs.insert(l);
    if (touched) touched->insert(l);
  }

  const Location& expected_loc(const ExprPtr& e) {
    const auto& t = el.info(e).type;
    return std::get<SpatialType::At>(t->node).loc;
  }

  bool taken(const Decl* ifd, bool branch) {
    const auto& c = cond(ifd);
    return c.as_located().value.as_bool() == branch;
  }

  const DistValue& cond(const Decl* d) {
    if (auto it = conds.find(d); it != conds.end()) return it->second;
    const auto& c = *d->as<Decl::If>();
    if (!cond_busy.insert(d).second) throw Error("EVAL003", "instantaneous cycle through a condition", d->span);
    std::set<Location> own;
    auto* saved = touched;
    touched = &own;
    DistValue v = eval(c.cond);
    touched = saved;
    cond_busy.erase(d);
    if (!v.is_located() || !v.as_located().value.is_bool())
      throw Error("EVAL005", "condition is not a boolean: " + to_string(v), c.cond->span);
    return conds.emplace(d, v).first->second;
  }

  const DistValue& force(const Ident& x, SourceSpan span) {
    if (auto it = env.find(x); it != env.end()) return it->second;
    if (auto it = inputs->find(x); it != inputs->end()) return env.emplace(x, it->second).first->second;
    auto it = sites.find(x);
    if (it == sites.end()) {
      if (const NodeDef* n = el.program.find_node(x)) return env.emplace(x, DistValue::node(n)).first->second;
      throw Error("EVAL001", "unbound variable '" + x + "'", span);
    }
    if (!busy.insert(x).second) throw Error("EVAL003", "instantaneous cycle through '" + x + "'", span);
    const Site* site = nullptr;
    for (const auto& s : it->second) {
      bool ok = true;
      for (const auto& [ifd, branch] : s.path)
        if (!taken(ifd, branch)) {
          ok = false;
          break;
        }
      if (ok) {
        site = &s;
        break;
      }
    }
    if (!site) throw Error("EVAL001", "'" + x + "' is not defined by the taken branch", span);
    equation(*site);
    busy.erase(x);
    return env.at(x);
  }

  void equation(const Site& s) {
    if (!done.insert(s.eq).second) return;
    const auto& eq = *s.eq->as<Decl::Eq>();
    std::set<Location> own;
    auto* saved = touched;
    touched = &own;
    DistValue v = eval(eq.rhs);
    touched = saved;
    if (saved) saved->insert(own.begin(), own.end());
    bind(eq.lhs, v, s.eq->span);
    // a conditional's value must reach every location its taken branch uses
    for (const auto& [ifd, _] : s.path) {
      const Location& from = conds.at(ifd).as_located().at;
      for (const auto& l : own)
        if (l != from && !el.arch.has_link(from.name, l.name))
          throw Error("DIST002", "condition at " + to_string(from) + " cannot reach " + to_string(l), ifd->span);
    }
  }

  void bind(const Pattern& p, const DistValue& v, SourceSpan span) {
    if (p.is_single()) {
      env[p.name()] = v;
      return;
    }
    const auto& items = p.items();
    DistValue cur = v;
    for (size_t i = 0; i < items.size(); ++i) {
      if (i + 1 == items.size()) {
        bind(items[i], cur, span);
      } else if (cur.is_pair()) {
        bind(items[i], cur.first(), span);
        DistValue rest = cur.second();
        cur = rest;
      } else if (cur.is_located() && cur.as_located().value.is_abs()) {
        bind(items[i], cur, span);
      } else {
        throw Error("EVAL004", "cannot bind " + to_string(p) + " to " + to_string(v), span);
      }
    }
  }

  DistValue eval(const ExprPtr& e) {
    if (const auto* imm = e->as<Expr::Imm>()) {
      if (std::holds_alternative<AbsLiteral>(imm->value)) return locate(Value::abs(), el.info(e).type);
      const Location& at = expected_loc(e);
      note(at);
      return DistValue::located(Value::from_literal(imm->value), at);
    }
    if (const auto* v = e->as<Expr::Var>()) return variable(e, v->name);
    if (const auto* p = e->as<Expr::Pair>()) {
      DistValue a = eval(p->first);
      return DistValue::pair(a, eval(p->second));
    }
    if (const auto* op = e->as<Expr::BinOp>()) {
      DistValue a = eval(op->lhs);
      DistValue b = eval(op->rhs);
      if (a.is_located() && b.is_located() && a.as_located().at != b.as_located().at)
        throw Error("DIST003", std::string("operator ") + to_string(op->op) + " applied to " + to_string(a) + " and " +
                                   to_string(b), e->span);
      Value r;
      try {
        r = apply_op(op->op, erase(a), erase(b));
      } catch (const Error& err) {
        throw Error(err.code(), err.message(), e->span);
      }
      Location at = a.is_located() ? a.as_located().at : expected_loc(e);
      note(at);
      return DistValue::located(r, at);
    }
    if (const auto* f = e->as<Expr::Fby>()) {
      DistValue v;
      if (auto it = state.find(e.get()); it != state.end()) {
        v = locate(it->second, el.info(e).type);
        for (const auto& l : loc_of(v)) note(l);
      } else {
        v = eval(f->init);
      }
      if (fby_seen.insert(e.get()).second) fbys.push_back(e.get());
      return v;
    }
    const auto& a = *e->as<Expr::At>();
    DistValue v = eval(a.body);
    if (!v.is_node())
      for (const auto& l : loc_of(v))
        if (l != a.loc)
          throw Error("DIST004", "value " + to_string(v) + " computed outside of " + to_string(a.loc), e->span);
    return v;
  }

  DistValue variable(const ExprPtr& e, const Ident& x) {
    auto* saved = touched;
    touched = nullptr;
    DistValue v = force(x, e->span);
    touched = saved;
    if (v.is_node()) return v;
    const CommPoint* c = el.comm(e);
    if (!c || !c->channel) {
      for (const auto& l : loc_of(v)) note(l);
      return v;
    }
    auto ls = loc_of(v);
    if (ls.size() != 1)
      throw Error("DIST005", "cannot send '" + x + "' = " + to_string(v) + ": it spans several locations", e->span);
    if (*ls.begin() != c->from)
      throw Error("DIST002", "'" + x + "' is at " + to_string(*ls.begin()) + ", not at " + to_string(c->from),
                  e->span);
    if (!el.arch.has_link(c->from.name, c->to.name))
      throw Error("DIST002", "no link from " + to_string(c->from) + " to " + to_string(c->to), e->span);
    note(c->from);
    note(c->to);
    return DistValue::located(erase(v), c->to);
  }

  DistStep step(const DistEnv& in) {
    inputs = &in;
    env.clear();
    busy.clear();
    done.clear();
    conds.clear();
    cond_busy.clear();
    fbys.clear();
    fby_seen.clear();
    locs.clear();
    touched = nullptr;
    for (const auto& [x, _] : sites) force(x, root->span);
    std::map<const Expr*, Value> next;
    for (size_t i = 0; i < fbys.size(); ++i) {
      const Expr* f = fbys[i];
      next[f] = erase(eval(f->as<Expr::Fby>()->next));
    }
    for (auto& [f, v] : next) state[f] = std::move(v);
    DistStep out;
    for (const auto& [x, _] : sites) out.env[x] = env.at(x);
    out.locs = locs;
    return out;
  }
};

DistMachine::DistMachine(const ElaboratedProgram& el, DeclPtr d) : impl_(std::make_unique<Impl>(el, std::move(d))) {}
DistMachine::~DistMachine() = default;
DistStep DistMachine::step(const DistEnv& inputs) { return impl_->step(inputs); }

ElaboratedProgram prepare_dist(const Program& p) {
  auto el = infer_program(p);
  return infer_program(inline_program(el, [](const Ident&) { return false; }));
}

DistTrace run_dist(const Program& p, const Trace& inputs, int n) {
  auto el = prepare_dist(p);
  DistMachine m(el, el.program.main);
  auto outputs = defined_vars(p.main);
  DistTrace t;
  for (int k = 0; k < n; ++k) {
    DistEnv in;
    if (k < static_cast<int>(inputs.steps.size()))
      for (const auto& [x, v] : inputs.steps[k])
        if (auto it = el.main_vars.find(x); it != el.main_vars.end()) in[x] = locate(v, it->second);
    DistStep s;
    try {
      s = m.step(in);
    } catch (const Error& e) {
      throw Error(e.code(), "instant " + std::to_string(k) + ": " + e.message(), e.span());
    }
    DistStep kept;
    kept.locs = s.locs;
    for (const auto& x : outputs)
      if (auto it = s.env.find(x); it != s.env.end()) kept.env[x] = it->second;
    t.steps.push_back(std::move(kept));
  }
  return t;
}

}  // namespace sdf
