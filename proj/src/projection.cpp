#include "sdf/projection.hpp"

#include <algorithm>
#include <cctype>

#include "sdf/diagnostics.hpp"
#include "sdf/inline.hpp"

namespace sdf {

Ident located_name(const Ident& x, const Location& a) { return x + kGeneratedMarker + a.name; }

bool channel_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    return std::pair{s.substr(0, i), s.substr(i)};
  };
  auto [pa, na] = split(a);
  auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na.size() != nb.size()) return na.size() < nb.size();
  return na < nb;
}

Program LocationProgram::program() const {
  Program p;
  p.nodes = shared;
  for (const auto& n : nodes) p.nodes.push_back(n.def);
  p.main = main;
  return p;
}

const LocationProgram& DeploymentPlan::at(const Location& a) const {
  for (const auto& l : locations)
    if (l.location == a) return l;
  throw Error("PROJ001", "no projection on " + to_string(a));
}

namespace {

enum class NodeKind { Shared, Projected, Inlined };

void all_locs(const TypePtr& t, std::vector<Location>& out) {
  auto push = [&](const Location& l) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  };
  if (const auto* at = std::get_if<SpatialType::At>(&t->node)) {
    push(at->loc);
  } else if (const auto* p = std::get_if<SpatialType::Prod>(&t->node)) {
    all_locs(p->first, out);
    all_locs(p->second, out);
  } else {
    const auto& f = std::get<SpatialType::Func>(t->node);
    all_locs(f.dom, out);
    for (const auto& l : f.eff) push(l);
    all_locs(f.cod, out);
  }
}

// Nodes whose code runs in one place (inputs elsewhere are never read) are
// used unchanged wherever they are instantiated; nodes without location
// variables get one projection per location; the rest is inlined first.
NodeKind classify(const NodeElab& n) {
  std::vector<Location> ls;
  all_locs(n.type, ls);
  bool has_const = std::any_of(ls.begin(), ls.end(), [](const Location& l) { return l.is_const(); });
  if (n.lvars.empty()) return has_const ? NodeKind::Projected : NodeKind::Shared;
  if (!has_const && n.chans.empty() && locations(n.type).size() <= 1) return NodeKind::Shared;
  return NodeKind::Inlined;
}

bool contains(const std::vector<Location>& ls, const Location& a) {
  return std::find(ls.begin(), ls.end(), a) != ls.end();
}

bool is_func(const TypePtr& t) { return t && std::holds_alternative<SpatialType::Func>(t->node); }

std::vector<Channel> sorted(std::vector<Channel> cs) {
  std::sort(cs.begin(), cs.end(), [](const Channel& x, const Channel& y) { return channel_less(x.name, y.name); });
  return cs;
}

class Projector {
 public:
  Projector(const ElaboratedProgram& el, Location a) : el_(el), a_(std::move(a)) {
    for (const auto& [name, n] : el_.nodes) kinds_[name] = classify(n);
  }

  std::vector<Diagnostic> diags;

  void enter_main() {
    locals_ = defined_vars(el_.program.main);
    for (const auto& x : input_vars(el_.program.main))
      if (!el_.program.find_node(x)) locals_.insert(x);
    conds_ = 0;
  }

  ExprProjection expr(const ExprPtr& e) {
    auto it = el_.exprs.find(e.get());
    if (it == el_.exprs.end()) return {make_abs(), make_empty()};
    const ExprInfo& info = it->second;
    if (is_func(info.type)) return {func_value(e, info.type), make_empty()};
    if (const auto* p = e->as<Expr::Pair>()) {
      auto x = expr(p->first), y = expr(p->second);
      auto d = make_and(x.chans, y.chans);
      if (is_abs(x.expr) && is_abs(y.expr)) return {make_abs(e->span), d};
      return {make_pair(x.expr, y.expr, e->span), d};
    }
    if (!contains(info.locs, a_)) return {make_abs(e->span), make_empty()};
    if (const auto* imm = e->as<Expr::Imm>()) {
      if (std::holds_alternative<AbsLiteral>(imm->value)) return {make_abs(e->span), make_empty()};
      return {e, make_empty()};
    }
    if (const auto* v = e->as<Expr::Var>()) {
      const CommPoint* c = el_.comm(e);
      if (!c || !c->channel) return {make_var(here(v->name), e->span), make_empty()};
      if (c->from == a_)
        return {make_abs(e->span), make_eq(Pattern::single(*c->channel), make_var(here(v->name), e->span), e->span)};
      if (c->to == a_) return {make_var(*c->channel, e->span), make_empty()};
      fail("PROJ001", "channel " + *c->channel + " neither starts nor ends on " + a_.name, e->span);
      return {make_abs(e->span), make_empty()};
    }
    if (const auto* op = e->as<Expr::BinOp>()) {
      auto x = expr(op->lhs), y = expr(op->rhs);
      auto d = make_and(x.chans, y.chans);
      if (is_abs(x.expr) || is_abs(y.expr)) return {make_abs(e->span), d};
      return {make_binop(op->op, x.expr, y.expr, e->span), d};
    }
    if (const auto* f = e->as<Expr::Fby>()) {
      auto x = expr(f->init), y = expr(f->next);
      auto d = make_and(x.chans, y.chans);
      if (is_abs(x.expr) || is_abs(y.expr)) return {make_abs(e->span), d};
      return {make_fby(x.expr, y.expr, e->span), d};
    }
    return expr(e->as<Expr::At>()->body);
  }

  DeclPtr decl(const DeclPtr& d) {
    if (const auto* eq = d->as<Decl::Eq>()) {
      auto r = expr(eq->rhs);
      if (is_abs(r.expr)) return r.chans;
      return make_and(make_eq(rename(eq->lhs), r.expr, d->span), r.chans);
    }
    if (const auto* a = d->as<Decl::And>()) return make_and(decl(a->left), decl(a->right), d->span);
    if (const auto* app = d->as<Decl::App>()) return application(d, *app);
    if (const auto* c = d->as<Decl::If>()) return conditional(d, *c);
    return make_empty();
  }

  std::optional<ProjectedNode> node(const NodeDef& n) {
    const NodeElab& ne = el_.nodes.at(n.name);
    if (!contains(locations(ne.type), a_)) return std::nullopt;
    locals_ = defined_vars(n.body_decls);
    for (const auto& x : pattern_vars(n.input)) {
      locals_.insert(x);
      auto t = ne.vars.find(x);
      if (t != ne.vars.end() && is_func(t->second) && locations(t->second).size() > 1)
        fail("PROJ004", "node parameter '" + x + "' of " + n.name + " spans several locations", n.span);
    }
    conds_ = 0;
    ProjectedNode out;
    out.origin = n.name;
    out.location = a_;
    for (const auto& c : sorted(ne.chans)) {
      if (c.from == a_) out.chan_outputs.push_back(c.name);
      if (c.to == a_) out.chan_inputs.push_back(c.name);
    }
    auto body = decl(n.body_decls);
    auto res = expr(n.body_expr);
    out.def.name = located_name(n.name, a_);
    out.def.input = with_chans(rename(n.input), out.chan_inputs);
    std::vector<ExprPtr> items{res.expr};
    for (const auto& c : out.chan_outputs) items.push_back(make_var(c));
    out.def.body_expr = sdf::make_tuple(items);
    out.def.body_decls = make_and(body, res.chans);
    out.def.span = n.span;
    return out;
  }

 private:
  const ElaboratedProgram& el_;
  Location a_;
  std::map<Ident, NodeKind> kinds_;
  std::set<Ident> locals_;
  int conds_ = 0;

  void fail(const std::string& code, const std::string& msg, SourceSpan span) {
    diags.push_back({Severity::Error, span, msg, code});
  }

  Ident here(const Ident& x) const { return located_name(x, a_); }

  Pattern rename(const Pattern& p) const {
    std::map<Ident, Ident> m;
    for (const auto& x : pattern_vars(p)) m[x] = here(x);
    return rename_vars(p, m);
  }

  static Pattern with_chans(Pattern p, const std::vector<std::string>& cs) {
    if (cs.empty()) return p;
    std::vector<Pattern> items{std::move(p)};
    for (const auto& c : cs) items.push_back(Pattern::single(c));
    return Pattern::tuple(std::move(items));
  }

  // Node-valued expression: a parameter, or a node name resolved to the code
  // that runs on this location.
  ExprPtr func_value(const ExprPtr& e, const TypePtr& t) {
    if (!contains(locations(t), a_)) return make_abs(e->span);
    if (const auto* at = e->as<Expr::At>()) return func_value(at->body, t);
    const auto* v = e->as<Expr::Var>();
    if (!v) {
      fail("PROJ004", "node-valued expression is not a name", e->span);
      return make_abs(e->span);
    }
    if (locals_.count(v->name)) return make_var(here(v->name), e->span);
    auto k = kinds_.find(v->name);
    if (k == kinds_.end()) return make_var(v->name, e->span);
    switch (k->second) {
      case NodeKind::Shared: return make_var(v->name, e->span);
      case NodeKind::Projected: return make_var(here(v->name), e->span);
      case NodeKind::Inlined: break;
    }
    fail("PROJ004", "node '" + v->name + "' spans several locations and is passed as a value", e->span);
    return make_abs(e->span);
  }

  DeclPtr application(const DeclPtr& d, const Decl::App& app) {
    const DeclInfo& info = el_.info(d);
    if (!contains(info.locs, a_)) return make_empty();
    auto arg = expr(app.arg);
    if (!info.callee_type || !contains(locations(info.callee_type), a_)) return arg.chans;
    Ident callee;
    std::vector<std::string> outs, ins;
    if (locals_.count(app.callee)) {
      callee = here(app.callee);
    } else {
      auto k = kinds_.find(app.callee);
      NodeKind kind = k == kinds_.end() ? NodeKind::Shared : k->second;
      if (kind == NodeKind::Inlined) {
        fail("PROJ004", "application of '" + app.callee + "' must be inlined before projection", d->span);
        return arg.chans;
      }
      callee = kind == NodeKind::Shared ? app.callee : here(app.callee);
      if (kind == NodeKind::Projected) {
        for (const auto& c : sorted(el_.nodes.at(app.callee).chans)) {
          auto r = info.chan_renaming.find(c.name);
          const std::string& name = r == info.chan_renaming.end() ? c.name : r->second;
          if (c.from == a_) outs.push_back(name);
          if (c.to == a_) ins.push_back(name);
        }
      }
    }
    std::vector<ExprPtr> items{arg.expr};
    for (const auto& c : ins) items.push_back(make_var(c, d->span));
    auto call = make_app(with_chans(rename(app.lhs), outs), callee, sdf::make_tuple(items), std::nullopt, d->span);
    return make_and(call, arg.chans);
  }

  DeclPtr conditional(const DeclPtr& d, const Decl::If& c) {
    const DeclInfo& info = el_.info(d);
    if (defined_vars(c.then_branch) != defined_vars(c.else_branch))
      fail("PROJ003", "branches of the conditional define different variables", d->span);
    if (!contains(info.locs, a_) || !info.cond_loc) return make_empty();
    auto cond = expr(c.cond);
    auto t = decl(c.then_branch), f = decl(c.else_branch);
    auto tv = defined_vars(t);
    t = pad_branch(t, defined_vars(f));
    f = pad_branch(f, tv);
    if (*info.cond_loc == a_) {
      std::vector<std::string> sends;
      for (const auto& [to, ch] : info.broadcast)
        if (ch) sends.push_back(*ch);
      std::sort(sends.begin(), sends.end(), channel_less);
      // the local carrying the condition only matters when it is broadcast
      if (sends.empty()) return make_and(cond.chans, make_if(cond.expr, t, f, d->span));
      Ident x = "cond" + std::string(1, kGeneratedMarker) + std::to_string(++conds_);
      std::vector<DeclPtr> parts{cond.chans, make_eq(Pattern::single(x), cond.expr, c.cond->span)};
      for (const auto& s : sends) parts.push_back(make_eq(Pattern::single(s), make_var(x), c.cond->span));
      parts.push_back(make_if(make_var(x), t, f, d->span));
      return make_conj(parts);
    }
    for (const auto& [to, ch] : info.broadcast)
      if (to == a_ && ch) return make_and(cond.chans, make_if(make_var(*ch, c.cond->span), t, f, d->span));
    if (!is_empty(t) || !is_empty(f))
      fail("PROJ001", "conditional runs on " + a_.name + " without receiving its condition", d->span);
    return cond.chans;
  }
};

void count_defs(const DeclPtr& d, std::map<Ident, int>& out) {
  if (const auto* eq = d->as<Decl::Eq>()) {
    for (const auto& x : pattern_vars(eq->lhs)) ++out[x];
  } else if (const auto* app = d->as<Decl::App>()) {
    for (const auto& x : pattern_vars(app->lhs)) ++out[x];
  } else if (const auto* a = d->as<Decl::And>()) {
    count_defs(a->left, out);
    count_defs(a->right, out);
  } else if (const auto* c = d->as<Decl::If>()) {
    // a name defined in both branches is still one definition
    std::map<Ident, int> t, f;
    count_defs(c->then_branch, t);
    count_defs(c->else_branch, f);
    for (const auto& [x, k] : t) out[x] += std::max(k, f.count(x) ? f.at(x) : 0);
    for (const auto& [x, k] : f)
      if (!t.count(x)) out[x] += k;
  }
}

void check_collisions(const DeclPtr& d, const std::string& where, std::vector<Diagnostic>& diags) {
  std::map<Ident, int> defs;
  count_defs(d, defs);
  for (const auto& [x, k] : defs)
    if (k > 1) diags.push_back({Severity::Error, d->span, "'" + x + "' is defined " + std::to_string(k) + " times in " + where, "PROJ002"});
}

void throw_if(std::vector<Diagnostic>& diags) {
  if (!diags.empty()) throw CompileError(std::move(diags));
}

// Nodes reachable from `d` through applications and node-valued names.
std::set<Ident> reachable(const DeclPtr& d, const std::map<Ident, const NodeDef*>& defs) {
  std::set<Ident> seen;
  std::vector<Ident> work;
  auto visit = [&](const std::set<Ident>& names) {
    for (const auto& x : names)
      if (defs.count(x) && seen.insert(x).second) work.push_back(x);
  };
  visit(free_vars(d));
  while (!work.empty()) {
    const NodeDef* n = defs.at(work.back());
    work.pop_back();
    visit(free_vars(n->body_decls));
    visit(free_vars(n->body_expr));
  }
  return seen;
}

}  // namespace

ElaboratedProgram prepare_projection(const Program& p) {
  auto el = infer_program(p);
  std::map<Ident, NodeKind> kinds;
  for (const auto& [name, n] : el.nodes) kinds[name] = classify(n);
  return infer_program(inline_program(el, [&](const Ident& n) {
    auto it = kinds.find(n);
    return it != kinds.end() && it->second != NodeKind::Inlined;
  }));
}

ExprProjection project_expr(const ElaboratedProgram& el, const ExprPtr& e, const Location& a) {
  Projector pr(el, a);
  pr.enter_main();
  auto r = pr.expr(e);
  throw_if(pr.diags);
  return r;
}

DeclPtr project_decl(const ElaboratedProgram& el, const DeclPtr& d, const Location& a) {
  Projector pr(el, a);
  pr.enter_main();
  auto r = pr.decl(d);
  throw_if(pr.diags);
  return r;
}

DeploymentPlan project_program(const ElaboratedProgram& el) {
  DeploymentPlan plan;
  plan.source = el;
  std::vector<Diagnostic> diags;
  for (const auto& c : sorted(el.main_chans)) plan.wiring.push_back({c.name, c.from, c.to, to_string(c.payload)});

  for (const auto& name : el.arch.locations()) {
    Location a = Location::constant(name);
    Projector pr(el, a);
    LocationProgram lp;
    lp.location = a;
    std::vector<ProjectedNode> projected;
    std::vector<const NodeDef*> shared;
    for (const auto& n : el.program.nodes) {
      switch (classify(el.nodes.at(n.name))) {
        case NodeKind::Projected:
          if (auto pn = pr.node(n)) projected.push_back(std::move(*pn));
          break;
        case NodeKind::Shared: shared.push_back(&n); break;
        case NodeKind::Inlined: break;
      }
    }
    pr.enter_main();
    lp.main = pr.decl(el.program.main);
    diags.insert(diags.end(), pr.diags.begin(), pr.diags.end());

    std::map<Ident, const NodeDef*> defs;
    for (const auto* n : shared) defs[n->name] = n;
    for (const auto& n : projected) defs[n.def.name] = &n.def;
    auto used = reachable(lp.main, defs);
    for (const auto* n : shared)
      if (used.count(n->name)) lp.shared.push_back(*n);
    for (auto& n : projected)
      if (used.count(n.def.name)) lp.nodes.push_back(std::move(n));
    for (const auto& n : lp.nodes) check_collisions(n.def.body_decls, n.def.name, diags);
    check_collisions(lp.main, "main on " + name, diags);

    for (const auto& w : plan.wiring) {
      if (w.from == a) lp.sends.push_back(w.channel);
      if (w.to == a) lp.receives.push_back(w.channel);
    }
    std::string suffix = std::string(1, kGeneratedMarker) + name;
    for (const auto& x : input_vars(lp.main)) {
      if (defs.count(x) || std::count(lp.receives.begin(), lp.receives.end(), x)) continue;
      if (x.size() > suffix.size() && x.compare(x.size() - suffix.size(), suffix.size(), suffix) == 0)
        lp.external[x] = x.substr(0, x.size() - suffix.size());
    }
    plan.locations.push_back(std::move(lp));
  }

  // channels are defined once by their producer and read by their consumer
  for (const auto& w : plan.wiring) {
    const auto& from = plan.at(w.from);
    if (!defined_vars(from.main).count(w.channel))
      diags.push_back({Severity::Error, {}, "channel " + w.channel + " is never written on " + w.from.name, "PROJ001"});
  }
  throw_if(diags);
  return plan;
}

}  // namespace sdf
