#include "sdf/inline.hpp"

#include <algorithm>
#include <cctype>

namespace sdf {

Ident instance_name(const Ident& x, int k) { return x + kGeneratedMarker + "i" + std::to_string(k); }

namespace {

void max_suffix(const Ident& x, int& best) {
  auto pos = x.rfind("$i");
  if (pos == Ident::npos || pos + 2 >= x.size()) return;
  int v = 0;
  for (size_t i = pos + 2; i < x.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(x[i]))) return;
    v = v * 10 + (x[i] - '0');
  }
  best = std::max(best, v);
}

ExprPtr locate_expr(const ExprPtr& e, const Location& s) {
  if (const auto* at = e->as<Expr::At>(); at && at->loc == s) return e;
  return make_at(e, s, e->span);
}

}  // namespace

DeclPtr pad_branch(DeclPtr d, const std::set<Ident>& want) {
  auto have = defined_vars(d);
  for (const auto& x : want)
    if (!have.count(x)) d = make_and(d, make_eq(Pattern::single(x), make_abs(d->span), d->span), d->span);
  return d;
}

int next_instance_index(const DeclPtr& d) {
  int best = 0;
  for (const auto& x : defined_vars(d)) max_suffix(x, best);
  for (const auto& x : free_vars(d)) max_suffix(x, best);
  return best + 1;
}

DeclPtr locate_decl(const DeclPtr& d, const Location& s) {
  if (is_empty(d)) return d;
  if (const auto* eq = d->as<Decl::Eq>()) return make_eq(eq->lhs, locate_expr(eq->rhs, s), d->span);
  if (const auto* app = d->as<Decl::App>())
    return make_app(app->lhs, app->callee, app->arg, app->at ? app->at : std::optional<Location>(s), d->span);
  if (const auto* a = d->as<Decl::And>()) return make_and(locate_decl(a->left, s), locate_decl(a->right, s), d->span);
  const auto& i = *d->as<Decl::If>();
  return make_if(locate_expr(i.cond, s), locate_decl(i.then_branch, s), locate_decl(i.else_branch, s), d->span);
}

std::vector<DeclPtr> split_equation(const DeclPtr& d) {
  const auto* eq = d->as<Decl::Eq>();
  if (!eq || eq->lhs.is_single()) return {d};
  const auto& items = eq->lhs.items();
  // peel `at` wrappers, remembering them to re-apply on each component
  std::vector<Location> locs;
  ExprPtr rhs = eq->rhs;
  while (const auto* at = rhs->as<Expr::At>()) {
    locs.push_back(at->loc);
    rhs = at->body;
  }
  std::vector<ExprPtr> parts;
  ExprPtr cur = rhs;
  for (size_t i = 0; i + 1 < items.size(); ++i) {
    const auto* p = cur->as<Expr::Pair>();
    if (!p) return {d};
    parts.push_back(p->first);
    cur = p->second;
  }
  parts.push_back(cur);
  std::vector<DeclPtr> out;
  for (size_t i = 0; i < items.size(); ++i) {
    ExprPtr e = parts[i];
    for (auto it = locs.rbegin(); it != locs.rend(); ++it) e = make_at(e, *it, eq->rhs->span);
    auto sub = split_equation(make_eq(items[i], e, d->span));
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

DeclPtr expand_application(const Decl::App& app, const NodeDef& callee, int k) {
  std::map<Ident, Ident> ren;
  for (const auto& x : pattern_vars(callee.input)) ren[x] = instance_name(x, k);
  for (const auto& x : defined_vars(callee.body_decls)) ren[x] = instance_name(x, k);
  std::vector<DeclPtr> parts;
  parts.push_back(make_eq(rename_vars(callee.input, ren), app.arg, app.arg->span));
  parts.push_back(make_eq(app.lhs, rename_vars(callee.body_expr, ren), callee.body_expr->span));
  parts.push_back(rename_vars(callee.body_decls, ren));
  DeclPtr out = make_conj(parts);
  if (app.at) out = locate_decl(out, *app.at);
  std::vector<DeclPtr> leaves;
  for (const auto& leaf : flatten_and(out)) {
    auto sub = split_equation(leaf);
    leaves.insert(leaves.end(), sub.begin(), sub.end());
  }
  return make_conj(leaves);
}

}  // namespace sdf

// ---- static inlining ---------------------------------------------------------

namespace sdf {

namespace {

struct NodeRef {
  Ident node;
  std::optional<Location> at;
};

struct InlineCtx {
  std::map<Ident, Ident> rename;
  // source location variable -> replacement; an empty replacement drops the `at`
  std::map<std::string, std::optional<Location>> locs;
  std::map<Ident, NodeRef> aliases;
  std::optional<Location> at;
  // names of the enclosing node's elaboration -> its declared location parameters
  std::map<std::string, std::string> canon_to_source;
};

class StaticInliner {
 public:
  StaticInliner(const ElaboratedProgram& el, const std::function<bool(const Ident&)>& keep) : el_(el), keep_(keep) {}

  Program run() {
    const Program& p = el_.program;
    Program out;
    out.arch = p.arch;
    for (const auto& n : p.nodes) {
      InlineCtx ctx;
      for (const auto& [src, canon] : el_.nodes.at(n.name).loc_params) ctx.canon_to_source[canon.name] = src;
      NodeDef m = n;
      m.body_decls = decl(n.body_decls, ctx);
      m.body_expr = expr(n.body_expr, ctx);
      out.nodes.push_back(std::move(m));
    }
    out.main = decl(p.main, InlineCtx{});
    return out;
  }

 private:
  std::optional<Location> subst(const Location& l, const InlineCtx& ctx) {
    if (l.is_const()) return l;
    auto it = ctx.locs.find(l.name);
    return it == ctx.locs.end() ? std::optional<Location>(l) : it->second;
  }

  // A location of the enclosing elaboration, in the source names of the output.
  std::optional<Location> from_elab(const Location& l, const InlineCtx& ctx) {
    if (l.is_const()) return l;
    auto it = ctx.canon_to_source.find(l.name);
    if (it == ctx.canon_to_source.end()) return std::nullopt;
    return subst(Location::var(it->second), ctx);
  }

  ExprPtr located(ExprPtr e, const std::optional<Location>& at) {
    if (!at) return e;
    if (const auto* a = e->as<Expr::At>(); a && a->loc == *at) return e;
    return make_at(e, *at, e->span);
  }

  ExprPtr expr(const ExprPtr& e, const InlineCtx& ctx) {
    if (const auto* imm = e->as<Expr::Imm>()) return std::make_shared<const Expr>(Expr{*imm, e->span});
    if (const auto* v = e->as<Expr::Var>()) {
      if (auto it = ctx.aliases.find(v->name); it != ctx.aliases.end())
        return located(make_var(it->second.node, e->span), it->second.at);
      auto it = ctx.rename.find(v->name);
      return make_var(it == ctx.rename.end() ? v->name : it->second, e->span);
    }
    if (const auto* p = e->as<Expr::Pair>()) return make_pair(expr(p->first, ctx), expr(p->second, ctx), e->span);
    if (const auto* op = e->as<Expr::BinOp>())
      return make_binop(op->op, expr(op->lhs, ctx), expr(op->rhs, ctx), e->span);
    if (const auto* f = e->as<Expr::Fby>()) return make_fby(expr(f->init, ctx), expr(f->next, ctx), e->span);
    const auto& a = *e->as<Expr::At>();
    auto s = subst(a.loc, ctx);
    return s ? make_at(expr(a.body, ctx), *s, e->span) : expr(a.body, ctx);
  }

  DeclPtr decl(const DeclPtr& d, const InlineCtx& ctx) {
    if (const auto* eq = d->as<Decl::Eq>())
      return make_eq(rename_vars(eq->lhs, ctx.rename), located(expr(eq->rhs, ctx), ctx.at), d->span);
    if (const auto* a = d->as<Decl::And>()) return make_and(decl(a->left, ctx), decl(a->right, ctx), d->span);
    if (const auto* c = d->as<Decl::If>()) {
      auto t = decl(c->then_branch, ctx), f = decl(c->else_branch, ctx);
      auto tv = defined_vars(t), fv = defined_vars(f);
      return make_if(located(expr(c->cond, ctx), ctx.at), pad_branch(t, fv), pad_branch(f, tv), d->span);
    }
    if (const auto* app = d->as<Decl::App>()) return application(d, *app, ctx);
    return make_empty();
  }

  // Statically known node behind a node-valued argument, if any.
  std::optional<NodeRef> node_target(const ExprPtr& e, const InlineCtx& ctx) {
    std::optional<Location> at;
    ExprPtr cur = e;
    while (const auto* a = cur->as<Expr::At>()) {
      if (!at) at = subst(a->loc, ctx);
      cur = a->body;
    }
    const auto* v = cur->as<Expr::Var>();
    if (!v) return std::nullopt;
    if (auto it = ctx.aliases.find(v->name); it != ctx.aliases.end()) {
      NodeRef r = it->second;
      if (!r.at) r.at = at;
      return r;
    }
    if (ctx.rename.count(v->name) || !el_.program.find_node(v->name)) return std::nullopt;
    return NodeRef{v->name, at};
  }

  bool node_valued(const ExprPtr& e) {
    auto it = el_.exprs.find(e.get());
    return it != el_.exprs.end() && std::holds_alternative<SpatialType::Func>(it->second.type->node);
  }

  // Bind the callee's parameters to the argument, component by component.
  void bind_params(const Pattern& pat, const ExprPtr& arg, const InlineCtx& caller, InlineCtx& callee,
                   std::vector<DeclPtr>& out) {
    if (!pat.is_single()) {
      const auto& items = pat.items();
      std::vector<ExprPtr> parts;
      ExprPtr cur = arg;
      for (size_t i = 0; i + 1 < items.size(); ++i) {
        const auto* p = cur->as<Expr::Pair>();
        if (!p) break;
        parts.push_back(p->first);
        cur = p->second;
      }
      if (parts.size() + 1 == items.size()) {
        parts.push_back(cur);
        for (size_t i = 0; i < items.size(); ++i) bind_params(items[i], parts[i], caller, callee, out);
        return;
      }
    } else if (node_valued(arg)) {
      if (auto target = node_target(arg, caller)) {
        callee.aliases[pat.name()] = *target;
        return;
      }
    }
    out.push_back(make_eq(rename_vars(pat, callee.rename), located(expr(arg, caller), callee.at), arg->span));
  }

  DeclPtr application(const DeclPtr& d, const Decl::App& app, const InlineCtx& ctx) {
    std::optional<Location> at = ctx.at;
    if (app.at) {
      if (auto s = subst(*app.at, ctx)) at = s;
    }
    std::optional<NodeRef> target;
    if (auto it = ctx.aliases.find(app.callee); it != ctx.aliases.end()) {
      target = it->second;
      if (!at) at = target->at;
    } else if (!ctx.rename.count(app.callee) && el_.program.find_node(app.callee)) {
      target = NodeRef{app.callee, std::nullopt};
    }
    auto lhs = rename_vars(app.lhs, ctx.rename);
    if (!target || keep_(target->node)) {
      Ident callee = target ? target->node : ctx.rename.count(app.callee) ? ctx.rename.at(app.callee) : app.callee;
      return make_app(lhs, callee, expr(app.arg, ctx), at, d->span);
    }

    const NodeDef& n = *el_.program.find_node(target->node);
    const NodeElab& ne = el_.nodes.at(target->node);
    const DeclInfo* info = nullptr;
    if (auto it = el_.decls.find(d.get()); it != el_.decls.end()) info = &it->second;
    int k = next_++;
    InlineCtx inner;
    inner.at = at;
    for (const auto& x : pattern_vars(n.input)) inner.rename[x] = instance_name(x, k);
    for (const auto& x : defined_vars(n.body_decls)) inner.rename[x] = instance_name(x, k);
    for (const auto& [src, canon] : ne.loc_params) {
      inner.canon_to_source[canon.name] = src;
      std::optional<Location> to;
      if (info && target->node == app.callee)
        if (auto it = info->loc_instance.find(canon.name); it != info->loc_instance.end()) to = from_elab(it->second, ctx);
      inner.locs[src] = to;
    }
    std::vector<DeclPtr> parts;
    bind_params(n.input, app.arg, ctx, inner, parts);
    parts.push_back(make_eq(lhs, located(expr(n.body_expr, inner), at), d->span));
    parts.push_back(decl(n.body_decls, inner));
    return make_conj(parts);
  }

  const ElaboratedProgram& el_;
  const std::function<bool(const Ident&)>& keep_;
  int next_ = 1;
};

}  // namespace

Program inline_program(const ElaboratedProgram& el, const std::function<bool(const Ident&)>& keep) {
  return StaticInliner(el, keep).run();
}

}  // namespace sdf
