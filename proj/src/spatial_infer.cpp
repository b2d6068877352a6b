#include <algorithm>
#include <set>

#include "sdf/diagnostics.hpp"
#include "sdf/spatial_types.hpp"
#include "types_engine.hpp"

namespace sdf {

const ExprInfo& ElaboratedProgram::info(const ExprPtr& e) const { return exprs.at(e.get()); }
const DeclInfo& ElaboratedProgram::info(const DeclPtr& d) const { return decls.at(d.get()); }
const CommPoint* ElaboratedProgram::comm(const ExprPtr& e) const {
  auto it = comms.find(e.get());
  return it == comms.end() ? nullptr : &it->second;
}

namespace {

using detail::Engine;
using detail::LocKind;
using detail::TypeClash;
using Shape = Engine::Shape;

// A node that failed to type; its users are skipped without a second report.
struct Poisoned {};

struct RawConstraint {
  int lhs, rhs;
  SourceSpan span;
};

// Something that may need a channel once locations are resolved.
struct Candidate {
  enum Kind { Comm, Inst, Bcast } kind;
  const Expr* expr = nullptr;
  const Decl* decl = nullptr;
  std::vector<std::pair<int, int>> pairs;  // Comm: (definition, use)
  int def_type = -1;                       // Comm
  std::string callee_chan;                 // Inst
  int from = -1, to = -1;                  // Inst, Bcast
  int payload = -1;                        // Inst
  SourceSpan span;
};

struct DeclRec {
  std::vector<int> locs;
  std::vector<std::pair<std::string, int>> loc_instance;
  int callee_type = -1;
  int cond_loc = -1;
};

struct Typed {
  int type;
  std::vector<int> locs;
};

struct Scope {
  bool is_node = false;
  int loc_start = 0;
  std::map<std::string, int> lparams;
  std::map<Ident, int> vars;
  std::vector<RawConstraint> constraints;
  std::vector<Candidate> cands;
  std::vector<std::pair<const Expr*, Typed>> exprs;
  std::vector<std::pair<const Decl*, DeclRec>> decls;
};

struct NodeInstance {
  int type;
  std::vector<std::pair<std::string, int>> loc_instance;
  std::vector<Candidate> chans;
};

void add_locs(std::vector<int>& to, const std::vector<int>& from) { to.insert(to.end(), from.begin(), from.end()); }

std::string tvar_label(int k) {
  if (k < 26) return std::string("'") + static_cast<char>('a' + k);
  return "'t" + std::to_string(k);
}

// Leaves of a conjunction in dependency order (definitions before uses,
// source order otherwise, cycles broken arbitrarily).
std::vector<DeclPtr> typing_order(const std::vector<DeclPtr>& leaves) {
  size_t n = leaves.size();
  std::vector<std::set<Ident>> reads(n), defs(n);
  for (size_t i = 0; i < n; ++i) {
    reads[i] = free_vars(leaves[i]);
    defs[i] = defined_vars(leaves[i]);
  }
  std::vector<int> state(n, 0);
  std::vector<DeclPtr> out;
  std::function<void(size_t)> visit = [&](size_t i) {
    if (state[i]) return;
    state[i] = 1;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      bool dep = std::any_of(reads[i].begin(), reads[i].end(), [&](const Ident& x) { return defs[j].count(x) != 0; });
      if (dep) visit(j);
    }
    state[i] = 2;
    out.push_back(leaves[i]);
  };
  for (size_t i = 0; i < n; ++i) visit(i);
  return out;
}

// Each variable may be defined once; both branches of a conditional count as one.
void count_definitions(const DeclPtr& d, std::map<Ident, int>& count, const Decl*& dup_at, Ident& dup) {
  auto note = [&](const Pattern& p) {
    for (const auto& x : pattern_vars(p))
      if (++count[x] == 2 && !dup_at) {
        dup_at = d.get();
        dup = x;
      }
  };
  if (auto* eq = d->as<Decl::Eq>()) {
    note(eq->lhs);
  } else if (auto* app = d->as<Decl::App>()) {
    note(app->lhs);
  } else if (auto* a = d->as<Decl::And>()) {
    count_definitions(a->left, count, dup_at, dup);
    count_definitions(a->right, count, dup_at, dup);
  } else if (auto* c = d->as<Decl::If>()) {
    std::map<Ident, int> inner;
    count_definitions(c->then_branch, inner, dup_at, dup);
    std::map<Ident, int> other;
    count_definitions(c->else_branch, other, dup_at, dup);
    for (const auto& x : defined_vars(d))
      if (++count[x] == 2 && !dup_at) {
        dup_at = d.get();
        dup = x;
      }
  }
}

void collect_callees(const DeclPtr& d, std::set<Ident>& out) {
  if (auto* app = d->as<Decl::App>()) {
    out.insert(app->callee);
  } else if (auto* a = d->as<Decl::And>()) {
    collect_callees(a->left, out);
    collect_callees(a->right, out);
  } else if (auto* c = d->as<Decl::If>()) {
    collect_callees(c->then_branch, out);
    collect_callees(c->else_branch, out);
  }
}

class Inferencer {
 public:
  explicit Inferencer(const Program& p) : p_(p) {}

  ElaboratedProgram run() {
    out_.program = p_;
    try {
      g_ = build_arch(p_.arch);
    } catch (const Error& err) {
      throw CompileError({err.to_diagnostic()});
    }
    out_.arch = g_;
    for (const auto& l : g_.locations()) e_.loc_const(l);
    for (const auto& n : p_.nodes) guarded([&] { infer_node(n); }, n.name);
    guarded([&] { infer_main(); }, "");
    if (!diags_.empty()) throw CompileError(diags_);
    return std::move(out_);
  }

 private:
  template <class F>
  void guarded(F f, const Ident& node) {
    try {
      f();
    } catch (const Error& err) {
      diags_.push_back(err.to_diagnostic());
      if (!node.empty()) failed_.insert(node);
    } catch (const Poisoned&) {
      if (!node.empty()) failed_.insert(node);
    }
  }

  // ---- environment

  int location(const Location& l, SourceSpan span) {
    if (l.is_const()) {
      if (!g_.has_location(l.name)) throw Error("TYPE005", "undeclared location " + l.name, span);
      return e_.loc_const(l.name);
    }
    auto it = sc_->lparams.find(l.name);
    if (it == sc_->lparams.end()) throw Error("TYPE005", "unknown location variable " + l.name, span);
    return it->second;
  }

  int fresh_data(int loc) { return e_.s_at(e_.l_var(), loc); }

  // Unbound placeholders of variables read before their definition was typed.
  int settle(int t) {
    if (e_.shape(e_.sfind(t)) == Shape::Var) e_.unify(t, fresh_data(e_.loc_flex()));
    return t;
  }

  int pattern_shape(const Pattern& p) {
    if (p.is_single()) return sc_->vars.at(p.name());
    const auto& items = p.items();
    int t = pattern_shape(items.back());
    for (size_t i = items.size() - 1; i-- > 0;) t = e_.s_prod(pattern_shape(items[i]), t);
    return t;
  }

  NodeInstance instantiate_node(const Ident& name, std::optional<int> at, SourceSpan span) {
    if (failed_.count(name)) throw Poisoned{};
    const Scheme& s = schemes_.at(name);
    std::map<std::string, int> tv, lv;
    for (const auto& a : s.tvars) tv[a] = e_.l_var();
    for (const auto& d : s.lvars) lv[d] = e_.loc_flex();
    NodeInstance inst;
    inst.type = e_.import_type(s.body, tv, lv);
    for (const auto& d : s.lvars) inst.loc_instance.push_back({d, lv[d]});
    if (at) {
      std::set<int> consts;
      for (int l : e_.locations(inst.type))
        if (e_.loc_kind(l) != LocKind::Flex) consts.insert(e_.lroot(l));
      if (consts.size() > 1)
        throw Error("TYPE004", "node " + name + " spans several locations and cannot be placed on " + e_.loc_name(*at),
                    span);
      e_.unify(inst.type, fresh_data(*at));
    }
    for (const auto& c : s.constraints) sc_->constraints.push_back({e_.import_loc(c.lhs, lv), e_.import_loc(c.rhs, lv), span});
    for (const auto& c : s.chans) {
      Candidate k;
      k.kind = Candidate::Inst;
      k.callee_chan = c.name;
      k.from = e_.import_loc(c.from, lv);
      k.to = e_.import_loc(c.to, lv);
      k.payload = e_.import_local(c.payload, tv);
      k.span = span;
      inst.chans.push_back(k);
    }
    return inst;
  }

  // ---- expressions

  Typed op_app(const std::string& op, const ExprPtr& a, const ExprPtr& b, std::optional<int> at) {
    Typed ta = expr(a, at), tb = expr(b, at);
    std::map<std::string, int> tv, lv;
    const Scheme& s = ops_.at(op);
    int f = e_.import_type(s.body, tv, lv);
    if (at) e_.unify(f, fresh_data(*at));
    f = e_.view(f);
    e_.unify(e_.first(f), e_.s_prod(ta.type, tb.type));
    Typed r{e_.second(f), e_.eff(f)};
    add_locs(r.locs, ta.locs);
    add_locs(r.locs, tb.locs);
    return r;
  }

  Typed var_use(const ExprPtr& x, const Ident& name, std::optional<int> at) {
    auto it = sc_->vars.find(name);
    if (it == sc_->vars.end()) {
      if (!p_.find_node(name)) throw Error("TYPE010", "unknown variable " + name, x->span);
      auto inst = instantiate_node(name, at, x->span);
      return {inst.type, e_.locations(inst.type)};
    }
    int t = settle(it->second);
    if (e_.has_func(t)) {
      if (at) e_.unify(t, fresh_data(*at));
      return {t, e_.locations(t)};
    }
    Candidate k;
      k.kind = Candidate::Comm;
    k.expr = x.get();
    k.def_type = t;
    k.span = x->span;
    int c = e_.copy_data(t, k.pairs);
    Typed r{c, {}};
    for (auto [from, to] : k.pairs) {
      sc_->constraints.push_back({from, to, x->span});
      r.locs.push_back(from);
      r.locs.push_back(to);
    }
    sc_->cands.push_back(std::move(k));
    if (at) e_.unify(c, fresh_data(*at));
    return r;
  }

  Typed expr(const ExprPtr& x, std::optional<int> at) {
    Typed r{-1, {}};
    try {
      if (auto* imm = x->as<Expr::Imm>(); imm && !at && std::holds_alternative<AbsLiteral>(imm->value)) {
        // absence is not stored anywhere, so it takes whatever shape the context asks for
        r = {e_.s_var(), {}};
      } else if (imm) {
        int loc = at ? *at : e_.loc_flex();
        int local = std::holds_alternative<std::int64_t>(imm->value) ? e_.l_base(BaseSort::Int)
                    : std::holds_alternative<bool>(imm->value)       ? e_.l_base(BaseSort::Bool)
                                                                     : e_.l_var();
        r = {e_.s_at(local, loc), {loc}};
      } else if (auto* v = x->as<Expr::Var>()) {
        r = var_use(x, v->name, at);
      } else if (auto* p = x->as<Expr::Pair>()) {
        Typed a = expr(p->first, at), b = expr(p->second, at);
        r = {e_.s_prod(a.type, b.type), a.locs};
        add_locs(r.locs, b.locs);
      } else if (auto* op = x->as<Expr::BinOp>()) {
        r = op_app(to_string(op->op), op->lhs, op->rhs, at);
      } else if (auto* f = x->as<Expr::Fby>()) {
        r = op_app("fby", f->init, f->next, at);
      } else if (auto* a = x->as<Expr::At>()) {
        int s = location(a->loc, x->span);
        if (at) e_.unify_loc(*at, s);
        r = expr(a->body, s);
      }
    } catch (const TypeClash& c) {
      throw Error(c.code, c.message, x->span);
    }
    sc_->exprs.push_back({x.get(), r});
    return r;
  }

  // ---- declarations

  void bind(const Pattern& p, int t) { e_.unify(pattern_shape(p), t); }

  std::vector<int> decls(const DeclPtr& d) {
    if (!d->is<Decl::And>()) return decl(d);
    std::vector<int> locs;
    for (const auto& leaf : typing_order(flatten_and(d))) add_locs(locs, decl(leaf));
    DeclRec rec;
    rec.locs = locs;
    sc_->decls.push_back({d.get(), rec});
    return locs;
  }

  std::vector<int> decl(const DeclPtr& d) {
    if (d->is<Decl::And>()) return decls(d);
    DeclRec rec;
    try {
      if (auto* eq = d->as<Decl::Eq>()) {
        Typed r = expr(eq->rhs, std::nullopt);
        bind(eq->lhs, r.type);
        rec.locs = r.locs;
      } else if (auto* app = d->as<Decl::App>()) {
        app_decl(d, *app, rec);
      } else if (auto* c = d->as<Decl::If>()) {
        if_decl(d, *c, rec);
      }
    } catch (const TypeClash& c) {
      throw Error(c.code, c.message, d->span);
    }
    sc_->decls.push_back({d.get(), rec});
    return rec.locs;
  }

  void app_decl(const DeclPtr& d, const Decl::App& app, DeclRec& rec) {
    std::optional<int> at;
    if (app.at) at = location(*app.at, d->span);
    int f;
    std::vector<Candidate> chans;
    if (auto it = sc_->vars.find(app.callee); it != sc_->vars.end()) {
      f = settle(it->second);
      int v = e_.view(f);
      if (e_.shape(v) == Shape::At && e_.shape(e_.sfind(v)) == Shape::At)
        e_.unify_local(e_.at_local(v), e_.l_func(e_.l_var(), e_.l_var()));
      if (at) e_.unify(f, fresh_data(*at));
    } else if (p_.find_node(app.callee)) {
      auto inst = instantiate_node(app.callee, at, d->span);
      f = inst.type;
      rec.loc_instance = inst.loc_instance;
      chans = std::move(inst.chans);
    } else {
      throw Error("TYPE010", "unknown node " + app.callee, d->span);
    }
    f = e_.view(f);
    if (e_.shape(f) != Shape::Func) throw Error("TYPE002", app.callee + " is not a node", d->span);
    Typed arg = expr(app.arg, at);
    e_.unify(e_.first(f), arg.type);
    bind(app.lhs, e_.second(f));
    rec.locs = e_.eff(f);
    add_locs(rec.locs, arg.locs);
    rec.callee_type = f;
    for (auto& k : chans) {
      k.decl = d.get();
      sc_->cands.push_back(std::move(k));
    }
  }

  void if_decl(const DeclPtr& d, const Decl::If& c, DeclRec& rec) {
    Typed cond = expr(c.cond, std::nullopt);
    int s = e_.loc_flex();
    e_.unify(cond.type, e_.s_at(e_.l_base(BaseSort::Bool), s));
    auto l1 = decls(c.then_branch);
    auto l2 = decls(c.else_branch);
    if (defined_vars(c.then_branch) != defined_vars(c.else_branch))
      throw Error("TYPE006", "branches of the conditional define different variables", d->span);
    add_locs(l1, l2);
    std::set<int> seen;
    for (int l : l1) {
      if (!seen.insert(e_.lroot(l)).second) continue;
      sc_->constraints.push_back({s, l, d->span});
      Candidate k;
      k.kind = Candidate::Bcast;
      k.decl = d.get();
      k.from = s;
      k.to = l;
      k.span = d->span;
      sc_->cands.push_back(k);
    }
    rec.cond_loc = s;
    rec.locs = cond.locs;
    rec.locs.push_back(s);
    add_locs(rec.locs, l1);
  }

  void check_definitions(const DeclPtr& d) {
    std::map<Ident, int> count;
    const Decl* at = nullptr;
    Ident dup;
    count_definitions(d, count, at, dup);
    if (at) throw Error("TYPE011", "variable " + dup + " is defined twice", at->span);
  }

  // ---- resolution

  void resolve_scope() {
    Scope& s = *sc_;
    int n = e_.loc_count();
    auto flex = [&](int r) { return e_.loc_kind(r) == LocKind::Flex; };

    std::map<int, int> parent;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int id = s.loc_start; id < n; ++id)
      if (int r = e_.lroot(id); flex(r)) parent.emplace(r, r);
    std::set<int> anchored;
    for (const auto& c : s.constraints) {
      int a = e_.lroot(c.lhs), b = e_.lroot(c.rhs);
      if (flex(a) && flex(b)) {
        parent.emplace(a, a);
        parent.emplace(b, b);
        parent[find(a)] = find(b);
      }
    }
    for (const auto& c : s.constraints) {
      int a = e_.lroot(c.lhs), b = e_.lroot(c.rhs);
      if (flex(a) && !flex(b)) anchored.insert(find(a));
      if (flex(b) && !flex(a)) anchored.insert(find(b));
    }
    // unconstrained groups of variables collapse onto one location
    for (auto& [r, _] : parent) {
      int comp = find(r);
      if (!anchored.count(comp)) e_.unify_loc(comp, r);
    }

    std::vector<Constraint> named;
    std::vector<SourceSpan> spans;
    std::map<std::string, int> var_ids;
    auto name = [&](int r) {
      switch (e_.loc_kind(r)) {
        case LocKind::Const: return Location::constant(e_.loc_name(r));
        case LocKind::Rigid: return Location::constant("'" + e_.loc_name(r));
        case LocKind::Flex: break;
      }
      std::string v = "?" + std::to_string(r);
      var_ids[v] = r;
      return Location::var(v);
    };
    for (const auto& c : s.constraints) {
      int a = e_.lroot(c.lhs), b = e_.lroot(c.rhs);
      if (a == b) continue;
      named.push_back({name(a), name(b)});
      spans.push_back(c.span);
    }
    if (!named.empty()) {
      ArchGraph vg = g_;
      for (const auto& [p, _] : s.lparams) vg.add_location("'" + p);
      for (const auto& [p, _] : s.lparams)
        for (const auto& u : vg.locations())
          if (u != "'" + p) {
            vg.add_link("'" + p, u);
            vg.add_link(u, "'" + p);
          }
      auto res = resolve(named, vg, {});
      if (!res.ok()) {
        const auto& w = res.failure->witness;
        SourceSpan span = spans.front();
        for (size_t i = 0; i < named.size(); ++i)
          if (named[i] == w) span = spans[i];
        auto show = [](const Location& l) {
          if (l.is_var()) return std::string("_");
          return l.name[0] == '\'' ? l.name.substr(1) : l.name;
        };
        throw Error("TYPE007", "no communication link from " + show(w.lhs) + " to " + show(w.rhs), span);
      }
      for (const auto& [v, val] : res.assignment) {
        auto it = var_ids.find(v);
        if (it == var_ids.end()) continue;
        int target = val[0] == '\'' ? s.lparams.at(val.substr(1)) : e_.loc_const(val);
        e_.unify_loc(target, it->second);
      }
    }
    if (!s.is_node && !g_.empty()) {
      int first = e_.loc_const(g_.locations().front());
      for (int id = s.loc_start; id < n; ++id)
        if (flex(e_.lroot(id))) e_.unify_loc(first, id);
    }
  }

  // ---- naming and export

  struct Names {
    std::map<int, std::string> locs;
    std::map<int, std::string> tvars;
  };

  detail::Namer namer(Names& nm) {
    return {[this, &nm](int r) {
              r = e_.lroot(r);
              if (e_.loc_kind(r) == LocKind::Const) return Location::constant(e_.loc_name(r));
              auto it = nm.locs.find(r);
              if (it == nm.locs.end()) it = nm.locs.emplace(r, "d" + std::to_string(nm.locs.size() + 1)).first;
              return Location::var(it->second);
            },
            [&nm](int v) {
              auto it = nm.tvars.find(v);
              if (it == nm.tvars.end()) it = nm.tvars.emplace(v, tvar_label(static_cast<int>(nm.tvars.size()))).first;
              return it->second;
            }};
  }

  // Names the channels of the current scope and writes its elaboration.
  std::vector<Channel> finish_scope(const detail::Namer& n, std::map<const Decl*, DeclInfo>& dinfo) {
    Scope& s = *sc_;
    std::vector<Channel> chans;
    std::map<const Decl*, std::set<int>> bcast_seen;
    auto next_name = [&] { return "c$" + std::to_string(chans.size() + 1); };
    for (const auto& k : s.cands) {
      switch (k.kind) {
        case Candidate::Comm: {
          std::vector<std::pair<int, int>> moves;
          for (auto [a, b] : k.pairs) {
            std::pair<int, int> m{e_.lroot(a), e_.lroot(b)};
            if (m.first != m.second && std::find(moves.begin(), moves.end(), m) == moves.end()) moves.push_back(m);
          }
          std::set<int> sources;
          for (auto [a, b] : k.pairs) sources.insert(e_.lroot(a));
          if (moves.size() > 1 || (moves.size() == 1 && sources.size() > 1))
            throw Error("TYPE009", "a communicated value must live on a single location", k.span);
          if (moves.empty()) {
            if (!k.pairs.empty()) {
              Location l = n.loc(k.pairs.front().first);
              out_.comms[k.expr] = {l, l, std::nullopt};
            }
          } else {
            Channel c{next_name(), n.loc(moves[0].first), n.loc(moves[0].second),
                      e_.export_local(e_.local_of(k.def_type), n)};
            out_.comms[k.expr] = {c.from, c.to, c.name};
            chans.push_back(c);
          }
          break;
        }
        case Candidate::Inst:
          if (e_.lroot(k.from) != e_.lroot(k.to)) {
            Channel c{next_name(), n.loc(k.from), n.loc(k.to), e_.export_local(k.payload, n)};
            dinfo[k.decl].chan_renaming[k.callee_chan] = c.name;
            chans.push_back(c);
          }
          break;
        case Candidate::Bcast: {
          int to = e_.lroot(k.to);
          if (!bcast_seen[k.decl].insert(to).second) break;
          std::optional<std::string> name;
          if (e_.lroot(k.from) != to) {
            Channel c{next_name(), n.loc(k.from), n.loc(to), local_base(BaseSort::Bool)};
            name = c.name;
            chans.push_back(c);
          }
          dinfo[k.decl].broadcast.push_back({n.loc(to), name});
          break;
        }
      }
    }
    return chans;
  }

  void export_scope(const detail::Namer& n, std::map<const Decl*, DeclInfo> dinfo) {
    Scope& s = *sc_;
    for (auto& [x, t] : s.exprs) {
      std::vector<int> roots;
      for (int l : t.locs) roots.push_back(e_.lroot(l));
      out_.exprs[x] = {e_.export_type(t.type, n), e_.export_locs(roots, n)};
    }
    for (auto& [d, r] : s.decls) {
      DeclInfo& info = dinfo[d];
      info.locs = e_.export_locs(r.locs, n);
      for (const auto& [v, l] : r.loc_instance) info.loc_instance[v] = n.loc(l);
      if (r.callee_type >= 0) info.callee_type = e_.export_type(r.callee_type, n);
      if (r.cond_loc >= 0) info.cond_loc = n.loc(r.cond_loc);
      out_.decls[d] = std::move(info);
    }
  }

  // ---- scopes

  void infer_node(const NodeDef& node) {
    Scope s;
    s.is_node = true;
    s.loc_start = e_.loc_count();
    sc_ = &s;
    for (const auto& lp : node.loc_params) s.lparams[lp.name] = e_.loc_rigid(lp.name);
    for (const auto& x : pattern_vars(node.input)) s.vars[x] = fresh_data(e_.loc_flex());
    check_definitions(node.body_decls);
    for (const auto& x : defined_vars(node.body_decls)) {
      if (s.vars.count(x)) throw Error("TYPE011", "variable " + x + " is defined twice", node.span);
      s.vars[x] = e_.s_var();
    }
    auto locs = decls(node.body_decls);
    Typed body = expr(node.body_expr, std::nullopt);
    add_locs(locs, body.locs);
    int dom = pattern_shape(node.input);
    std::vector<int> eff;
    for (int l : locs)
      if (std::find(eff.begin(), eff.end(), e_.lroot(l)) == eff.end()) eff.push_back(e_.lroot(l));
    int t;
    try {
      t = e_.s_func(dom, eff, body.type);
    } catch (const TypeClash& c) {
      throw Error(c.code, c.message, node.span);
    }
    resolve_scope();

    Names nm;
    detail::Namer n = namer(nm);
    std::vector<int> lroots, tvs;
    e_.free_locs(t, lroots);
    for (int r : lroots) n.loc(r);
    e_.free_tvars(t, tvs);
    for (int v : tvs) n.tvar(v);
    std::map<const Decl*, DeclInfo> dinfo;
    NodeElab el;
    el.chans = finish_scope(n, dinfo);
    el.scheme.body = e_.export_type(t, n);
    for (const auto& [_, name] : nm.tvars) el.scheme.tvars.push_back(name);
    std::sort(el.scheme.tvars.begin(), el.scheme.tvars.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::vector<std::string> lnames;
    for (int r : lroots) lnames.push_back(n.loc(r).name);
    el.scheme.lvars = lnames;
    std::set<Constraint> cs;
    for (const auto& c : s.constraints) {
      int a = e_.lroot(c.lhs), b = e_.lroot(c.rhs);
      bool generic = e_.loc_kind(a) != LocKind::Const || e_.loc_kind(b) != LocKind::Const;
      if (a != b && generic) cs.insert({n.loc(a), n.loc(b)});
    }
    el.scheme.constraints.assign(cs.begin(), cs.end());
    el.scheme.chans = el.chans;
    el.type = el.scheme.body;
    for (const auto& l : lnames) el.lvars.push_back(Location::var(l));
    for (const auto& [p, id] : s.lparams) el.loc_params[p] = n.loc(id);
    for (const auto& [x, v] : s.vars) el.vars[x] = e_.export_type(settle(v), n);
    export_scope(n, std::move(dinfo));
    schemes_[node.name] = el.scheme;
    out_.nodes[node.name] = std::move(el);
    sc_ = nullptr;
  }

  void infer_main() {
    Scope s;
    s.loc_start = e_.loc_count();
    sc_ = &s;
    check_definitions(p_.main);
    auto defined = defined_vars(p_.main);
    std::set<Ident> callees;
    collect_callees(p_.main, callees);
    for (const auto& x : input_vars(p_.main))
      if (!p_.find_node(x) && !callees.count(x)) s.vars[x] = fresh_data(e_.loc_flex());
    for (const auto& x : defined) s.vars[x] = e_.s_var();
    decls(p_.main);
    resolve_scope();
    Names nm;
    detail::Namer n = namer(nm);
    std::map<const Decl*, DeclInfo> dinfo;
    out_.main_chans = finish_scope(n, dinfo);
    for (const auto& [x, v] : s.vars) out_.main_vars[x] = e_.export_type(settle(v), n);
    export_scope(n, std::move(dinfo));
    sc_ = nullptr;
  }

  const Program& p_;
  Engine e_;
  ArchGraph g_;
  std::map<std::string, Scheme> ops_ = initial_env();
  std::map<Ident, Scheme> schemes_;
  std::set<Ident> failed_;
  std::vector<Diagnostic> diags_;
  Scope* sc_ = nullptr;
  ElaboratedProgram out_;
};

}  // namespace

ElaboratedProgram infer_program(const Program& p) { return Inferencer(p).run(); }

}  // namespace sdf
