#include "types_engine.hpp"

#include <algorithm>
#include <set>

namespace sdf::detail {

// ---- locations ---------------------------------------------------------------

int Engine::loc_const(const std::string& name) {
  if (auto it = consts_.find(name); it != consts_.end()) return it->second;
  int id = static_cast<int>(locs_.size());
  locs_.push_back({id, LocKind::Const, name});
  consts_[name] = id;
  return id;
}

int Engine::loc_rigid(const std::string& name) {
  int id = static_cast<int>(locs_.size());
  locs_.push_back({id, LocKind::Rigid, name});
  return id;
}

int Engine::loc_flex(const std::string& name) {
  int id = static_cast<int>(locs_.size());
  locs_.push_back({id, LocKind::Flex, name.empty() ? "_" + std::to_string(id) : name});
  return id;
}

int Engine::lroot(int l) {
  while (locs_[l].parent != l) {
    locs_[l].parent = locs_[locs_[l].parent].parent;
    l = locs_[l].parent;
  }
  return l;
}

void Engine::unify_loc(int a, int b) {
  int ra = lroot(a), rb = lroot(b);
  if (ra == rb) return;
  if (locs_[rb].kind == LocKind::Flex) {
    locs_[rb].parent = ra;
  } else if (locs_[ra].kind == LocKind::Flex) {
    locs_[ra].parent = rb;
  } else {
    throw TypeClash{"TYPE001", "location " + locs_[ra].name + " does not match location " + locs_[rb].name};
  }
}

// ---- local types -------------------------------------------------------------

int Engine::l_base(BaseSort s) {
  LNode n;
  n.k = LNode::Base;
  n.sort = s;
  lt_.push_back(n);
  return static_cast<int>(lt_.size()) - 1;
}

int Engine::l_var(const std::string& name) {
  LNode n;
  n.k = LNode::Var;
  n.name = name;
  lt_.push_back(n);
  return static_cast<int>(lt_.size()) - 1;
}

int Engine::l_func(int a, int b) {
  LNode n;
  n.k = LNode::Func;
  n.a = a;
  n.b = b;
  lt_.push_back(n);
  return static_cast<int>(lt_.size()) - 1;
}

int Engine::l_prod(int a, int b) {
  LNode n;
  n.k = LNode::Prod;
  n.a = a;
  n.b = b;
  lt_.push_back(n);
  return static_cast<int>(lt_.size()) - 1;
}

int Engine::lfind(int t) {
  while (lt_[t].k == LNode::Var && lt_[t].bound >= 0) t = lt_[t].bound;
  return t;
}

bool Engine::l_occurs(int var, int t) {
  t = lfind(t);
  if (t == var) return true;
  if (lt_[t].k == LNode::Func || lt_[t].k == LNode::Prod) return l_occurs(var, lt_[t].a) || l_occurs(var, lt_[t].b);
  return false;
}

namespace {

Namer debug_namer(Engine& e) {
  return {[&e](int r) {
            return e.loc_kind(r) == LocKind::Const ? Location::constant(e.loc_name(r)) : Location::var(e.loc_name(r));
          },
          [](int v) { return "'t" + std::to_string(v); }};
}

}  // namespace

void Engine::unify_local(int a, int b) {
  a = lfind(a);
  b = lfind(b);
  if (a == b) return;
  auto clash = [&](const char* code, const std::string& what) {
    auto n = debug_namer(*this);
    return TypeClash{code, what + ": " + to_string(export_local(a, n)) + " vs " + to_string(export_local(b, n))};
  };
  if (lt_[a].k == LNode::Var) {
    if (l_occurs(a, b)) throw clash("TYPE003", "cyclic type");
    lt_[a].bound = b;
    return;
  }
  if (lt_[b].k == LNode::Var) {
    if (l_occurs(b, a)) throw clash("TYPE003", "cyclic type");
    lt_[b].bound = a;
    return;
  }
  if (lt_[a].k != lt_[b].k) throw clash("TYPE002", "type mismatch");
  if (lt_[a].k == LNode::Base) {
    if (lt_[a].sort != lt_[b].sort) throw clash("TYPE002", "type mismatch");
    return;
  }
  int a1 = lt_[a].a, a2 = lt_[a].b, b1 = lt_[b].a, b2 = lt_[b].b;
  unify_local(a1, b1);
  unify_local(a2, b2);
}

// ---- spatial types -----------------------------------------------------------

int Engine::s_at(int local, int loc) {
  SNode n;
  n.k = Shape::At;
  n.local = local;
  n.loc = loc;
  st_.push_back(n);
  return static_cast<int>(st_.size()) - 1;
}

int Engine::s_prod(int a, int b) {
  SNode n;
  n.k = Shape::Prod;
  n.a = a;
  n.b = b;
  st_.push_back(n);
  return static_cast<int>(st_.size()) - 1;
}

int Engine::s_func(int dom, std::vector<int> eff, int cod) {
  SNode n;
  n.k = Shape::Func;
  n.a = dom;
  n.b = cod;
  n.eff = std::move(eff);
  st_.push_back(std::move(n));
  return static_cast<int>(st_.size()) - 1;
}

int Engine::s_var() {
  SNode n;
  n.k = Shape::Var;
  st_.push_back(n);
  return static_cast<int>(st_.size()) - 1;
}

int Engine::sfind(int t) {
  while (st_[t].k == Shape::Var && st_[t].bound >= 0) t = st_[t].bound;
  return t;
}

Engine::Shape Engine::shape(int t) { return st_[t].k; }

int Engine::view(int t) {
  t = sfind(t);
  if (st_[t].k != Shape::At) return t;
  int l = lfind(st_[t].local), loc = st_[t].loc;
  if (lt_[l].k == LNode::Prod) {
    int a = lt_[l].a, b = lt_[l].b;
    return s_prod(s_at(a, loc), s_at(b, loc));
  }
  if (lt_[l].k == LNode::Func) {
    int a = lt_[l].a, b = lt_[l].b;
    return s_func(s_at(a, loc), {loc}, s_at(b, loc));
  }
  return t;
}

bool Engine::s_occurs(int var, int t) {
  t = sfind(t);
  if (t == var) return true;
  if (st_[t].k == Shape::Prod || st_[t].k == Shape::Func) return s_occurs(var, st_[t].a) || s_occurs(var, st_[t].b);
  return false;
}

bool Engine::local_occurs(int var, int t) {
  t = sfind(t);
  switch (st_[t].k) {
    case Shape::At: return l_occurs(var, st_[t].local);
    case Shape::Prod:
    case Shape::Func: return local_occurs(var, st_[t].a) || local_occurs(var, st_[t].b);
    case Shape::Var: break;
  }
  return false;
}

void Engine::unify_eff(const std::vector<int>& a, const std::vector<int>& b) {
  auto roots = [&](const std::vector<int>& v) {
    std::vector<int> out;
    for (int x : v) {
      int r = lroot(x);
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
    return out;
  };
  auto ra = roots(a), rb = roots(b);
  if (ra.size() == 1) {
    for (int x : rb) unify_loc(ra[0], x);
    return;
  }
  if (rb.size() == 1) {
    for (int x : ra) unify_loc(rb[0], x);
    return;
  }
  if (std::set<int>(ra.begin(), ra.end()) == std::set<int>(rb.begin(), rb.end())) return;
  if (ra.size() == rb.size()) {
    for (size_t i = 0; i < ra.size(); ++i) unify_loc(ra[i], rb[i]);
    return;
  }
  throw TypeClash{"TYPE001", "node effects span different numbers of locations"};
}

void Engine::unify(int a, int b) {
  a = sfind(a);
  b = sfind(b);
  if (a == b) return;
  if (st_[a].k == Shape::Var) {
    if (s_occurs(a, b)) throw TypeClash{"TYPE003", "cyclic type"};
    st_[a].bound = b;
    return;
  }
  if (st_[b].k == Shape::Var) {
    if (s_occurs(b, a)) throw TypeClash{"TYPE003", "cyclic type"};
    st_[b].bound = a;
    return;
  }
  a = view(a);
  b = view(b);
  Shape ka = st_[a].k, kb = st_[b].k;
  if (ka == Shape::At && kb == Shape::At) {
    int la = st_[a].local, lb = st_[b].local, sa = st_[a].loc, sb = st_[b].loc;
    unify_local(la, lb);
    unify_loc(sa, sb);
    return;
  }
  if (ka == kb && ka == Shape::Prod) {
    int a1 = st_[a].a, a2 = st_[a].b, b1 = st_[b].a, b2 = st_[b].b;
    unify(a1, b1);
    unify(a2, b2);
    return;
  }
  if (ka == kb && ka == Shape::Func) {
    int a1 = st_[a].a, a2 = st_[a].b, b1 = st_[b].a, b2 = st_[b].b;
    auto ea = st_[a].eff, eb = st_[b].eff;
    unify(a1, b1);
    unify_eff(ea, eb);
    unify(a2, b2);
    return;
  }
  // a located local type variable takes the shape of the other side
  auto expand = [&](int at_node, Shape other) {
    int l = st_[at_node].local;
    if (lt_[lfind(l)].k != LNode::Var) return false;
    if (local_occurs(lfind(l), at_node == a ? b : a)) throw TypeClash{"TYPE003", "cyclic type"};
    int fresh = other == Shape::Prod ? l_prod(l_var(), l_var()) : l_func(l_var(), l_var());
    unify_local(l, fresh);
    return true;
  };
  if (ka == Shape::At && (kb == Shape::Prod || kb == Shape::Func) && expand(a, kb)) return unify(a, b);
  if (kb == Shape::At && (ka == Shape::Prod || ka == Shape::Func) && expand(b, ka)) return unify(a, b);
  auto n = debug_namer(*this);
  throw TypeClash{"TYPE002", "type mismatch: " + to_string(export_type(a, n)) + " vs " + to_string(export_type(b, n))};
}

std::vector<int> Engine::locations(int t) {
  std::vector<int> out;
  std::function<void(int)> go = [&](int x) {
    x = view(x);
    auto push = [&](int l) {
      int r = lroot(l);
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    };
    switch (st_[x].k) {
      case Shape::At: push(st_[x].loc); break;
      case Shape::Prod: {
        int a = st_[x].a, b = st_[x].b;
        go(a);
        go(b);
        break;
      }
      case Shape::Func:
        for (int l : std::vector<int>(st_[x].eff)) push(l);
        break;
      case Shape::Var: break;
    }
  };
  go(t);
  return out;
}

bool Engine::has_func(int t) {
  t = view(t);
  if (st_[t].k == Shape::Func) return true;
  if (st_[t].k == Shape::Prod) {
    int a = st_[t].a, b = st_[t].b;
    return has_func(a) || has_func(b);
  }
  return false;
}

int Engine::copy_data(int t, std::vector<std::pair<int, int>>& pairs) {
  t = view(t);
  if (st_[t].k == Shape::At) {
    int r = lroot(st_[t].loc), local = st_[t].local;
    int fresh = -1;
    for (auto& [from, to] : pairs)
      if (from == r) fresh = to;
    if (fresh < 0) {
      fresh = loc_flex();
      pairs.push_back({r, fresh});
    }
    return s_at(local, fresh);
  }
  if (st_[t].k == Shape::Prod) {
    int a = st_[t].a, b = st_[t].b;
    int ca = copy_data(a, pairs);
    int cb = copy_data(b, pairs);
    return s_prod(ca, cb);
  }
  return t;
}

int Engine::local_of(int t) {
  t = view(t);
  switch (st_[t].k) {
    case Shape::At: return st_[t].local;
    case Shape::Prod: {
      int a = st_[t].a, b = st_[t].b;
      int la = local_of(a);
      return l_prod(la, local_of(b));
    }
    case Shape::Func: {
      int a = st_[t].a, b = st_[t].b;
      int la = local_of(a);
      return l_func(la, local_of(b));
    }
    case Shape::Var: return l_var();
  }
  return l_var();
}

// ---- conversion --------------------------------------------------------------

int Engine::import_local(const LocalTypePtr& t, std::map<std::string, int>& tv) {
  return std::visit(
      [&](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LocalType::Base>) {
          return l_base(n.sort);
        } else if constexpr (std::is_same_v<T, LocalType::TVar>) {
          auto it = tv.find(n.name);
          if (it != tv.end()) return it->second;
          int v = l_var(n.name);
          tv[n.name] = v;
          return v;
        } else if constexpr (std::is_same_v<T, LocalType::Func>) {
          int a = import_local(n.dom, tv);
          return l_func(a, import_local(n.cod, tv));
        } else {
          int a = import_local(n.first, tv);
          return l_prod(a, import_local(n.second, tv));
        }
      },
      t->node);
}

int Engine::import_loc(const Location& l, std::map<std::string, int>& lv) {
  if (l.is_const()) return loc_const(l.name);
  auto it = lv.find(l.name);
  if (it != lv.end()) return it->second;
  int v = loc_flex(l.name);
  lv[l.name] = v;
  return v;
}

int Engine::import_type(const TypePtr& t, std::map<std::string, int>& tv, std::map<std::string, int>& lv) {
  return std::visit(
      [&](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpatialType::At>) {
          int l = import_local(n.local, tv);
          return s_at(l, import_loc(n.loc, lv));
        } else if constexpr (std::is_same_v<T, SpatialType::Prod>) {
          int a = import_type(n.first, tv, lv);
          return s_prod(a, import_type(n.second, tv, lv));
        } else {
          int d = import_type(n.dom, tv, lv);
          std::vector<int> eff;
          for (const auto& l : n.eff) eff.push_back(import_loc(l, lv));
          return s_func(d, std::move(eff), import_type(n.cod, tv, lv));
        }
      },
      t->node);
}

LocalTypePtr Engine::export_local(int t, const Namer& n) {
  t = lfind(t);
  switch (lt_[t].k) {
    case LNode::Base: return local_base(lt_[t].sort);
    case LNode::Var: return local_var(n.tvar(t));
    case LNode::Func: return local_func(export_local(lt_[t].a, n), export_local(lt_[t].b, n));
    case LNode::Prod: return local_prod(export_local(lt_[t].a, n), export_local(lt_[t].b, n));
  }
  return local_var("'_");
}

std::vector<Location> Engine::export_locs(const std::vector<int>& roots, const Namer& n) {
  std::vector<Location> out;
  for (int r : roots) {
    Location l = n.loc(lroot(r));
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  auto rank = [&](const Location& l) {
    if (l.is_const()) {
      auto it = consts_.find(l.name);
      return std::make_pair(0, std::to_string(it == consts_.end() ? 0 : it->second + 100000));
    }
    return std::make_pair(1, l.name);
  };
  std::stable_sort(out.begin(), out.end(), [&](const Location& a, const Location& b) {
    auto ra = rank(a), rb = rank(b);
    if (ra.first != rb.first) return ra.first < rb.first;
    if (ra.first == 0) return std::stoi(ra.second) < std::stoi(rb.second);
    // d2 before d10
    if (ra.second.size() != rb.second.size()) return ra.second.size() < rb.second.size();
    return ra.second < rb.second;
  });
  return out;
}

TypePtr Engine::export_type(int t, const Namer& n) {
  t = view(t);
  switch (st_[t].k) {
    case Shape::At: return type_at(export_local(st_[t].local, n), n.loc(lroot(st_[t].loc)));
    case Shape::Prod: {
      int a = st_[t].a, b = st_[t].b;
      auto ea = export_type(a, n);
      return type_prod(ea, export_type(b, n));
    }
    case Shape::Func: {
      int a = st_[t].a, b = st_[t].b;
      auto eff = st_[t].eff;
      auto ea = export_type(a, n);
      auto eb = export_type(b, n);
      return type_func(ea, export_locs(eff, n), eb);
    }
    case Shape::Var: break;
  }
  return type_at(local_var("'_"), Location::var("_"));
}

void Engine::free_tvars_local(int l, std::vector<int>& out) {
  l = lfind(l);
  if (lt_[l].k == LNode::Var) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  } else if (lt_[l].k == LNode::Func || lt_[l].k == LNode::Prod) {
    int a = lt_[l].a, b = lt_[l].b;
    free_tvars_local(a, out);
    free_tvars_local(b, out);
  }
}

void Engine::free_tvars(int t, std::vector<int>& out) {
  t = view(t);
  switch (st_[t].k) {
    case Shape::At: free_tvars_local(st_[t].local, out); break;
    case Shape::Prod:
    case Shape::Func: {
      int a = st_[t].a, b = st_[t].b;
      free_tvars(a, out);
      free_tvars(b, out);
      break;
    }
    case Shape::Var: break;
  }
}

void Engine::free_locs(int t, std::vector<int>& out) {
  auto push = [&](int l) {
    int r = lroot(l);
    if (locs_[r].kind != LocKind::Const && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  t = view(t);
  switch (st_[t].k) {
    case Shape::At: push(st_[t].loc); break;
    case Shape::Prod: {
      int a = st_[t].a, b = st_[t].b;
      free_locs(a, out);
      free_locs(b, out);
      break;
    }
    case Shape::Func: {
      int a = st_[t].a, b = st_[t].b;
      auto eff = st_[t].eff;
      free_locs(a, out);
      free_locs(b, out);
      for (int l : eff) push(l);
      break;
    }
    case Shape::Var: break;
  }
}

}  // namespace sdf::detail
