#include "sdf/spatial_types.hpp"

#include <algorithm>

#include "sdf/diagnostics.hpp"
#include "types_engine.hpp"

namespace sdf {

LocalTypePtr local_base(BaseSort s) { return std::make_shared<const LocalType>(LocalType{LocalType::Base{s}}); }
LocalTypePtr local_var(std::string name) {
  return std::make_shared<const LocalType>(LocalType{LocalType::TVar{std::move(name)}});
}
LocalTypePtr local_func(LocalTypePtr a, LocalTypePtr b) {
  return std::make_shared<const LocalType>(LocalType{LocalType::Func{std::move(a), std::move(b)}});
}
LocalTypePtr local_prod(LocalTypePtr a, LocalTypePtr b) {
  return std::make_shared<const LocalType>(LocalType{LocalType::Prod{std::move(a), std::move(b)}});
}

TypePtr type_at(LocalTypePtr t, Location s) {
  if (auto* p = std::get_if<LocalType::Prod>(&t->node)) return type_prod(type_at(p->first, s), type_at(p->second, s));
  if (auto* f = std::get_if<LocalType::Func>(&t->node)) return type_func(type_at(f->dom, s), {s}, type_at(f->cod, s));
  return std::make_shared<const SpatialType>(SpatialType{SpatialType::At{std::move(t), std::move(s)}});
}
TypePtr type_prod(TypePtr a, TypePtr b) {
  return std::make_shared<const SpatialType>(SpatialType{SpatialType::Prod{std::move(a), std::move(b)}});
}
TypePtr type_func(TypePtr dom, std::vector<Location> eff, TypePtr cod) {
  return std::make_shared<const SpatialType>(SpatialType{SpatialType::Func{std::move(dom), std::move(eff), std::move(cod)}});
}

// ---- printing ----------------------------------------------------------------

namespace {

bool is_compound(const LocalTypePtr& t) { return !std::holds_alternative<LocalType::Base>(t->node) && !std::holds_alternative<LocalType::TVar>(t->node); }

std::string local_atom(const LocalTypePtr& t) { return is_compound(t) ? "(" + to_string(t) + ")" : to_string(t); }

std::string type_item(const TypePtr& t) {
  return std::holds_alternative<SpatialType::At>(t->node) ? to_string(t) : "(" + to_string(t) + ")";
}

std::string loc_list(const std::vector<Location>& ls) {
  std::string s;
  for (const auto& l : ls) s += (s.empty() ? "" : ",") + to_string(l);
  return s;
}

}  // namespace

std::string to_string(const LocalTypePtr& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LocalType::Base>) {
          return n.sort == BaseSort::Int ? "int" : "bool";
        } else if constexpr (std::is_same_v<T, LocalType::TVar>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, LocalType::Func>) {
          return local_atom(n.dom) + " -> " + to_string(n.cod);
        } else {
          return local_atom(n.first) + " * " + local_atom(n.second);
        }
      },
      t->node);
}

std::string to_string(const TypePtr& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpatialType::At>) {
          return local_atom(n.local) + "@" + to_string(n.loc);
        } else if constexpr (std::is_same_v<T, SpatialType::Prod>) {
          // right-nested products print flat
          std::string s = type_item(n.first);
          TypePtr rest = n.second;
          while (auto* p = std::get_if<SpatialType::Prod>(&rest->node)) {
            s += " * " + type_item(p->first);
            rest = p->second;
          }
          return s + " * " + type_item(rest);
        } else {
          return type_item(n.dom) + " -{" + loc_list(n.eff) + "}-> " + to_string(n.cod);
        }
      },
      t->node);
}

std::string to_string(const Scheme& s) {
  std::string out;
  if (!s.tvars.empty()) {
    out += "forall";
    for (const auto& v : s.tvars) out += " " + v;
    out += ". ";
  }
  if (!s.lvars.empty() || !s.constraints.empty()) {
    out += "forall";
    for (const auto& v : s.lvars) out += " " + v;
    if (!s.constraints.empty()) {
      out += " : {";
      for (size_t i = 0; i < s.constraints.size(); ++i)
        out += (i ? ", " : "") + to_string(s.constraints[i].lhs) + "~>" + to_string(s.constraints[i].rhs);
      out += "}";
    }
    out += ". ";
  }
  return out + to_string(s.body);
}

std::string to_string(const Channel& c) {
  return c.name + ": " + to_string(c.from) + " -> " + to_string(c.to) + " (" + to_string(c.payload) + ")";
}

std::vector<Location> locations(const TypePtr& t) {
  std::vector<Location> out;
  auto push = [&](const Location& l) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpatialType::At>) {
          push(n.loc);
        } else if constexpr (std::is_same_v<T, SpatialType::Prod>) {
          for (const auto& l : locations(n.first)) push(l);
          for (const auto& l : locations(n.second)) push(l);
        } else {
          for (const auto& l : n.eff) push(l);
        }
      },
      t->node);
  return out;
}

std::map<std::string, Scheme> initial_env() {
  auto d1 = Location::var("d1");
  auto binop = [&](LocalTypePtr arg, LocalTypePtr res, std::vector<std::string> tvars) {
    Scheme s;
    s.tvars = std::move(tvars);
    s.lvars = {"d1"};
    s.body = type_func(type_prod(type_at(arg, d1), type_at(arg, d1)), {d1}, type_at(res, d1));
    return s;
  };
  auto i = local_base(BaseSort::Int), b = local_base(BaseSort::Bool), a = local_var("'a");
  std::map<std::string, Scheme> env;
  env["fby"] = binop(a, a, {"'a"});
  for (auto op : {BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul}) env[to_string(op)] = binop(i, i, {});
  env[to_string(BinOpKind::Lt)] = binop(i, b, {});
  env[to_string(BinOpKind::Eq)] = binop(a, b, {"'a"});
  for (auto op : {BinOpKind::And, BinOpKind::Or}) env[to_string(op)] = binop(b, b, {});
  return env;
}

// ---- unification and instantiation -------------------------------------------

namespace {

detail::Namer plain_namer(detail::Engine& e) {
  return {[&e](int r) {
            return e.loc_kind(r) == detail::LocKind::Const ? Location::constant(e.loc_name(r))
                                                           : Location::var(e.loc_name(r));
          },
          [](int) { return std::string("'_"); }};
}

}  // namespace

Substitution unify(const TypePtr& a, const TypePtr& b) {
  detail::Engine e;
  std::map<std::string, int> tv, lv;
  int ia = e.import_type(a, tv, lv);
  int ib = e.import_type(b, tv, lv);
  try {
    e.unify(ia, ib);
  } catch (const detail::TypeClash& c) {
    throw Error(c.code, c.message);
  }
  std::map<int, std::string> tv_name;
  for (const auto& [name, id] : tv) tv_name[id] = name;
  detail::Namer n = plain_namer(e);
  n.tvar = [&](int id) {
    auto it = tv_name.find(id);
    return it != tv_name.end() ? it->second : "'_" + std::to_string(id);
  };
  Substitution s;
  for (const auto& [name, id] : tv) {
    auto t = e.export_local(id, n);
    auto* v = std::get_if<LocalType::TVar>(&t->node);
    if (!v || v->name != name) s.types[name] = t;
  }
  for (const auto& [name, id] : lv) {
    int r = e.lroot(id);
    if (r != id) s.locs[name] = n.loc(r);
  }
  return s;
}

Instance instantiate(const Scheme& s, const std::optional<Location>& at, int fresh) {
  detail::Engine e;
  std::map<std::string, int> tv, lv;
  std::map<int, std::string> tv_name;
  for (size_t k = 0; k < s.tvars.size(); ++k) {
    std::string name = "'t" + std::to_string(fresh + static_cast<int>(k));
    tv[s.tvars[k]] = e.l_var(name);
    tv_name[tv[s.tvars[k]]] = name;
  }
  for (size_t k = 0; k < s.lvars.size(); ++k) lv[s.lvars[k]] = e.loc_flex("d" + std::to_string(fresh + static_cast<int>(k)));
  int body = e.import_type(s.body, tv, lv);
  try {
    if (at) {
      auto ls = e.locations(body);
      int consts = 0;
      for (int l : ls) consts += e.loc_kind(l) == detail::LocKind::Const;
      if (consts > 1) throw detail::TypeClash{"TYPE004", "a node spanning several locations cannot be placed on " + to_string(*at)};
      std::map<std::string, int> none;
      e.unify(body, e.s_at(e.l_var(), e.import_loc(*at, none)));
    }
  } catch (const detail::TypeClash& c) {
    throw Error(c.code, c.message);
  }
  detail::Namer n = plain_namer(e);
  n.tvar = [&](int id) {
    auto it = tv_name.find(id);
    return it != tv_name.end() ? it->second : "'_" + std::to_string(id);
  };
  Instance inst;
  inst.type = e.export_type(body, n);
  auto loc = [&](const Location& l) { return n.loc(e.lroot(e.import_loc(l, lv))); };
  for (const auto& c : s.constraints) inst.constraints.push_back({loc(c.lhs), loc(c.rhs)});
  int k = fresh;
  for (const auto& c : s.chans) {
    Channel ch{"c$" + std::to_string(k++), loc(c.from), loc(c.to), e.export_local(e.import_local(c.payload, tv), n)};
    inst.chans.push_back(std::move(ch));
  }
  return inst;
}

}  // namespace sdf
