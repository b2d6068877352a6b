#pragma once

// Mutable unification engine behind spatial type inference. Location and
// type variables live in union-find arenas addressed by integer ids; public
// immutable types are imported into and exported from it.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sdf/spatial_types.hpp"

namespace sdf::detail {

/// Unification failure without source position; inference attaches one.
struct TypeClash {
  std::string code;
  std::string message;
};

enum class LocKind { Const, Rigid, Flex };

struct Namer {
  std::function<Location(int root)> loc;
  std::function<std::string(int tvar)> tvar;
};

class Engine {
 public:
  // ---- locations
  int loc_const(const std::string& name);
  int loc_rigid(const std::string& name);
  int loc_flex(const std::string& name = "");
  int lroot(int l);
  LocKind loc_kind(int l) { return locs_[lroot(l)].kind; }
  const std::string& loc_name(int l) { return locs_[lroot(l)].name; }
  int loc_count() const { return static_cast<int>(locs_.size()); }
  void unify_loc(int a, int b);

  // ---- local types
  int l_base(BaseSort s);
  int l_var(const std::string& name = "");
  int l_func(int a, int b);
  int l_prod(int a, int b);
  int lfind(int t);
  void unify_local(int a, int b);

  // ---- spatial types
  int s_at(int local, int loc);
  int s_prod(int a, int b);
  int s_func(int dom, std::vector<int> eff, int cod);
  int s_var();
  int sfind(int t);
  /// Representative with located products and local functions expanded.
  int view(int t);
  void unify(int a, int b);

  enum class Shape { Func, Prod, At, Var };
  Shape shape(int t);
  int at_local(int t) { return st_[t].local; }
  int at_loc(int t) { return st_[t].loc; }
  int first(int t) { return st_[t].a; }
  int second(int t) { return st_[t].b; }
  const std::vector<int>& eff(int t) { return st_[t].eff; }

  /// Location roots occupied by a value of type `t`, without duplicates.
  std::vector<int> locations(int t);
  bool has_func(int t);
  /// Same data type with every location replaced by a fresh flexible one;
  /// `pairs` receives (original root, fresh) for each distinct location.
  int copy_data(int t, std::vector<std::pair<int, int>>& pairs);
  /// Local type carried by a data value (products of the components).
  int local_of(int t);

  // ---- conversion
  int import_local(const LocalTypePtr& t, std::map<std::string, int>& tv);
  int import_loc(const Location& l, std::map<std::string, int>& lv);
  int import_type(const TypePtr& t, std::map<std::string, int>& tv, std::map<std::string, int>& lv);
  LocalTypePtr export_local(int t, const Namer& n);
  TypePtr export_type(int t, const Namer& n);
  /// Unbound type variables of `t` in first-occurrence order.
  void free_tvars(int t, std::vector<int>& out);
  void free_tvars_local(int l, std::vector<int>& out);
  /// Non-constant location roots of `t` in first-occurrence order.
  void free_locs(int t, std::vector<int>& out);

  /// Sort key placing constants in creation order before variables.
  std::vector<Location> export_locs(const std::vector<int>& roots, const Namer& n);

 private:
  struct LocVar {
    int parent;
    LocKind kind;
    std::string name;
  };
  struct LNode {
    enum K { Base, Var, Func, Prod } k;
    BaseSort sort = BaseSort::Int;
    int a = -1, b = -1;
    int bound = -1;
    std::string name;
  };
  struct SNode {
    Shape k;
    int a = -1, b = -1;
    std::vector<int> eff;
    int local = -1, loc = -1;
    int bound = -1;
  };

  bool l_occurs(int var, int t);
  bool s_occurs(int var, int t);
  bool local_occurs(int var, int t);
  void unify_eff(const std::vector<int>& a, const std::vector<int>& b);

  std::vector<LocVar> locs_;
  std::map<std::string, int> consts_;
  std::vector<LNode> lt_;
  std::vector<SNode> st_;
};

}  // namespace sdf::detail
