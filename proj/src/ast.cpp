#include "sdf/ast.hpp"

#include <sstream>

namespace sdf {

bool is_generated(const Ident& name) { return name.find(kGeneratedMarker) != Ident::npos; }

const char* to_string(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Eq: return "=";
    case BinOpKind::Lt: return "<";
    case BinOpKind::And: return "and";
    case BinOpKind::Or: return "or";
  }
  return "?";
}

namespace {

ExprPtr mk(Expr::Imm n, SourceSpan s) { return std::make_shared<const Expr>(Expr{std::move(n), s}); }

template <class T>
ExprPtr mk_expr(T n, SourceSpan s) {
  return std::make_shared<const Expr>(Expr{std::move(n), s});
}

template <class T>
DeclPtr mk_decl(T n, SourceSpan s) {
  return std::make_shared<const Decl>(Decl{std::move(n), s});
}

}  // namespace

ExprPtr make_int(std::int64_t v, SourceSpan span) { return mk(Expr::Imm{Literal{v}}, span); }
ExprPtr make_bool(bool v, SourceSpan span) { return mk(Expr::Imm{Literal{v}}, span); }
ExprPtr make_abs(SourceSpan span) { return mk(Expr::Imm{Literal{AbsLiteral{}}}, span); }
ExprPtr make_var(Ident name, SourceSpan span) { return mk_expr(Expr::Var{std::move(name)}, span); }
ExprPtr make_pair(ExprPtr a, ExprPtr b, SourceSpan span) {
  return mk_expr(Expr::Pair{std::move(a), std::move(b)}, span);
}
ExprPtr make_binop(BinOpKind op, ExprPtr a, ExprPtr b, SourceSpan span) {
  return mk_expr(Expr::BinOp{op, std::move(a), std::move(b)}, span);
}
ExprPtr make_fby(ExprPtr a, ExprPtr b, SourceSpan span) {
  return mk_expr(Expr::Fby{std::move(a), std::move(b)}, span);
}
ExprPtr make_at(ExprPtr e, Location loc, SourceSpan span) {
  return mk_expr(Expr::At{std::move(e), std::move(loc)}, span);
}

ExprPtr make_tuple(const std::vector<ExprPtr>& items) {
  if (items.empty()) return make_abs();
  ExprPtr acc = items.back();
  for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = make_pair(*it, acc);
  return acc;
}

bool is_abs(const ExprPtr& e) {
  const auto* imm = e->as<Expr::Imm>();
  return imm && std::holds_alternative<AbsLiteral>(imm->value);
}

std::vector<Ident> pattern_vars(const Pattern& p) {
  std::vector<Ident> out;
  if (p.is_single()) {
    out.push_back(p.name());
  } else {
    for (const auto& item : p.items()) {
      auto sub = pattern_vars(item);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

DeclPtr make_eq(Pattern p, ExprPtr e, SourceSpan span) { return mk_decl(Decl::Eq{std::move(p), std::move(e)}, span); }
DeclPtr make_app(Pattern p, Ident callee, ExprPtr arg, std::optional<Location> at, SourceSpan span) {
  return mk_decl(Decl::App{std::move(p), std::move(callee), std::move(arg), std::move(at)}, span);
}
DeclPtr make_and(DeclPtr a, DeclPtr b, SourceSpan span) {
  if (is_empty(a)) return b;
  if (is_empty(b)) return a;
  return mk_decl(Decl::And{std::move(a), std::move(b)}, span);
}
DeclPtr make_if(ExprPtr c, DeclPtr t, DeclPtr e, SourceSpan span) {
  return mk_decl(Decl::If{std::move(c), std::move(t), std::move(e)}, span);
}
DeclPtr make_empty() {
  static const DeclPtr empty = mk_decl(Decl::Empty{}, {});
  return empty;
}
DeclPtr make_conj(const std::vector<DeclPtr>& items) {
  DeclPtr acc = make_empty();
  for (auto it = items.rbegin(); it != items.rend(); ++it) acc = make_and(*it, acc);
  return acc;
}
bool is_empty(const DeclPtr& d) { return !d || d->is<Decl::Empty>(); }

std::vector<DeclPtr> flatten_and(const DeclPtr& d) {
  std::vector<DeclPtr> out;
  if (is_empty(d)) return out;
  if (const auto* a = d->as<Decl::And>()) {
    auto l = flatten_and(a->left);
    auto r = flatten_and(a->right);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
  } else {
    out.push_back(d);
  }
  return out;
}

const NodeDef* Program::find_node(const Ident& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return &n;
  return nullptr;
}

// ---- queries -------------------------------------------------------------

namespace {

void collect_free(const ExprPtr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Var>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          collect_free(n.first, out);
          collect_free(n.second, out);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          collect_free(n.lhs, out);
          collect_free(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          collect_free(n.init, out);
          collect_free(n.next, out);
        } else if constexpr (std::is_same_v<T, Expr::At>) {
          collect_free(n.body, out);
        }
      },
      e->node);
}

void collect_free(const DeclPtr& d, std::set<Ident>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          collect_free(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          out.insert(n.callee);
          collect_free(n.arg, out);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          collect_free(n.left, out);
          collect_free(n.right, out);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          collect_free(n.cond, out);
          collect_free(n.then_branch, out);
          collect_free(n.else_branch, out);
        }
      },
      d->node);
}

void collect_defined(const DeclPtr& d, std::set<Ident>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq> || std::is_same_v<T, Decl::App>) {
          for (auto& v : pattern_vars(n.lhs)) out.insert(v);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          collect_defined(n.left, out);
          collect_defined(n.right, out);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          collect_defined(n.then_branch, out);
          collect_defined(n.else_branch, out);
        }
      },
      d->node);
}

Location subst_loc(const Location& l, const std::map<std::string, Location>& m, bool strict) {
  if (!l.is_var()) return l;
  auto it = m.find(l.name);
  if (it != m.end()) return it->second;
  if (strict) throw Error("UnboundLocationVar", "location variable '" + l.name + "' is not mapped");
  return l;
}

}  // namespace

std::set<Ident> free_vars(const ExprPtr& e) {
  std::set<Ident> out;
  collect_free(e, out);
  return out;
}

std::set<Ident> free_vars(const DeclPtr& d) {
  std::set<Ident> out;
  collect_free(d, out);
  return out;
}

std::set<Ident> defined_vars(const DeclPtr& d) {
  std::set<Ident> out;
  collect_defined(d, out);
  return out;
}

std::set<Ident> input_vars(const DeclPtr& d) {
  auto fv = free_vars(d);
  for (const auto& v : defined_vars(d)) fv.erase(v);
  return fv;
}

ExprPtr subst_locations(const ExprPtr& e, const std::map<std::string, Location>& m, bool strict) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Pair>) {
          return make_pair(subst_locations(n.first, m, strict), subst_locations(n.second, m, strict), e->span);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          return make_binop(n.op, subst_locations(n.lhs, m, strict), subst_locations(n.rhs, m, strict), e->span);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return make_fby(subst_locations(n.init, m, strict), subst_locations(n.next, m, strict), e->span);
        } else if constexpr (std::is_same_v<T, Expr::At>) {
          return make_at(subst_locations(n.body, m, strict), subst_loc(n.loc, m, strict), e->span);
        } else {
          return e;
        }
      },
      e->node);
}

DeclPtr subst_locations(const DeclPtr& d, const std::map<std::string, Location>& m, bool strict) {
  return std::visit(
      [&](const auto& n) -> DeclPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          return make_eq(n.lhs, subst_locations(n.rhs, m, strict), d->span);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          std::optional<Location> at;
          if (n.at) at = subst_loc(*n.at, m, strict);
          return make_app(n.lhs, n.callee, subst_locations(n.arg, m, strict), at, d->span);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          return make_and(subst_locations(n.left, m, strict), subst_locations(n.right, m, strict), d->span);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          return make_if(subst_locations(n.cond, m, strict), subst_locations(n.then_branch, m, strict),
                         subst_locations(n.else_branch, m, strict), d->span);
        } else {
          return d;
        }
      },
      d->node);
}

NodeDef subst_locations(const NodeDef& n, const std::map<std::string, Location>& m) {
  NodeDef out = n;
  out.loc_params.clear();
  out.body_expr = subst_locations(n.body_expr, m, true);
  out.body_decls = subst_locations(n.body_decls, m, true);
  return out;
}

Pattern rename_vars(const Pattern& p, const std::map<Ident, Ident>& m) {
  if (p.is_single()) {
    auto it = m.find(p.name());
    return Pattern::single(it == m.end() ? p.name() : it->second);
  }
  std::vector<Pattern> items;
  for (const auto& i : p.items()) items.push_back(rename_vars(i, m));
  return Pattern::tuple(std::move(items));
}

ExprPtr rename_vars(const ExprPtr& e, const std::map<Ident, Ident>& m) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Var>) {
          auto it = m.find(n.name);
          return it == m.end() ? e : make_var(it->second, e->span);
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          return make_pair(rename_vars(n.first, m), rename_vars(n.second, m), e->span);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          return make_binop(n.op, rename_vars(n.lhs, m), rename_vars(n.rhs, m), e->span);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return make_fby(rename_vars(n.init, m), rename_vars(n.next, m), e->span);
        } else if constexpr (std::is_same_v<T, Expr::At>) {
          return make_at(rename_vars(n.body, m), n.loc, e->span);
        } else {
          return e;
        }
      },
      e->node);
}

DeclPtr rename_vars(const DeclPtr& d, const std::map<Ident, Ident>& m) {
  return std::visit(
      [&](const auto& n) -> DeclPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          return make_eq(rename_vars(n.lhs, m), rename_vars(n.rhs, m), d->span);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          auto it = m.find(n.callee);
          return make_app(rename_vars(n.lhs, m), it == m.end() ? n.callee : it->second, rename_vars(n.arg, m), n.at,
                          d->span);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          return make_and(rename_vars(n.left, m), rename_vars(n.right, m), d->span);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          return make_if(rename_vars(n.cond, m), rename_vars(n.then_branch, m), rename_vars(n.else_branch, m), d->span);
        } else {
          return d;
        }
      },
      d->node);
}

ExprPtr erase_at(const ExprPtr& e) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Pair>) {
          return make_pair(erase_at(n.first), erase_at(n.second), e->span);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          return make_binop(n.op, erase_at(n.lhs), erase_at(n.rhs), e->span);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return make_fby(erase_at(n.init), erase_at(n.next), e->span);
        } else if constexpr (std::is_same_v<T, Expr::At>) {
          return erase_at(n.body);
        } else {
          return e;
        }
      },
      e->node);
}

DeclPtr erase_at(const DeclPtr& d) {
  return std::visit(
      [&](const auto& n) -> DeclPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          return make_eq(n.lhs, erase_at(n.rhs), d->span);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          return make_app(n.lhs, n.callee, erase_at(n.arg), std::nullopt, d->span);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          return make_and(erase_at(n.left), erase_at(n.right), d->span);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          return make_if(erase_at(n.cond), erase_at(n.then_branch), erase_at(n.else_branch), d->span);
        } else {
          return d;
        }
      },
      d->node);
}

Program erase_at(const Program& p) {
  Program out = p;
  for (auto& n : out.nodes) {
    n.body_expr = erase_at(n.body_expr);
    n.body_decls = erase_at(n.body_decls);
  }
  out.main = erase_at(p.main);
  return out;
}

// ---- structural equality -------------------------------------------------

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Expr::Imm>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          return equal(x.first, y.first) && equal(x.second, y.second);
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          return equal(x.init, y.init) && equal(x.next, y.next);
        } else {
          return x.loc == y.loc && equal(x.body, y.body);
        }
      },
      a->node);
}

bool equal(const DeclPtr& a, const DeclPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          return x.lhs == y.lhs && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          return x.lhs == y.lhs && x.callee == y.callee && x.at == y.at && equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          return equal(x.left, y.left) && equal(x.right, y.right);
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          return equal(x.cond, y.cond) && equal(x.then_branch, y.then_branch) &&
                 equal(x.else_branch, y.else_branch);
        } else {
          return true;
        }
      },
      a->node);
}

bool equal(const NodeDef& a, const NodeDef& b) {
  return a.name == b.name && a.loc_params == b.loc_params && a.input == b.input && equal(a.body_expr, b.body_expr) &&
         equal(a.body_decls, b.body_decls);
}

bool equal(const Program& a, const Program& b) {
  if (a.arch.size() != b.arch.size() || a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.arch.size(); ++i) {
    const auto& x = a.arch[i].node;
    const auto& y = b.arch[i].node;
    if (x.index() != y.index()) return false;
    if (const auto* l = std::get_if<ArchDecl::Loc>(&x)) {
      if (l->name != std::get<ArchDecl::Loc>(y).name) return false;
    } else {
      const auto& lx = std::get<ArchDecl::Link>(x);
      const auto& ly = std::get<ArchDecl::Link>(y);
      if (lx.from != ly.from || lx.to != ly.to) return false;
    }
  }
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (!equal(a.nodes[i], b.nodes[i])) return false;
  return equal(a.main, b.main);
}

// ---- printing ------------------------------------------------------------

std::string to_string(const Location& l) { return l.name; }

std::string to_string(const Literal& l) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return "_abs_";
        }
      },
      l);
}

std::string to_string(const Pattern& p) {
  if (p.is_single()) return p.name();
  std::string out = "(";
  for (std::size_t i = 0; i < p.items().size(); ++i) {
    if (i) out += ", ";
    out += to_string(p.items()[i]);
  }
  return out + ")";
}

namespace {

// Binding strength, loosest first.
enum Prec { kAt = 0, kFby = 1, kOr = 2, kAnd = 3, kCmp = 4, kAdd = 5, kMul = 6, kAtom = 7 };

int prec_of(BinOpKind op) {
  switch (op) {
    case BinOpKind::Or: return kOr;
    case BinOpKind::And: return kAnd;
    case BinOpKind::Eq:
    case BinOpKind::Lt: return kCmp;
    case BinOpKind::Add:
    case BinOpKind::Sub: return kAdd;
    case BinOpKind::Mul: return kMul;
  }
  return kAtom;
}

void print_expr(std::ostream& os, const ExprPtr& e, int ctx);

void print_tuple_items(std::ostream& os, const ExprPtr& e) {
  const auto* p = e->as<Expr::Pair>();
  print_expr(os, p->first, kAt);
  os << ", ";
  if (p->second->is<Expr::Pair>())
    print_tuple_items(os, p->second);
  else
    print_expr(os, p->second, kAt);
}

void print_expr(std::ostream& os, const ExprPtr& e, int ctx) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Imm>) {
          os << to_string(n.value);
        } else if constexpr (std::is_same_v<T, Expr::Var>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, Expr::Pair>) {
          os << '(';
          print_tuple_items(os, e);
          os << ')';
        } else if constexpr (std::is_same_v<T, Expr::BinOp>) {
          const int p = prec_of(n.op);
          // and/or are always bracketed so they never read as declaration separators.
          const bool logical = n.op == BinOpKind::And || n.op == BinOpKind::Or;
          const bool paren = logical || p < ctx;
          if (paren) os << '(';
          print_expr(os, n.lhs, p);
          os << ' ' << to_string(n.op) << ' ';
          print_expr(os, n.rhs, p + 1);
          if (paren) os << ')';
        } else if constexpr (std::is_same_v<T, Expr::Fby>) {
          const bool paren = kFby < ctx;
          if (paren) os << '(';
          print_expr(os, n.init, kFby + 1);
          os << " fby ";
          print_expr(os, n.next, kFby);
          if (paren) os << ')';
        } else {
          const bool paren = kAt < ctx;
          if (paren) os << '(';
          print_expr(os, n.body, kFby);
          os << " at " << n.loc.name;
          if (paren) os << ')';
        }
      },
      e->node);
}

void print_args(std::ostream& os, const ExprPtr& arg) {
  if (arg->is<Expr::Pair>())
    print_tuple_items(os, arg);
  else
    print_expr(os, arg, kAt);
}

void print_decl(std::ostream& os, const DeclPtr& d, const std::string& indent, bool inline_mode);

void print_branch(std::ostream& os, const DeclPtr& d) {
  if (d->is<Decl::Eq>() || d->is<Decl::App>()) {
    print_decl(os, d, "", true);
  } else {
    os << '(';
    print_decl(os, d, "", true);
    os << ')';
  }
}

void print_decl(std::ostream& os, const DeclPtr& d, const std::string& indent, bool inline_mode) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Decl::Eq>) {
          os << to_string(n.lhs) << " = ";
          print_expr(os, n.rhs, kAt);
        } else if constexpr (std::is_same_v<T, Decl::App>) {
          os << to_string(n.lhs) << " = " << n.callee << '(';
          print_args(os, n.arg);
          os << ')';
          if (n.at) os << " at " << n.at->name;
        } else if constexpr (std::is_same_v<T, Decl::And>) {
          auto items = flatten_and(d);
          for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) os << (inline_mode ? " and " : "\n" + indent + "and ");
            print_decl(os, items[i], indent + "    ", inline_mode);
          }
        } else if constexpr (std::is_same_v<T, Decl::If>) {
          os << "if ";
          print_expr(os, n.cond, kAt);
          os << " then ";
          print_branch(os, n.then_branch);
          os << " else ";
          print_branch(os, n.else_branch);
        }
      },
      d->node);
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, kAt);
  return os.str();
}

std::string to_string(const DeclPtr& d, const std::string& indent) {
  std::ostringstream os;
  if (is_empty(d)) return "";
  os << indent;
  print_decl(os, d, indent, false);
  return os.str();
}

std::string to_string(const NodeDef& n) {
  std::ostringstream os;
  os << "node " << n.name;
  if (!n.loc_params.empty()) {
    os << " [";
    for (std::size_t i = 0; i < n.loc_params.size(); ++i) os << (i ? ", " : "") << n.loc_params[i].name;
    os << "] ";
  }
  if (n.input.is_single())
    os << '(' << n.input.name() << ')';
  else
    os << to_string(n.input);
  os << " = ";
  print_expr(os, n.body_expr, kAt);
  if (!is_empty(n.body_decls)) {
    os << " with\n    ";
    print_decl(os, n.body_decls, "", false);
  }
  os << ';';
  return os.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& a : p.arch) {
    if (const auto* l = std::get_if<ArchDecl::Loc>(&a.node))
      os << "loc " << l->name << ";\n";
    else {
      const auto& k = std::get<ArchDecl::Link>(a.node);
      os << "link " << k.from << " to " << k.to << ";\n";
    }
  }
  for (const auto& n : p.nodes) {
    if (os.tellp() > 0) os << '\n';
    os << to_string(n) << '\n';
  }
  if (!is_empty(p.main)) {
    if (os.tellp() > 0) os << '\n';
    os << to_string(p.main) << ";\n";
  }
  return os.str();
}

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::ostringstream os;
  os << file << ':' << d.span.line << ':' << d.span.column << ": " << d.code << ": " << d.message;
  return os.str();
}

}  // namespace sdf
