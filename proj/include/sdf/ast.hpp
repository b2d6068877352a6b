#pragma once

// Abstract syntax of the core language: architecture declarations, node
// definitions, equations and stream expressions.
//
// Expressions and declarations are immutable trees shared through
// `std::shared_ptr<const ...>`. Analyses that need per-occurrence facts key
// them by node address, so a tree must outlive any table built over it.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sdf/diagnostics.hpp"

namespace sdf {

using Ident = std::string;

/// Names containing this marker are generated by the compiler (channels,
/// per-location copies, inlined instances) and never clash with source names.
inline constexpr char kGeneratedMarker = '$';

bool is_generated(const Ident& name);

struct Location {
  enum class Kind { Const, Var };
  Kind kind = Kind::Const;
  std::string name;

  static Location constant(std::string n) { return {Kind::Const, std::move(n)}; }
  static Location var(std::string n) { return {Kind::Var, std::move(n)}; }
  bool is_const() const { return kind == Kind::Const; }
  bool is_var() const { return kind == Kind::Var; }

  friend auto operator<=>(const Location&, const Location&) = default;
};

/// The irrelevant value written `_abs_`: data that does not exist on the
/// location a projected program runs on.
struct AbsLiteral {
  friend bool operator==(AbsLiteral, AbsLiteral) { return true; }
};

using Literal = std::variant<std::int64_t, bool, AbsLiteral>;

enum class BinOpKind { Add, Sub, Mul, Eq, Lt, And, Or };

const char* to_string(BinOpKind op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct Imm { Literal value; };
  struct Var { Ident name; };
  struct Pair { ExprPtr first; ExprPtr second; };
  struct BinOp { BinOpKind op; ExprPtr lhs; ExprPtr rhs; };
  struct Fby { ExprPtr init; ExprPtr next; };
  struct At { ExprPtr body; Location loc; };

  std::variant<Imm, Var, Pair, BinOp, Fby, At> node;
  SourceSpan span;

  template <class T> const T* as() const { return std::get_if<T>(&node); }
  template <class T> bool is() const { return std::holds_alternative<T>(node); }
};

ExprPtr make_int(std::int64_t v, SourceSpan span = {});
ExprPtr make_bool(bool v, SourceSpan span = {});
ExprPtr make_abs(SourceSpan span = {});
ExprPtr make_var(Ident name, SourceSpan span = {});
ExprPtr make_pair(ExprPtr a, ExprPtr b, SourceSpan span = {});
ExprPtr make_binop(BinOpKind op, ExprPtr a, ExprPtr b, SourceSpan span = {});
ExprPtr make_fby(ExprPtr a, ExprPtr b, SourceSpan span = {});
ExprPtr make_at(ExprPtr e, Location loc, SourceSpan span = {});
/// Right-nested pair chain `(e1, (e2, (... en)))`; a single element is returned as is.
ExprPtr make_tuple(const std::vector<ExprPtr>& items);
bool is_abs(const ExprPtr& e);

struct Pattern {
  std::variant<Ident, std::vector<Pattern>> node;

  static Pattern single(Ident x) { return {std::move(x)}; }
  static Pattern tuple(std::vector<Pattern> items) { return {std::move(items)}; }
  bool is_single() const { return std::holds_alternative<Ident>(node); }
  const Ident& name() const { return std::get<Ident>(node); }
  const std::vector<Pattern>& items() const { return std::get<std::vector<Pattern>>(node); }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Variables bound by a pattern, left to right.
std::vector<Ident> pattern_vars(const Pattern& p);

struct Decl;
using DeclPtr = std::shared_ptr<const Decl>;

struct Decl {
  struct Eq { Pattern lhs; ExprPtr rhs; };
  /// `p = f(arg)`, optionally located as a whole: `p = f(arg) at s`.
  struct App { Pattern lhs; Ident callee; ExprPtr arg; std::optional<Location> at; };
  struct And { DeclPtr left; DeclPtr right; };
  struct If { ExprPtr cond; DeclPtr then_branch; DeclPtr else_branch; };
  struct Empty {};

  std::variant<Eq, App, And, If, Empty> node;
  SourceSpan span;

  template <class T> const T* as() const { return std::get_if<T>(&node); }
  template <class T> bool is() const { return std::holds_alternative<T>(node); }
};

DeclPtr make_eq(Pattern p, ExprPtr e, SourceSpan span = {});
DeclPtr make_app(Pattern p, Ident callee, ExprPtr arg, std::optional<Location> at = {}, SourceSpan span = {});
/// Conjunction with the empty declaration as identity on both sides.
DeclPtr make_and(DeclPtr a, DeclPtr b, SourceSpan span = {});
DeclPtr make_if(ExprPtr c, DeclPtr t, DeclPtr e, SourceSpan span = {});
DeclPtr make_empty();
DeclPtr make_conj(const std::vector<DeclPtr>& items);
bool is_empty(const DeclPtr& d);

/// Leaves of an `And` tree, left to right, with `Empty` dropped.
std::vector<DeclPtr> flatten_and(const DeclPtr& d);

struct NodeDef {
  Ident name;
  std::vector<Location> loc_params;  // all Location::Var
  Pattern input;
  ExprPtr body_expr;
  DeclPtr body_decls;
  SourceSpan span;
};

struct ArchDecl {
  struct Loc { std::string name; };
  struct Link { std::string from; std::string to; };
  std::variant<Loc, Link> node;
  SourceSpan span;
};

struct Program {
  std::vector<ArchDecl> arch;
  std::vector<NodeDef> nodes;
  DeclPtr main = make_empty();

  const NodeDef* find_node(const Ident& name) const;
};

// ---- queries -------------------------------------------------------------

std::set<Ident> free_vars(const ExprPtr& e);
/// Names read by a declaration, including applied node names; names the
/// declaration defines itself are not removed.
std::set<Ident> free_vars(const DeclPtr& d);
/// Variables defined by a declaration (both branches of an `if`).
std::set<Ident> defined_vars(const DeclPtr& d);
/// Free variables of a declaration minus the ones it defines.
std::set<Ident> input_vars(const DeclPtr& d);

/// Replace location variables by constants. Throws Error("UnboundLocationVar")
/// when the body mentions a variable outside the map's domain.
NodeDef subst_locations(const NodeDef& n, const std::map<std::string, Location>& m);
ExprPtr subst_locations(const ExprPtr& e, const std::map<std::string, Location>& m, bool strict);
DeclPtr subst_locations(const DeclPtr& d, const std::map<std::string, Location>& m, bool strict);

/// Rename variables (reads and definitions); callee names of applications are
/// renamed too when present in the map.
ExprPtr rename_vars(const ExprPtr& e, const std::map<Ident, Ident>& m);
DeclPtr rename_vars(const DeclPtr& d, const std::map<Ident, Ident>& m);
Pattern rename_vars(const Pattern& p, const std::map<Ident, Ident>& m);

/// Remove every `at` annotation.
ExprPtr erase_at(const ExprPtr& e);
DeclPtr erase_at(const DeclPtr& d);
Program erase_at(const Program& p);

// ---- structural equality (source spans ignored) --------------------------

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const DeclPtr& a, const DeclPtr& b);
bool equal(const NodeDef& a, const NodeDef& b);
bool equal(const Program& a, const Program& b);

// ---- printing ------------------------------------------------------------

std::string to_string(const Location& l);
std::string to_string(const Literal& l);
std::string to_string(const Pattern& p);
std::string to_string(const ExprPtr& e);
/// Declarations print one equation per line, each line prefixed by `indent`.
std::string to_string(const DeclPtr& d, const std::string& indent = "");
std::string to_string(const NodeDef& n);
std::string pretty_print(const Program& p);

}  // namespace sdf
