#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdf/ast.hpp"

namespace sdf {

/// Architecture graph: declared locations and one-way communication links.
class ArchGraph {
 public:
  /// Locations in declaration order (resolution tie-breaks depend on it).
  const std::vector<std::string>& locations() const { return order_; }
  const std::set<std::pair<std::string, std::string>>& links() const { return links_; }

  bool has_location(const std::string& a) const { return locs_.count(a) != 0; }
  bool has_link(const std::string& from, const std::string& to) const { return links_.count({from, to}) != 0; }
  /// `from ~> to`: equal, or a declared link.
  bool reaches(const std::string& from, const std::string& to) const { return from == to || has_link(from, to); }
  bool empty() const { return order_.empty(); }

  void add_location(const std::string& a);
  void add_link(const std::string& from, const std::string& to);

 private:
  std::vector<std::string> order_;
  std::set<std::string> locs_;
  std::set<std::pair<std::string, std::string>> links_;
};

/// `lhs ~> rhs`: lhs and rhs are equal, or a link goes from lhs to rhs.
struct Constraint {
  Location lhs;
  Location rhs;
  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

using ConstraintSet = std::set<Constraint>;

/// Fold the declarations left to right from the empty graph. A link whose
/// endpoint is not declared yet raises ARCH001.
ArchGraph build_arch(const std::vector<ArchDecl>& decls);

/// True iff every non-reflexive constraint is a declared link. Raises ARCH002
/// when a constraint still mentions a location variable.
bool models(const ArchGraph& g, const ConstraintSet& c);

/// Unsatisfiable resolution; `witness` is a constraint that no extension of
/// the partial assignment reached at the failure point could satisfy.
struct ResolveFailure {
  Constraint witness;
};

struct ResolveResult {
  std::map<std::string, std::string> assignment;
  std::optional<ResolveFailure> failure;
  bool ok() const { return !failure.has_value(); }
};

/// Assign a constant to every location variable of `c` (and of `hints`) so
/// that the substituted set is modeled by `g`. Variables are taken in order
/// of first occurrence; each tries the constants of its already-assigned
/// partners first, then the declared locations in order. Backtracks, so a
/// solution is found whenever one exists.
ResolveResult resolve(const std::vector<Constraint>& c, const ArchGraph& g,
                      const std::map<std::string, std::string>& hints);

std::string to_string(const Constraint& c);

}  // namespace sdf
