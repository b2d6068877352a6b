#include "sdf/arch.hpp"

#include <functional>

namespace sdf {

void ArchGraph::add_location(const std::string& a) {
  if (locs_.insert(a).second) order_.push_back(a);
}

void ArchGraph::add_link(const std::string& from, const std::string& to) { links_.insert({from, to}); }

ArchGraph build_arch(const std::vector<ArchDecl>& decls) {
  ArchGraph g;
  for (const auto& d : decls) {
    if (auto* l = std::get_if<ArchDecl::Loc>(&d.node)) {
      g.add_location(l->name);
      continue;
    }
    const auto& k = std::get<ArchDecl::Link>(d.node);
    for (const auto* end : {&k.from, &k.to}) {
      if (!g.has_location(*end))
        throw Error("ARCH001", "link endpoint '" + *end + "' is not a declared location", d.span);
    }
    g.add_link(k.from, k.to);
  }
  return g;
}

bool models(const ArchGraph& g, const ConstraintSet& c) {
  bool ok = true;
  for (const auto& k : c) {
    if (k.lhs.is_var() || k.rhs.is_var())
      throw Error("ARCH002", "constraint " + to_string(k) + " mentions an unresolved location variable");
    if (!g.reaches(k.lhs.name, k.rhs.name)) ok = false;
  }
  return ok;
}

std::string to_string(const Constraint& c) { return to_string(c.lhs) + " ~> " + to_string(c.rhs); }

namespace {

struct Solver {
  const std::vector<Constraint>& cs;
  const ArchGraph& g;
  std::vector<std::string> vars;  // first-occurrence order
  std::map<std::string, std::string> asg;
  std::optional<Constraint> deepest;
  size_t deepest_level = 0;

  std::optional<std::string> value(const Location& l) const {
    if (l.is_const()) return l.name;
    auto it = asg.find(l.name);
    if (it == asg.end()) return std::nullopt;
    return it->second;
  }

  // First constraint whose both ends are known and not linked.
  const Constraint* violated() const {
    for (const auto& k : cs) {
      auto a = value(k.lhs), b = value(k.rhs);
      if (a && b && !g.reaches(*a, *b)) return &k;
    }
    return nullptr;
  }

  std::vector<std::string> candidates(const std::string& v) const {
    std::vector<std::string> out;
    auto push = [&](const std::string& s) {
      for (const auto& o : out)
        if (o == s) return;
      out.push_back(s);
    };
    for (const auto& k : cs) {
      if (k.lhs.is_var() && k.lhs.name == v) {
        if (auto b = value(k.rhs); b && !(k.rhs.is_var() && k.rhs.name == v)) push(*b);
      } else if (k.rhs.is_var() && k.rhs.name == v) {
        if (auto a = value(k.lhs)) push(*a);
      }
    }
    for (const auto& s : g.locations()) push(s);
    return out;
  }

  bool search(size_t i) {
    if (const Constraint* bad = violated()) {
      if (!deepest || i >= deepest_level) {
        deepest = *bad;
        deepest_level = i;
      }
      return false;
    }
    if (i == vars.size()) return true;
    const auto& v = vars[i];
    if (asg.count(v)) return search(i + 1);
    for (const auto& s : candidates(v)) {
      asg[v] = s;
      if (search(i + 1)) return true;
    }
    asg.erase(v);
    return false;
  }
};

}  // namespace

ResolveResult resolve(const std::vector<Constraint>& c, const ArchGraph& g,
                      const std::map<std::string, std::string>& hints) {
  Solver s{c, g, {}, hints, std::nullopt, 0};
  std::set<std::string> seen;
  auto note = [&](const Location& l) {
    if (l.is_var() && seen.insert(l.name).second) s.vars.push_back(l.name);
  };
  for (const auto& k : c) {
    note(k.lhs);
    note(k.rhs);
  }
  ResolveResult r;
  if (!g.empty() && s.search(0)) {
    r.assignment = std::move(s.asg);
    return r;
  }
  r.assignment = hints;
  r.failure = ResolveFailure{s.deepest.value_or(c.empty() ? Constraint{} : c.front())};
  return r;
}

}  // namespace sdf
