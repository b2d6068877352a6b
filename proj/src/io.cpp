#include "sdf/io.hpp"

#include <random>

#include "sdf/diagnostics.hpp"

namespace sdf {

using nlohmann::json;

json to_json(const Value& v) {
  if (v.is_int()) return v.as_int();
  if (v.is_bool()) return v.as_bool();
  if (v.is_abs()) return nullptr;
  if (v.is_pair()) return json::array({to_json(v.first()), to_json(v.second())});
  return "<node " + v.node()->name + ">";
}

Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_null()) return Value::abs();
  if (j.is_array() && j.size() >= 2) {
    Value v = value_from_json(j.back());
    for (size_t i = j.size() - 1; i-- > 0;) v = Value::pair(value_from_json(j[i]), v);
    return v;
  }
  throw Error("IO001", "not a stream value: " + j.dump());
}

json to_json(const ReactionEnv& r) {
  json o = json::object();
  for (const auto& [x, v] : r) o[x] = to_json(v);
  return o;
}

json to_json(const DistValue& v) {
  if (v.is_pair()) return json::array({to_json(v.first()), to_json(v.second())});
  if (v.is_node()) return "<node " + v.node_def()->name + ">";
  const auto& l = v.as_located();
  return {{"value", to_json(l.value)}, {"at", l.at.name}};
}

Trace read_jsonl(std::istream& in) {
  Trace t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error("IO001", "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) throw Error("IO001", "line " + std::to_string(lineno) + ": expected an object");
    ReactionEnv r;
    for (const auto& [k, v] : j.items()) r[k] = value_from_json(v);
    t.steps.push_back(std::move(r));
  }
  return t;
}

void write_jsonl(std::ostream& out, const Trace& t) {
  for (const auto& r : t.steps) out << to_json(r).dump() << '\n';
}

std::set<Ident> main_inputs(const Program& p) {
  std::set<Ident> out;
  auto defined = defined_vars(p.main);
  for (const auto& x : input_vars(p.main))
    if (!defined.count(x) && !p.find_node(x)) out.insert(x);
  return out;
}

namespace {

Value draw(const LocalTypePtr& t, std::mt19937& rng) {
  if (const auto* b = std::get_if<LocalType::Base>(&t->node)) {
    if (b->sort == BaseSort::Bool) return Value::boolean(rng() % 2);
    return Value::integer(static_cast<std::int64_t>(rng() % 41) - 20);
  }
  if (const auto* p = std::get_if<LocalType::Prod>(&t->node)) {
    Value a = draw(p->first, rng);
    return Value::pair(a, draw(p->second, rng));
  }
  // unconstrained type variable: any value will do
  return Value::integer(static_cast<std::int64_t>(rng() % 41) - 20);
}

Value draw(const TypePtr& t, std::mt19937& rng) {
  if (const auto* at = std::get_if<SpatialType::At>(&t->node)) return draw(at->local, rng);
  if (const auto* p = std::get_if<SpatialType::Prod>(&t->node)) {
    Value a = draw(p->first, rng);
    return Value::pair(a, draw(p->second, rng));
  }
  throw Error("IO001", "cannot draw a node-valued input");
}

}  // namespace

Trace random_inputs(const ElaboratedProgram& el, int n, unsigned seed) {
  std::mt19937 rng(seed);
  auto inputs = main_inputs(el.program);
  Trace t;
  for (int k = 0; k < n; ++k) {
    ReactionEnv r;
    for (const auto& x : inputs) r[x] = draw(el.main_vars.at(x), rng);
    t.steps.push_back(std::move(r));
  }
  return t;
}

}  // namespace sdf
