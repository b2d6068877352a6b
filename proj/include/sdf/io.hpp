#pragma once

// JSON forms of values and traces, and random input traces for property runs.
//
// Values: integers and booleans as themselves, `_abs_` as null, pairs as
// two-element arrays (longer arrays nest to the right), nodes as "<node f>".

#include <istream>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "sdf/interp_central.hpp"
#include "sdf/interp_dist.hpp"
#include "sdf/spatial_types.hpp"

namespace sdf {

nlohmann::json to_json(const Value& v);
/// IO001 on anything that is not a number, boolean, null or array.
Value value_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReactionEnv& r);
/// `{"value": v, "at": "A"}` leaves, arrays for pairs.
nlohmann::json to_json(const DistValue& v);

/// One JSON object per line; blank lines are skipped. IO001 on bad input.
Trace read_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const Trace& t);

/// Inputs of main: names it reads but neither defines nor declares as nodes.
std::set<Ident> main_inputs(const Program& p);

/// `n` instants of random inputs for every main input, drawn per its inferred
/// type: integers in [-20, 20], booleans, pairs componentwise.
Trace random_inputs(const ElaboratedProgram& el, int n, unsigned seed);

}  // namespace sdf
