#pragma once

// Deployment simulator: one process per location runs its projected program
// with the centralized reactor, and values travel through FIFO channels.
// A process that needs a value not yet received keeps computing what it can,
// sends what it has, and resumes once a message arrives.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdf/interp_central.hpp"
#include "sdf/projection.hpp"

namespace sdf {

struct Schedule {
  enum class Kind { Lockstep, Random, Threads };
  Kind kind = Kind::Lockstep;
  unsigned seed = 0;

  /// "lockstep", "random:SEED" or "threads". Throws Error("RT004") otherwise.
  static Schedule parse(const std::string& text);
};

std::string to_string(const Schedule& s);

struct NetworkOptions {
  Schedule schedule;
  std::optional<size_t> fifo_capacity;  // unbounded when empty
  // fault injection, for testing the equivalence check
  std::map<std::string, std::string> reroute;  // the reader of a channel pops another FIFO
  std::map<std::string, Value> prefill;        // values queued before the first instant
};

struct NetworkRun {
  std::map<Location, Trace> traces;              // variables defined by each location's main
  std::map<std::string, size_t> max_occupancy;   // per FIFO
  std::map<std::string, size_t> leftover;        // messages never read
};

/// One process per location of the plan and one FIFO per wire.
/// RT001 when a wire endpoint has no matching reader or writer.
class Network {
 public:
  explicit Network(DeploymentPlan plan);

  size_t process_count() const { return plan_.locations.size(); }
  size_t fifo_count() const { return plan_.wiring.size(); }
  const DeploymentPlan& plan() const { return plan_; }

  /// Run `n` instants. Inputs are the source program's main inputs; each
  /// location reads the ones it uses. RT002 on deadlock (with the wait-for
  /// chain), runtime errors of the reactor otherwise, prefixed with the
  /// location and instant.
  NetworkRun run(const Trace& inputs, int n, const NetworkOptions& opts = {}) const;

 private:
  DeploymentPlan plan_;
};

Network instantiate(const DeploymentPlan& plan);
NetworkRun run_network(const Network& net, const Trace& inputs, int n, const NetworkOptions& opts = {});

struct Mismatch {
  int step = 0;
  Ident var;
  Location location;
  std::string expected;
  std::string got;
};

struct EquivalenceReport {
  int steps = 0;
  std::vector<Mismatch> mismatches;
  bool equivalent() const { return mismatches.empty(); }
};

/// Value a location holds for a variable of type `t` whose centralized value
/// is `v`: `v` on the location, `_abs_` elsewhere, componentwise on pairs.
Value represent(const Value& v, const TypePtr& t, const Location& a);

/// Compare a centralized trace with a network run through `represent`.
/// A variable missing on a location counts as `_abs_`.
EquivalenceReport compare_runs(const ElaboratedProgram& typed, const Trace& central, const NetworkRun& run);

/// Run `p` centrally and as a projected network, and compare.
EquivalenceReport verify_equivalence(const Program& p, const Trace& inputs, int n, const NetworkOptions& opts = {});

}  // namespace sdf
