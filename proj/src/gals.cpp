#include "sdf/gals.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "sdf/diagnostics.hpp"

namespace sdf {

Schedule Schedule::parse(const std::string& text) {
  if (text == "lockstep") return {Kind::Lockstep, 0};
  if (text == "threads") return {Kind::Threads, 0};
  const std::string prefix = "random:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    auto digits = text.substr(prefix.size());
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return {Kind::Random, static_cast<unsigned>(std::stoul(digits))};
  }
  throw Error("RT004", "unknown schedule '" + text + "' (expected lockstep, random:SEED or threads)");
}

std::string to_string(const Schedule& s) {
  switch (s.kind) {
    case Schedule::Kind::Lockstep: return "lockstep";
    case Schedule::Kind::Random: return "random:" + std::to_string(s.seed);
    case Schedule::Kind::Threads: return "threads";
  }
  return "";
}

namespace {

struct Fifo {
  Location from, to;
  std::deque<Value> queue;
  size_t max = 0;
};

struct Shared {
  std::map<std::string, Fifo> fifos;
  std::optional<size_t> cap;
  std::map<std::string, std::string> reroute;
  std::mutex m;
  std::condition_variable cv;
  long events = 0;
  size_t idle = 0;  // threads waiting since the last event

  void bump() {
    ++events;
    idle = 0;
    cv.notify_all();
  }
};

class Process {
 public:
  enum class Status { Finished, Progress, Waiting };

  Process(const LocationProgram& lp, Shared& sh, const Trace& inputs, int n)
      : loc_(lp.location), prog_(std::make_unique<Program>(lp.program())), sh_(sh), inputs_(inputs), n_(n),
        external_(lp.external), sends_(lp.sends), receives_(lp.receives.begin(), lp.receives.end()),
        outputs_(defined_vars(lp.main)) {
    nodes_ = initial_node_env(prog_->nodes);
    re_ = std::make_unique<Reactor>(prog_->main, [this](const Ident& x) { return lookup(x); });
  }

  const Location& location() const { return loc_; }
  int instant() const { return instant_; }
  bool done() const { return instant_ >= n_; }
  const Trace& trace() const { return trace_; }

  // what the process waits for, as "channel" and the location that writes it
  std::optional<std::pair<std::string, Location>> waiting_on() const {
    if (full_) return std::pair{"room in " + *full_, sh_.fifos.at(*full_).to};
    if (!waiting_) return std::nullopt;
    return std::pair{*waiting_, sh_.fifos.at(source(*waiting_)).from};
  }

  Status attempt() {
    progress_ = false;
    try {
      return step();
    } catch (const Error& e) {
      throw Error(e.code(), "location " + loc_.name + ", instant " + std::to_string(instant_) + ": " + e.message(),
                  e.span());
    }
  }

 private:
  Location loc_;
  std::unique_ptr<Program> prog_;
  Shared& sh_;
  const Trace& inputs_;
  int n_;
  std::map<Ident, Ident> external_;
  std::vector<std::string> sends_;
  std::set<std::string> receives_;
  std::set<Ident> outputs_;
  ReactionEnv nodes_;
  std::unique_ptr<Reactor> re_;

  int instant_ = 0;
  bool in_step_ = false;
  bool progress_ = false;
  std::map<std::string, Value> received_;
  std::set<std::string> sent_;
  std::optional<std::string> waiting_;
  std::optional<std::string> full_;
  Trace trace_;

  std::string source(const std::string& c) const {
    auto it = sh_.reroute.find(c);
    return it == sh_.reroute.end() ? c : it->second;
  }

  Value lookup(const Ident& x) {
    if (receives_.count(x)) {
      if (auto it = received_.find(x); it != received_.end()) return it->second;
      std::lock_guard<std::mutex> lk(sh_.m);
      auto& f = sh_.fifos.at(source(x));
      if (f.queue.empty()) throw Blocked{x};
      Value v = f.queue.front();
      f.queue.pop_front();
      sh_.bump();
      progress_ = true;
      received_[x] = v;
      return v;
    }
    if (auto it = external_.find(x); it != external_.end()) {
      if (instant_ < static_cast<int>(inputs_.steps.size())) {
        const auto& in = inputs_.steps[instant_];
        if (auto v = in.find(it->second); v != in.end()) return v->second;
      }
      throw Error("EVAL001", "no input for '" + it->second + "'");
    }
    if (auto it = nodes_.find(x); it != nodes_.end()) return it->second;
    throw Error("EVAL001", "unbound variable '" + x + "'");
  }

  // Send every outgoing channel computed so far. `_abs_` is sent too: a reader
  // that passes channels to a node reads all of them, whatever branch runs.
  void flush() {
    full_.reset();
    for (const auto& c : sends_) {
      if (sent_.count(c)) continue;
      const Value* v = re_->value(c);
      if (!v) continue;
      std::lock_guard<std::mutex> lk(sh_.m);
      auto& f = sh_.fifos.at(c);
      if (sh_.cap && f.queue.size() >= *sh_.cap) {
        if (!full_) full_ = c;
        continue;
      }
      f.queue.push_back(*v);
      f.max = std::max(f.max, f.queue.size());
      sh_.bump();
      sent_.insert(c);
      progress_ = true;
    }
  }

  Status step() {
    if (!in_step_) {
      re_->begin_step();
      received_.clear();
      sent_.clear();
      in_step_ = true;
      progress_ = true;
    }
    waiting_.reset();
    auto blocked = re_->try_force_all();
    flush();
    if (blocked) {
      waiting_ = blocked->var;
      return progress_ ? Status::Progress : Status::Waiting;
    }
    if (full_) return progress_ ? Status::Progress : Status::Waiting;
    // one message per channel and instant: drop what the taken branch did not read
    for (const auto& c : receives_) {
      try {
        lookup(c);
      } catch (const Blocked& b) {
        waiting_ = b.var;
        return progress_ ? Status::Progress : Status::Waiting;
      }
    }
    try {
      re_->finish_step();
    } catch (const Blocked& b) {
      waiting_ = b.var;
      return progress_ ? Status::Progress : Status::Waiting;
    }
    ReactionEnv out;
    for (const auto& x : outputs_)
      if (const Value* v = re_->value(x)) out[x] = *v;
    trace_.steps.push_back(std::move(out));
    in_step_ = false;
    ++instant_;
    {
      std::lock_guard<std::mutex> lk(sh_.m);
      sh_.bump();
    }
    return Status::Finished;
  }
};

using Processes = std::vector<std::unique_ptr<Process>>;

// RT002 with the wait-for chain of the processes still running.
Error deadlock(const Processes& ps) {
  std::map<Location, const Process*> by_loc;
  for (const auto& p : ps) by_loc[p->location()] = p.get();
  std::ostringstream os;
  os << "deadlock:";
  const Process* start = nullptr;
  for (const auto& p : ps) {
    if (p->done()) continue;
    auto w = p->waiting_on();
    os << ' ' << p->location().name << " (instant " << p->instant() << ")";
    if (w) {
      os << " waits for " << w->first << " from " << w->second.name << ';';
      if (!start) start = p.get();
    } else {
      os << " is ready;";
    }
  }
  if (start) {
    std::vector<Location> path;
    const Process* cur = start;
    while (cur && !cur->done() && cur->waiting_on() &&
           std::find(path.begin(), path.end(), cur->location()) == path.end()) {
      path.push_back(cur->location());
      auto next = by_loc.find(cur->waiting_on()->second);
      cur = next == by_loc.end() ? nullptr : next->second;
    }
    os << " wait-for chain:";
    for (const auto& l : path) os << ' ' << l.name << " ->";
    if (cur && std::find(path.begin(), path.end(), cur->location()) != path.end())
      os << ' ' << cur->location().name << " (cycle)";
    else
      os << (cur ? " " + cur->location().name + " (finished)" : std::string(" outside the network"));
  }
  return Error("RT002", os.str());
}

void run_lockstep(Processes& ps, int n) {
  for (int k = 0; k < n; ++k) {
    for (;;) {
      bool all = true, moved = false;
      for (auto& p : ps) {
        if (p->instant() > k) continue;
        if (p->attempt() != Process::Status::Waiting) moved = true;
        if (p->instant() <= k) all = false;
      }
      if (all) break;
      if (!moved) throw deadlock(ps);
    }
  }
}

void run_random(Processes& ps, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<bool> stale(ps.size(), false);
  for (;;) {
    std::vector<size_t> ready;
    bool any = false;
    for (size_t i = 0; i < ps.size(); ++i) {
      if (ps[i]->done()) continue;
      any = true;
      if (!stale[i]) ready.push_back(i);
    }
    if (!any) return;
    if (ready.empty()) throw deadlock(ps);
    size_t i = ready[std::uniform_int_distribution<size_t>(0, ready.size() - 1)(rng)];
    if (ps[i]->attempt() == Process::Status::Waiting) {
      stale[i] = true;
    } else {
      std::fill(stale.begin(), stale.end(), false);
    }
  }
}

void run_threads(Processes& ps, Shared& sh) {
  size_t alive = ps.size();
  bool abort = false;
  std::exception_ptr error;
  auto body = [&](Process& p) {
    try {
      while (!p.done()) {
        long seen;
        {
          std::lock_guard<std::mutex> lk(sh.m);
          if (abort) return;
          seen = sh.events;
        }
        if (p.attempt() != Process::Status::Waiting) continue;
        std::unique_lock<std::mutex> lk(sh.m);
        if (abort) return;
        if (sh.events != seen) continue;
        if (sh.idle + 1 == alive) {
          error = std::make_exception_ptr(deadlock(ps));
          abort = true;
          sh.cv.notify_all();
          return;
        }
        ++sh.idle;
        sh.cv.wait(lk, [&] { return sh.events != seen || abort; });
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(sh.m);
      if (!error) error = std::current_exception();
      abort = true;
      sh.cv.notify_all();
      return;
    }
    std::lock_guard<std::mutex> lk(sh.m);
    --alive;
    sh.bump();
  };
  std::vector<std::thread> workers;
  for (auto& p : ps) workers.emplace_back(body, std::ref(*p));
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

Value normalize(const Value& v) {
  if (!v.is_pair()) return v;
  Value a = normalize(v.first()), b = normalize(v.second());
  if (a.is_abs() && b.is_abs()) return Value::abs();
  return Value::pair(a, b);
}

}  // namespace

Network::Network(DeploymentPlan plan) : plan_(std::move(plan)) {
  std::set<Location> locs;
  for (const auto& lp : plan_.locations) locs.insert(lp.location);
  std::set<std::string> wired;
  for (const auto& w : plan_.wiring) {
    wired.insert(w.channel);
    if (!locs.count(w.from) || !locs.count(w.to))
      throw Error("RT001", "channel " + w.channel + " connects an unknown location");
    if (!defined_vars(plan_.at(w.from).main).count(w.channel))
      throw Error("RT001", "channel " + w.channel + " is not written on " + w.from.name);
    if (!input_vars(plan_.at(w.to).main).count(w.channel))
      throw Error("RT001", "channel " + w.channel + " is not read on " + w.to.name);
  }
  for (const auto& lp : plan_.locations) {
    std::set<Ident> names;
    for (const auto& n : lp.program().nodes) names.insert(n.name);
    for (const auto& x : input_vars(lp.main))
      if (!lp.external.count(x) && !names.count(x) && !wired.count(x))
        throw Error("RT001", "'" + x + "' is read on " + lp.location.name + " but no channel delivers it");
  }
}

NetworkRun Network::run(const Trace& inputs, int n, const NetworkOptions& opts) const {
  Shared sh;
  sh.cap = opts.fifo_capacity;
  sh.reroute = opts.reroute;
  for (const auto& w : plan_.wiring) sh.fifos[w.channel] = Fifo{w.from, w.to, {}, 0};
  for (const auto& [c, r] : opts.reroute)
    if (!sh.fifos.count(c) || !sh.fifos.count(r)) throw Error("RT001", "cannot reroute " + c + " to " + r);
  for (const auto& [c, v] : opts.prefill) {
    auto it = sh.fifos.find(c);
    if (it == sh.fifos.end()) throw Error("RT001", "cannot prefill unknown channel " + c);
    it->second.queue.push_back(v);
    it->second.max = it->second.queue.size();
  }

  Processes ps;
  for (const auto& lp : plan_.locations) ps.push_back(std::make_unique<Process>(lp, sh, inputs, n));
  switch (opts.schedule.kind) {
    case Schedule::Kind::Lockstep: run_lockstep(ps, n); break;
    case Schedule::Kind::Random: run_random(ps, opts.schedule.seed); break;
    case Schedule::Kind::Threads: run_threads(ps, sh); break;
  }

  NetworkRun out;
  for (const auto& p : ps) out.traces[p->location()] = p->trace();
  for (const auto& [c, f] : sh.fifos) {
    out.max_occupancy[c] = f.max;
    out.leftover[c] = f.queue.size();
  }
  return out;
}

Network instantiate(const DeploymentPlan& plan) { return Network(plan); }

NetworkRun run_network(const Network& net, const Trace& inputs, int n, const NetworkOptions& opts) {
  return net.run(inputs, n, opts);
}

Value represent(const Value& v, const TypePtr& t, const Location& a) {
  if (const auto* at = std::get_if<SpatialType::At>(&t->node)) return at->loc == a ? v : Value::abs();
  if (const auto* p = std::get_if<SpatialType::Prod>(&t->node)) {
    if (!v.is_pair()) return Value::abs();
    return Value::pair(represent(v.first(), p->first, a), represent(v.second(), p->second, a));
  }
  return v;
}

EquivalenceReport compare_runs(const ElaboratedProgram& typed, const Trace& central, const NetworkRun& run) {
  EquivalenceReport r;
  r.steps = static_cast<int>(central.steps.size());
  for (int k = 0; k < r.steps; ++k) {
    for (const auto& [x, v] : central.steps[k]) {
      auto t = typed.main_vars.find(x);
      if (t == typed.main_vars.end() || std::holds_alternative<SpatialType::Func>(t->second->node)) continue;
      for (const auto& [loc, trace] : run.traces) {
        Value expected = normalize(represent(v, t->second, loc));
        Value got;
        bool have = k < static_cast<int>(trace.steps.size());
        if (have) {
          auto it = trace.steps[k].find(located_name(x, loc));
          if (it != trace.steps[k].end()) got = normalize(it->second);
        }
        if (!have || !(expected == got))
          r.mismatches.push_back({k, x, loc, to_string(expected), have ? to_string(got) : "missing instant"});
      }
    }
  }
  return r;
}

EquivalenceReport verify_equivalence(const Program& p, const Trace& inputs, int n, const NetworkOptions& opts) {
  auto plan = project_program(prepare_projection(p));
  auto central = run(p, inputs, n);
  Network net(plan);
  auto result = net.run(inputs, n, opts);
  return compare_runs(net.plan().source, central, result);
}

}  // namespace sdf
