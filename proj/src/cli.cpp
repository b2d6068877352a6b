#include "sdf/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>

#include "sdf/arch.hpp"
#include "sdf/diagnostics.hpp"
#include "sdf/gals.hpp"
#include "sdf/interp_dist.hpp"
#include "sdf/io.hpp"
#include "sdf/parser.hpp"
#include "sdf/projection.hpp"

namespace sdf {

namespace {

using nlohmann::json;

struct CliConfig {
  std::string command;
  std::string input;
  std::string out_dir = ".";
  std::optional<int> steps;
  std::string inputs;
  std::string schedule = "lockstep";
  std::optional<unsigned> seed;
  std::optional<size_t> fifo_cap;
  std::string format = "text";
  bool semantics = false;
  unsigned input_seed = 0;
  std::vector<std::string> reroute;
  std::vector<std::string> prefill;
};

struct UsageError {
  std::string message;
};

class Driver {
 public:
  Driver(const CliConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int run() {
    try {
      if (cfg_.command == "check") return check();
      if (cfg_.command == "graph") return graph();
      if (cfg_.command == "project") return project();
      if (cfg_.command == "run") return run_central();
      if (cfg_.command == "run-dist") return run_dist_cmd();
      if (cfg_.command == "verify") return verify();
    } catch (const CompileError& e) {
      report(e.diagnostics());
      return kExitDiagnostics;
    } catch (const Error& e) {
      report({e.to_diagnostic()});
      return compile_time(e.code()) ? kExitDiagnostics : kExitRuntime;
    }
    return kExitUsage;
  }

 private:
  const CliConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<Program> program_;
  std::optional<ElaboratedProgram> typed_;

  bool json_out() const { return cfg_.format == "json"; }

  static bool compile_time(const std::string& code) {
    for (const char* p : {"SYN", "ARCH", "TYPE", "PROJ"})
      if (code.rfind(p, 0) == 0) return true;
    return false;
  }

  void report(const std::vector<Diagnostic>& ds) {
    if (json_out()) {
      json arr = json::array();
      for (const auto& d : ds)
        arr.push_back({{"code", d.code}, {"line", d.span.line}, {"column", d.span.column}, {"message", d.message}});
      out_ << json{{"diagnostics", arr}}.dump(2) << '\n';
      return;
    }
    for (const auto& d : ds) err_ << format_diagnostic(d, cfg_.input) << '\n';
  }

  const Program& program() {
    if (!program_) {
      auto r = parse_program(read_source(cfg_.input));
      if (!r.ok()) throw CompileError(r.diagnostics);
      program_ = std::move(*r.program);
    }
    return *program_;
  }

  const ElaboratedProgram& typed() {
    if (!typed_) typed_ = infer_program(program());
    return *typed_;
  }

  int steps_or(int fallback) const { return cfg_.steps ? *cfg_.steps : fallback; }

  Trace inputs() {
    if (!cfg_.inputs.empty()) {
      std::ifstream in(cfg_.inputs);
      if (!in) throw Error("IO001", "cannot open " + cfg_.inputs);
      return read_jsonl(in);
    }
    int n = steps_or(10);
    if (main_inputs(program()).empty()) return Trace{std::vector<ReactionEnv>(n)};
    return random_inputs(typed(), n, cfg_.input_seed);
  }

  int step_count(const Trace& in) const { return steps_or(static_cast<int>(in.steps.size())); }

  NetworkOptions network_options() const {
    NetworkOptions o;
    o.schedule = Schedule::parse(cfg_.seed ? "random:" + std::to_string(*cfg_.seed) : cfg_.schedule);
    o.fifo_capacity = cfg_.fifo_cap;
    for (const auto& r : cfg_.reroute) {
      auto eq = r.find('=');
      o.reroute[r.substr(0, eq)] = r.substr(eq + 1);
    }
    for (const auto& p : cfg_.prefill) {
      auto eq = p.find('=');
      json j;
      try {
        j = json::parse(p.substr(eq + 1));
      } catch (const json::parse_error&) {
        throw UsageError{"--prefill value is not JSON: " + p};
      }
      o.prefill[p.substr(0, eq)] = value_from_json(j);
    }
    return o;
  }

  static json channel_json(const std::string& name, const Location& from, const Location& to, const std::string& sort) {
    return {{"channel", name}, {"from", from.name}, {"to", to.name}, {"sort", sort}};
  }

  int check() {
    const auto& el = typed();
    if (json_out()) {
      json nodes = json::array();
      for (const auto& n : el.program.nodes) {
        const auto& s = el.nodes.at(n.name).scheme;
        json chans = json::array();
        for (const auto& c : s.chans) chans.push_back(channel_json(c.name, c.from, c.to, to_string(c.payload)));
        nodes.push_back({{"name", n.name}, {"scheme", to_string(s)}, {"channels", chans}});
      }
      json vars = json::object();
      for (const auto& [x, t] : el.main_vars) vars[x] = to_string(t);
      json chans = json::array();
      for (const auto& c : el.main_chans) chans.push_back(channel_json(c.name, c.from, c.to, to_string(c.payload)));
      out_ << json{{"nodes", nodes}, {"main", vars}, {"channels", chans}}.dump(2) << '\n';
      return kExitOk;
    }
    for (const auto& n : el.program.nodes) {
      const auto& s = el.nodes.at(n.name).scheme;
      out_ << "node " << n.name << " : " << to_string(s) << '\n';
      for (const auto& c : s.chans) out_ << "  " << to_string(c) << '\n';
    }
    out_ << "main\n";
    for (const auto& [x, t] : el.main_vars) out_ << "  " << x << " : " << to_string(t) << '\n';
    out_ << "channels\n";
    for (const auto& c : el.main_chans) out_ << "  " << to_string(c) << '\n';
    return kExitOk;
  }

  int graph() {
    auto g = build_arch(program().arch);
    std::vector<std::string> locs = g.locations();
    std::sort(locs.begin(), locs.end());
    json links = json::array();
    for (const auto& [a, b] : g.links()) links.push_back({a, b});
    out_ << json{{"locations", locs}, {"links", links}}.dump(2) << '\n';
    return kExitOk;
  }

  int project() {
    auto plan = project_program(prepare_projection(program()));
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.out_dir);
    auto stem = fs::path(cfg_.input).stem().string();
    json files = json::array();
    for (const auto& lp : plan.locations) {
      auto path = fs::path(cfg_.out_dir) / (stem + "." + lp.location.name + ".sdf");
      std::ofstream(path) << pretty_print(lp.program());
      files.push_back(path.string());
    }
    json wiring = json::array();
    for (const auto& w : plan.wiring) wiring.push_back(channel_json(w.channel, w.from, w.to, w.sort));
    auto wpath = fs::path(cfg_.out_dir) / "wiring.json";
    std::ofstream(wpath) << wiring.dump(2) << '\n';
    files.push_back(wpath.string());
    if (json_out()) {
      out_ << json{{"files", files}, {"wiring", wiring}}.dump(2) << '\n';
    } else {
      for (const auto& f : files) out_ << f.get<std::string>() << '\n';
    }
    return kExitOk;
  }

  int run_central() {
    auto in = inputs();
    write_jsonl(out_, sdf::run(program(), in, step_count(in)));
    return kExitOk;
  }

  int run_dist_cmd() {
    auto in = inputs();
    int n = step_count(in);
    if (cfg_.semantics) {
      auto t = sdf::run_dist(program(), in, n);
      for (size_t k = 0; k < t.steps.size(); ++k) {
        json env = json::object();
        for (const auto& [x, v] : t.steps[k].env) env[x] = to_json(v);
        json locs = json::array();
        for (const auto& l : t.steps[k].locs) locs.push_back(l.name);
        out_ << json{{"step", k}, {"locations", locs}, {"env", env}}.dump() << '\n';
      }
      return kExitOk;
    }
    auto opts = network_options();
    Network net(project_program(prepare_projection(program())));
    auto r = net.run(in, n, opts);
    for (int k = 0; k < n; ++k) {
      json step = json::object();
      for (const auto& [loc, t] : r.traces) step[loc.name] = to_json(t.steps[k]);
      out_ << json{{"step", k}, {"locations", step}}.dump() << '\n';
    }
    return kExitOk;
  }

  int verify() {
    auto in = inputs();
    int n = step_count(in);
    auto opts = network_options();
    auto rep = verify_equivalence(program(), in, n, opts);
    json mism = json::array();
    for (const auto& m : rep.mismatches)
      mism.push_back({{"step", m.step}, {"var", m.var}, {"location", m.location.name}, {"expected", m.expected},
                      {"got", m.got}});
    out_ << json{{"steps", rep.steps},
                 {"schedule", to_string(opts.schedule)},
                 {"equivalent", rep.equivalent()},
                 {"mismatches", mism}}
                .dump(2)
         << '\n';
    return rep.equivalent() ? kExitOk : kExitMismatch;
  }
};

void validate(const CliConfig& cfg) {
  if (cfg.steps && *cfg.steps < 0) throw UsageError{"--steps must be non-negative"};
  if (cfg.schedule == "random") {
    if (!cfg.seed) throw UsageError{"--schedule random needs --seed"};
  } else {
    if (cfg.seed) throw UsageError{"--seed only goes with --schedule random"};
    try {
      Schedule::parse(cfg.schedule);
    } catch (const Error& e) {
      throw UsageError{e.message()};
    }
  }
  for (const auto& r : cfg.reroute)
    if (r.find('=') == std::string::npos) throw UsageError{"--reroute expects READ=FROM"};
  for (const auto& p : cfg.prefill)
    if (p.find('=') == std::string::npos) throw UsageError{"--prefill expects CHANNEL=VALUE"};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Compiler and simulator for located synchronous dataflow programs", "sdfc"};
  app.require_subcommand(1);
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto file = [&](CLI::App* sub) { sub->add_option("file", cfg.input, "Source program (.sdf, - for stdin)")->required(); };
  auto running = [&](CLI::App* sub) {
    sub->add_option("--steps", cfg.steps, "Number of instants (default: number of input lines, or 10)");
    sub->add_option("--inputs", cfg.inputs, "Inputs, one JSON object per line (default: random)");
    sub->add_option("--input-seed", cfg.input_seed, "Seed of the random inputs");
  };
  auto network = [&](CLI::App* sub) {
    sub->add_option("--schedule", cfg.schedule, "lockstep, random:SEED, random (with --seed) or threads");
    sub->add_option("--seed", cfg.seed, "Seed of the random schedule");
    sub->add_option("--fifo-cap", cfg.fifo_cap, "FIFO capacity (default: unbounded)");
    sub->add_option("--reroute", cfg.reroute, "Fault: the reader of READ pops FROM's FIFO (READ=FROM)");
    sub->add_option("--prefill", cfg.prefill, "Fault: queue a JSON value on a channel first (CHANNEL=VALUE)");
  };

  auto* check = app.add_subcommand("check", "Type a program; print node schemes and channels");
  file(check);
  auto* graph = app.add_subcommand("graph", "Print locations and links as JSON");
  file(graph);
  auto* project = app.add_subcommand("project", "Write one program per location and wiring.json");
  file(project);
  project->add_option("-o,--out-dir", cfg.out_dir, "Output directory");
  auto* run = app.add_subcommand("run", "Run with the centralized semantics");
  file(run);
  running(run);
  auto* dist = app.add_subcommand("run-dist", "Run the projected network (or the distributed semantics)");
  file(dist);
  running(dist);
  network(dist);
  dist->add_flag("--semantics", cfg.semantics, "Step the distributed semantics instead; values with locations");
  auto* verify = app.add_subcommand("verify", "Compare the centralized run with the projected network");
  file(verify);
  running(verify);
  network(verify);
  for (auto* sub : {check, graph, project, run, dist, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "sdfc: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    validate(cfg);
    return Driver(cfg, out, err).run();
  } catch (const UsageError& e) {
    err << "sdfc: " << e.message << "\n\n" << app.help();
    return kExitUsage;
  }
}

}  // namespace sdf
