#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "sdf/diagnostics.hpp"
#include "sdf/gals.hpp"
#include "sdf/parser.hpp"

using namespace sdf;

namespace {

auto A = Location::constant("A");
auto B = Location::constant("B");

const char* kNodeF = R"(
loc A; loc B; link A to B;
node g(x) = x + 1;
node h(x) = x * 2;
node f(x) = z with
      y = g(x) at A
  and z = h(y) at B;
z = f(x);
)";

// two channels in the same direction, so that swapping them is observable
const char* kTwoWires = R"(
loc A; loc B; link A to B;
a = x at A and b = (x + 1) at A and u = (a * 2) at B and v = (b * 3) at B;
)";

const char* kRoundTrip = R"(
loc A; loc B; link A to B; link B to A;
a = x at A and b = (a + 1) at B and d = (b + 1) at A;
)";

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(SDF_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trace int_inputs(const std::string& x, const std::vector<std::int64_t>& xs) {
  Trace t;
  for (auto v : xs) t.steps.push_back({{x, Value::integer(v)}});
  return t;
}

Trace random_inputs(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::int64_t> xs;
  for (int i = 0; i < n; ++i) xs.push_back(static_cast<std::int64_t>(rng() % 41) - 20);
  return int_inputs("x", xs);
}

Network network_of(const std::string& src) { return Network(project_program(prepare_projection(parse_or_throw(src)))); }

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.message();
  }
  return "";
}

NetworkOptions with(const std::string& schedule) {
  NetworkOptions o;
  o.schedule = Schedule::parse(schedule);
  return o;
}

}  // namespace

TEST(Schedule, ParseAndPrint) {
  EXPECT_EQ(to_string(Schedule::parse("lockstep")), "lockstep");
  EXPECT_EQ(to_string(Schedule::parse("threads")), "threads");
  auto r = Schedule::parse("random:42");
  EXPECT_EQ(r.kind, Schedule::Kind::Random);
  EXPECT_EQ(r.seed, 42u);
  EXPECT_EQ(code_of([] { Schedule::parse("random:"); }), "RT004");
  EXPECT_EQ(code_of([] { Schedule::parse("random:x1"); }), "RT004");
  EXPECT_EQ(code_of([] { Schedule::parse("eager"); }), "RT004");
}

TEST(Network, NodeAcrossTwoLocations) {
  auto net = network_of(kNodeF);
  EXPECT_EQ(net.process_count(), 2u);
  EXPECT_EQ(net.fifo_count(), 1u);
  auto r = net.run(int_inputs("x", {1, 2, 3}), 3);
  const auto& tb = r.traces.at(B);
  ASSERT_EQ(tb.steps.size(), 3u);
  // h(g(x)) = 2 * (x + 1)
  EXPECT_EQ(tb.steps[0].at("z$B"), Value::integer(4));
  EXPECT_EQ(tb.steps[1].at("z$B"), Value::integer(6));
  EXPECT_EQ(tb.steps[2].at("z$B"), Value::integer(8));
  EXPECT_TRUE(r.traces.at(A).steps[0].at("z$A").is_abs());
  EXPECT_EQ(r.leftover.at("c$1"), 0u);
}

TEST(Network, ZeroInstants) {
  auto r = network_of(kNodeF).run(Trace{}, 0);
  EXPECT_TRUE(r.traces.at(A).steps.empty());
  EXPECT_TRUE(r.traces.at(B).steps.empty());
}

TEST(Network, MissingInputIsReportedWithItsLocation) {
  auto net = network_of(kNodeF);
  auto msg = message_of([&] { net.run(int_inputs("x", {1}), 2); });
  EXPECT_NE(msg.find("location A, instant 1"), std::string::npos) << msg;
}

TEST(Network, LockstepKeepsOneMessagePerChannel) {
  auto plan = project_program(prepare_projection(parse_or_throw(read_corpus("multichannel_sdr.sdf"))));
  Network net(plan);
  auto r = net.run(random_inputs(20, 3), 20);
  for (const auto& [c, occ] : r.max_occupancy) EXPECT_LE(occ, 1u) << c;
}

TEST(Network, BoundedFifosStillComplete) {
  auto net = network_of(kTwoWires);
  auto opts = with("random:5");
  opts.fifo_capacity = 1;
  auto r = net.run(random_inputs(30, 1), 30);
  auto bounded = net.run(random_inputs(30, 1), 30, opts);
  EXPECT_EQ(r.traces.at(B).steps.size(), bounded.traces.at(B).steps.size());
  for (const auto& [c, occ] : bounded.max_occupancy) EXPECT_LE(occ, 1u);
}

TEST(Network, NoRoomIsADeadlock) {
  auto net = network_of(kNodeF);
  NetworkOptions opts;
  opts.fifo_capacity = 0;
  auto msg = message_of([&] { net.run(int_inputs("x", {1}), 1, opts); });
  EXPECT_NE(msg.find("room in c$1"), std::string::npos) << msg;
  EXPECT_EQ(code_of([&] { net.run(int_inputs("x", {1}), 1, opts); }), "RT002");
}

TEST(Network, DeadlockNamesTheWaitForChain) {
  auto net = network_of(kRoundTrip);
  for (const char* s : {"lockstep", "random:1", "threads"}) {
    auto opts = with(s);
    opts.reroute = {{"c$1", "c$2"}};
    auto msg = message_of([&] { net.run(int_inputs("x", {1, 2}), 2, opts); });
    EXPECT_EQ(code_of([&] { net.run(int_inputs("x", {1, 2}), 2, opts); }), "RT002") << s;
    EXPECT_NE(msg.find("wait-for chain"), std::string::npos) << msg;
    EXPECT_NE(msg.find("cycle"), std::string::npos) << msg;
  }
}

TEST(Network, DanglingWireIsRejected) {
  auto plan = project_program(prepare_projection(parse_or_throw(kNodeF)));
  plan.wiring[0].to = A;
  EXPECT_EQ(code_of([&] { Network net(plan); }), "RT001");
  auto plan2 = project_program(prepare_projection(parse_or_throw(kNodeF)));
  plan2.wiring.clear();
  EXPECT_EQ(code_of([&] { Network net(plan2); }), "RT001");
}

TEST(Represent, PerLocation) {
  auto at_a = type_at(local_base(BaseSort::Int), A);
  EXPECT_EQ(represent(Value::integer(3), at_a, A), Value::integer(3));
  EXPECT_TRUE(represent(Value::integer(3), at_a, B).is_abs());
  auto t = type_prod(at_a, type_at(local_base(BaseSort::Int), B));
  auto v = represent(Value::pair(Value::integer(1), Value::integer(2)), t, B);
  EXPECT_TRUE(v.first().is_abs());
  EXPECT_EQ(v.second(), Value::integer(2));
}

TEST(Equivalence, NodeAcrossTwoLocations) {
  auto p = parse_or_throw(kNodeF);
  auto rep = verify_equivalence(p, int_inputs("x", {1, 2, 3}), 3);
  EXPECT_TRUE(rep.equivalent());
  EXPECT_EQ(rep.steps, 3);
}

TEST(Equivalence, SoftwareRadioUnderEverySchedule) {
  auto p = parse_or_throw(read_corpus("multichannel_sdr.sdf"));
  auto in = random_inputs(40, 7);
  for (const char* s : {"lockstep", "random:0", "random:9", "threads"}) {
    auto rep = verify_equivalence(p, in, 40, with(s));
    EXPECT_TRUE(rep.equivalent()) << s << " " << (rep.mismatches.empty() ? "" : rep.mismatches[0].var);
  }
}

TEST(Equivalence, SwappedChannelsAreDetected) {
  auto p = parse_or_throw(kTwoWires);
  NetworkOptions opts;
  opts.reroute = {{"c$1", "c$2"}, {"c$2", "c$1"}};
  auto rep = verify_equivalence(p, int_inputs("x", {1, 2, 3}), 3, opts);
  EXPECT_FALSE(rep.equivalent());
  EXPECT_EQ(rep.mismatches[0].location, B);
}

TEST(Equivalence, DelayedChannelIsDetected) {
  auto p = parse_or_throw(kNodeF);
  NetworkOptions opts;
  opts.prefill = {{"c$1", Value::integer(0)}};
  auto rep = verify_equivalence(p, int_inputs("x", {1, 2, 3}), 3, opts);
  EXPECT_FALSE(rep.equivalent());
  EXPECT_EQ(rep.mismatches[0].step, 0);
  EXPECT_EQ(rep.mismatches[0].var, "z");
}

// Every schedule yields the same traces as lockstep.
TEST(GalsProperty, TracesIndependentOfSchedule) {
  std::vector<std::string> sources{kNodeF, kTwoWires, kRoundTrip, read_corpus("multichannel_sdr.sdf")};
  for (const auto& src : sources) {
    auto net = network_of(src);
    auto in = random_inputs(25, 2);
    auto ref = net.run(in, 25);
    for (unsigned seed = 0; seed < 10; ++seed) {
      auto r = net.run(in, 25, with("random:" + std::to_string(seed)));
      for (const auto& [loc, t] : ref.traces) EXPECT_EQ(r.traces.at(loc).steps, t.steps) << src << " seed " << seed;
    }
    auto r = net.run(in, 25, with("threads"));
    for (const auto& [loc, t] : ref.traces) EXPECT_EQ(r.traces.at(loc).steps, t.steps) << src << " threads";
  }
}
