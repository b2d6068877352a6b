#include <gtest/gtest.h>

#include <random>

#include "sdf/interp_central.hpp"
#include "sdf/parser.hpp"

using namespace sdf;

namespace {

Trace inputs_of(const std::string& var, const std::vector<std::int64_t>& xs) {
  Trace t;
  for (auto x : xs) t.steps.push_back({{var, Value::integer(x)}});
  return t;
}

std::vector<std::int64_t> ints(const Trace& t, const std::string& var) {
  std::vector<std::int64_t> out;
  for (const auto& s : t.steps) out.push_back(s.at(var).as_int());
  return out;
}

ExprPtr rhs_of(const std::string& src) {
  auto p = parse_or_throw(src);
  return flatten_and(p.main)[0]->as<Decl::Eq>()->rhs;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Values, Operators) {
  EXPECT_EQ(apply_op(BinOpKind::Add, Value::integer(1), Value::integer(2)), Value::integer(3));
  EXPECT_EQ(apply_op(BinOpKind::Lt, Value::integer(1), Value::integer(2)), Value::boolean(true));
  EXPECT_EQ(apply_op(BinOpKind::Eq, Value::boolean(true), Value::boolean(false)), Value::boolean(false));
  EXPECT_EQ(code_of([] { apply_op(BinOpKind::Mul, Value::abs(), Value::integer(2)); }), "RT003");
  EXPECT_EQ(code_of([] { apply_op(BinOpKind::Add, Value::boolean(true), Value::integer(1)); }), "EVAL002");
  EXPECT_EQ(apply_op(BinOpKind::Add, Value::integer(INT64_MAX), Value::integer(1)), Value::integer(INT64_MIN));
}

TEST(Values, BindPattern) {
  ReactionEnv out;
  bind_pattern(Pattern::tuple({Pattern::single("a"), Pattern::single("b"), Pattern::single("c")}),
               Value::pair(Value::integer(1), Value::pair(Value::integer(2), Value::integer(3))), out);
  EXPECT_EQ(out.at("c"), Value::integer(3));
  EXPECT_EQ(code_of([] {
              ReactionEnv o;
              bind_pattern(Pattern::tuple({Pattern::single("a"), Pattern::single("b")}), Value::integer(1), o);
            }),
            "EVAL004");
}

TEST(StepExpr, FbyEmitsInitAndStoresNext) {
  auto [v, e] = step_expr({{"x", Value::integer(5)}}, rhs_of("y = 0 fby x;"));
  EXPECT_EQ(v, Value::integer(0));
  EXPECT_EQ(to_string(e), "5 fby x");
}

TEST(StepExpr, OpAndAtTransparency) {
  auto [v, e] = step_expr({}, rhs_of("y = 1 + 2;"));
  EXPECT_EQ(v, Value::integer(3));
  EXPECT_EQ(to_string(e), "1 + 2");
  auto [w, e2] = step_expr({{"x", Value::integer(1)}}, rhs_of("y = (x, 2) at A;"));
  EXPECT_EQ(w, Value::pair(Value::integer(1), Value::integer(2)));
  EXPECT_EQ(to_string(e2), "(x, 2) at A");
}

TEST(StepExpr, UnboundVariable) {
  EXPECT_EQ(code_of([] { step_expr({}, rhs_of("y = z + 1;")); }), "EVAL001");
}

TEST(StepDecl, CounterThreeInstants) {
  auto p = parse_or_throw("y = 1 fby (y + 1);");
  DeclPtr d = p.main;
  std::vector<std::int64_t> seen;
  for (int i = 0; i < 3; ++i) {
    auto [r, d2] = step_decl({}, d);
    seen.push_back(r.at("y").as_int());
    d = d2;
  }
  EXPECT_EQ(seen, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(StepDecl, InstantaneousCycle) {
  auto p = parse_or_throw("x = y and y = x;");
  EXPECT_EQ(code_of([&] { step_decl({}, p.main); }), "EVAL003");
}

TEST(StepDecl, IfRewritesTakenBranchOnly) {
  auto p = parse_or_throw("if c then y = 0 fby 1 else y = 10 fby 11;");
  auto [r, d] = step_decl({{"c", Value::boolean(true)}}, p.main);
  EXPECT_EQ(r.at("y"), Value::integer(0));
  EXPECT_EQ(to_string(d), "if c then y = 1 fby 1 else y = 10 fby 11");
  EXPECT_EQ(code_of([&] { step_decl({{"c", Value::integer(1)}}, p.main); }), "EVAL005");
}

TEST(StepDecl, MutualRecursionAcrossEquations) {
  auto p = parse_or_throw("a = b + 1 and b = 0 fby a;");
  auto [r, d] = step_decl({}, p.main);
  EXPECT_EQ(r.at("a"), Value::integer(1));
  auto [r2, d2] = step_decl({}, d);
  EXPECT_EQ(r2.at("a"), Value::integer(2));
}

TEST(StepDecl, ApplicationIsInlinedOnce) {
  auto p = parse_or_throw("node inc(x) = x + 1; y = inc(z);");
  ReactionEnv r = initial_node_env(p.nodes);
  r["z"] = Value::integer(4);
  auto [out, d] = step_decl(r, p.main);
  EXPECT_EQ(out.at("y"), Value::integer(5));
  EXPECT_EQ(to_string(d).find("inc("), std::string::npos);
}

TEST(InitialEnv, OneClosurePerNode) {
  auto p = parse_or_throw("node f(x) = x; node g(x) = x; y = f(1);");
  auto r = initial_node_env(p.nodes);
  EXPECT_EQ(r.size(), 2u);
  EXPECT_TRUE(r.at("g").is_closure());
  EXPECT_TRUE(initial_node_env({}).empty());
}

TEST(Run, LocatedNodeWithIdentityStubs) {
  auto p = parse_or_throw(R"(
loc A; loc B; link A to B;
node g(x) = x;
node h(x) = x;
node f(x) = z with
      y = g(x) at A
  and z = h(y) at B;
z = f(x);
)");
  auto t = run(p, inputs_of("x", {1, 2, 3}), 3);
  EXPECT_EQ(ints(t, "z"), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_TRUE(run(p, {}, 0).steps.empty());
}

TEST(Run, HigherOrderNodeWithLocationParameters) {
  auto p = parse_or_throw(R"(
loc A; loc B; link A to B;
node inc(x) = x + 1;
node dbl(x) = x * 2;
node h [d1, d2] (f, g, x) = z with
      y = f(x) at d1
  and z = g(y) at d2;
y1 = h(inc at A, dbl at A, x)
and y2 = h(dbl at A, inc at B, x);
)");
  auto t = run(p, inputs_of("x", {1, 5}), 2);
  EXPECT_EQ(ints(t, "y1"), (std::vector<std::int64_t>{4, 12}));
  EXPECT_EQ(ints(t, "y2"), (std::vector<std::int64_t>{3, 11}));
}

TEST(Run, StatefulNodeInstancesAreIndependent) {
  auto p = parse_or_throw(R"(
node count(x) = n with n = 0 fby (n + x);
a = count(1) and b = count(10);
)");
  auto t = run(p, {}, 3);
  EXPECT_EQ(ints(t, "a"), (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(ints(t, "b"), (std::vector<std::int64_t>{0, 10, 20}));
}

TEST(Run, TupleResultFeedsBackThroughNode) {
  // (a, b) = f(c) with c = a is causal: f's first output does not read its input
  auto p = parse_or_throw(R"(
node f(x) = (1, x);
(a, b) = f(c) and c = a;
)");
  auto t = run(p, {}, 1);
  EXPECT_EQ(t.steps[0].at("b"), Value::integer(1));
}

TEST(Run, ErrorsCarryInstant) {
  auto p = parse_or_throw("y = 10 fby (y - 1) and z = if_zero + 0;");
  try {
    run(p, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "EVAL001");
    EXPECT_NE(e.message().find("instant 0"), std::string::npos);
  }
}

TEST(Run, SdrSwitchesChannelWithOneInstantDelay) {
  auto p = parse_or_throw(R"(
loc FPGA; loc DSP; loc GPP;
link FPGA to DSP; link DSP to GPP;
node f1(x) = x + 1;
node f2(x) = x + 2;
node d1(x) = x * 10;
node d2(x) = x * 100;
node k1(x) = x;
node k2(x) = 0 - x;
node sel(y) = y < 0;
node channel(filter, demod, crc, x) = y with
      f = filter(x) at FPGA
  and d = demod(f) at DSP
  and y = crc(d) at GPP;
node sdr(x) = y with
      c = sel(y) at GPP
  and if true fby c then y = channel(f1, d1, k1, x) else y = channel(f2, d2, k2, x);
y = sdr(x);
)");
  auto t = run(p, inputs_of("x", {0, 0, 0, 0}), 4);
  // instant 0: first channel (10); c = false, so instant 1 takes the second (-200);
  // c = true at instant 1, so instant 2 is back on the first channel.
  EXPECT_EQ(ints(t, "y"), (std::vector<std::int64_t>{10, -200, 10, -200}));
}

// Stripping every `at` never changes the trace.
TEST(CentralProperty, AtErasureAndDeterminism) {
  std::mt19937 rng(3);
  const char* srcs[] = {
      "loc A; loc B; link A to B; node g(x) = x + 1; node f(x) = z with y = g(x) at A and z = (y * 2) at B; z = f(x);",
      "loc A; y = (0 fby (y + x)) at A and w = (y, x) at A;",
      "loc A; loc B; link A to B; if (x < 3) at A then o = (1 fby o) at B else o = x at A;",
  };
  for (const char* src : srcs) {
    auto p = parse_or_throw(src);
    auto q = erase_at(p);
    for (int iter = 0; iter < 20; ++iter) {
      std::vector<std::int64_t> xs;
      for (int i = 0; i < 8; ++i) xs.push_back(static_cast<std::int64_t>(rng() % 7) - 2);
      auto in = inputs_of("x", xs);
      auto a = run(p, in, 8);
      auto b = run(q, in, 8);
      ASSERT_EQ(a.steps, b.steps) << src;
      ASSERT_EQ(run(p, in, 8).steps, a.steps);
    }
  }
}

// After k instants, `e1 fby e2` holds the value e2 had at instant k-1.
TEST(CentralProperty, FbyStateProgression) {
  auto p = parse_or_throw("y = 7 fby (x * 3);");
  std::mt19937 rng(5);
  DeclPtr d = p.main;
  std::int64_t prev = 0;
  for (int k = 0; k < 30; ++k) {
    std::int64_t x = static_cast<std::int64_t>(rng() % 100);
    auto [r, d2] = step_decl({{"x", Value::integer(x)}}, d);
    if (k > 0) EXPECT_EQ(r.at("y").as_int(), prev * 3);
    const auto* fby = d2->as<Decl::Eq>()->rhs->as<Expr::Fby>();
    ASSERT_NE(fby, nullptr);
    EXPECT_TRUE(equal(fby->init, make_int(x * 3)));
    prev = x;
    d = d2;
  }
}
