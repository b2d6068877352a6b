#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "sdf/diagnostics.hpp"
#include "sdf/inline.hpp"
#include "sdf/interp_dist.hpp"
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

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

bool has_application(const DeclPtr& d) {
  if (d->is<Decl::App>()) return true;
  if (const auto* a = d->as<Decl::And>()) return has_application(a->left) || has_application(a->right);
  if (const auto* c = d->as<Decl::If>()) return has_application(c->then_branch) || has_application(c->else_branch);
  return false;
}

}  // namespace

TEST(DistValues, LocationsAndErasure) {
  auto p = DistValue::pair(DistValue::located(Value::integer(1), A), DistValue::located(Value::integer(2), B));
  EXPECT_EQ(loc_of(p), (std::set<Location>{A, B}));
  EXPECT_EQ(loc_of(DistValue::located(Value::integer(1), A)), std::set<Location>{A});
  auto same = DistValue::located(Value::pair(Value::integer(1), Value::integer(2)), A);
  ASSERT_TRUE(same.is_pair());
  EXPECT_EQ(loc_of(same), std::set<Location>{A});
  EXPECT_EQ(erase(p), Value::pair(Value::integer(1), Value::integer(2)));
  EXPECT_EQ(erase(DistValue::located(Value::integer(1), A)), Value::integer(1));
  DistEnv env{{"a", p}, {"b", same}};
  EXPECT_EQ(erase(env).size(), 2u);
  NodeDef n;
  EXPECT_EQ(code_of([&] { loc_of(DistValue::node(&n)); }), "DIST001");
}

TEST(Inline, ApplicationsDisappearAndBehaviourIsKept) {
  auto p = parse_or_throw(read_corpus("multichannel_sdr.sdf"));
  auto el = infer_program(p);
  auto q = inline_program(el, [](const Ident&) { return false; });
  EXPECT_FALSE(has_application(q.main));
  EXPECT_NO_THROW(infer_program(q));
  auto in = int_inputs("x", {0, 3, -4, 0, 7, 1});
  auto inlined = run(q, in, 6), source = run(p, in, 6);
  ASSERT_EQ(inlined.steps.size(), source.steps.size());
  for (size_t k = 0; k < source.steps.size(); ++k) EXPECT_EQ(inlined.steps[k].at("y"), source.steps[k].at("y"));
}

TEST(Inline, LocationParametersTakeTheChosenLocations) {
  auto p = parse_or_throw(R"(
loc A; loc B; link A to B;
node inc(x) = x + 1;
node h[d1, d2](f, g, x) = z with
      y = f(x) at d1
  and z = g(y) at d2;
y2 = h(inc at A, inc at B, x2);
)");
  auto q = inline_program(infer_program(p), [](const Ident&) { return false; });
  auto text = pretty_print(q);
  text = text.substr(text.find("\nx$i"));
  EXPECT_EQ(text.find("d1"), std::string::npos) << text;
  EXPECT_NE(text.find("at B"), std::string::npos) << text;
  auto el = infer_program(q);
  EXPECT_EQ(to_string(el.main_vars.at("y2")), "int@B");
}

TEST(Inline, KeptNodesStayCalls) {
  auto p = parse_or_throw(kNodeF);
  auto q = inline_program(infer_program(p), [](const Ident& n) { return n != "f"; });
  auto leaves = flatten_and(q.main);
  int calls = 0;
  for (const auto& d : leaves)
    if (const auto* app = d->as<Decl::App>()) {
      ++calls;
      EXPECT_TRUE(app->callee == "g" || app->callee == "h");
      EXPECT_TRUE(app->at.has_value());
    }
  EXPECT_EQ(calls, 2);
}

TEST(RunDist, NodeAcrossTwoLocations) {
  auto p = parse_or_throw(kNodeF);
  auto in = int_inputs("x", {1, 2, 3});
  auto t = run_dist(p, in, 3);
  ASSERT_EQ(t.steps.size(), 3u);
  for (const auto& s : t.steps) {
    EXPECT_EQ(s.locs, (std::set<Location>{A, B}));
    EXPECT_EQ(loc_of(s.env.at("z")), std::set<Location>{B});
  }
  EXPECT_EQ(erase(t.steps[2].env.at("z")), Value::integer(8));
  auto c = run(p, in, 3);
  for (size_t k = 0; k < 3; ++k) EXPECT_EQ(erase(t.steps[k].env), c.steps[k]);
}

TEST(RunDist, OperandsOnDifferentLocations) {
  auto el = prepare_dist(parse_or_throw("loc A; loc B; link A to B; y = 1 at A and z = (y + 2) at B;"));
  el.comms.clear();
  DistMachine m(el, el.program.main);
  EXPECT_EQ(code_of([&] { m.step({}); }), "DIST003");
}

TEST(RunDist, MissingLinkAtRunTime) {
  auto el = prepare_dist(parse_or_throw("loc A; loc B; link A to B; y = 1 at A and z = (y + 2) at B;"));
  ArchGraph g;
  g.add_location("A");
  g.add_location("B");
  el.arch = g;
  DistMachine m(el, el.program.main);
  EXPECT_EQ(code_of([&] { m.step({}); }), "DIST002");
}

TEST(RunDist, ComputationEscapingItsLocation) {
  auto el = prepare_dist(parse_or_throw("loc A; loc B; link A to B; y = 1 at A and z = y at B;"));
  el.comms.clear();
  DistMachine m(el, el.program.main);
  EXPECT_EQ(code_of([&] { m.step({}); }), "DIST004");
}

TEST(RunDist, SoftwareRadioTouchesAllThreeLocations) {
  auto p = parse_or_throw(read_corpus("multichannel_sdr.sdf"));
  auto in = int_inputs("x", {0, 0, 0, 0});
  auto t = run_dist(p, in, 4);
  auto c = run(p, in, 4);
  for (size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(erase(t.steps[k].env), c.steps[k]);
    EXPECT_EQ(t.steps[k].locs.size(), 3u);
    EXPECT_EQ(loc_of(t.steps[k].env.at("y")), std::set<Location>{Location::constant("GPP")});
  }
}

// Erasing the distributed run gives the centralized run, and each output
// lives where typing placed it.
TEST(DistProperty, ErasureMatchesCentralRun) {
  std::mt19937 rng(5);
  const char* locs[] = {"A", "B", "C"};
  int checked = 0;
  for (int iter = 0; iter < 150; ++iter) {
    std::string src = "loc A; loc B; loc C; link A to B; link B to C; link A to C; link C to A;";
    src += " node inc(x) = x + 1;";
    src += " v0 = x at " + std::string(locs[rng() % 3]);
    for (int k = 1; k < 6; ++k) {
      std::string prev = "v" + std::to_string(rng() % k);
      std::string rhs;
      switch (rng() % 4) {
        case 0: rhs = "(" + prev + " + 1)"; break;
        case 1: rhs = "(0 fby " + prev + ")"; break;
        case 2: rhs = "(" + prev + " * v0)"; break;
        default: rhs = "inc(" + prev + ")"; break;
      }
      src += " and v" + std::to_string(k) + " = " + rhs;
      if (rng() % 2) src += std::string(" at ") + locs[rng() % 3];
    }
    src += ";";
    Program p = parse_or_throw(src);
    ElaboratedProgram el;
    try {
      el = infer_program(p);
    } catch (const CompileError&) {
      continue;
    }
    std::vector<std::int64_t> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(static_cast<std::int64_t>(rng() % 9) - 4);
    auto in = int_inputs("x", xs);
    auto c = run(p, in, 5);
    auto d = run_dist(p, in, 5);
    for (size_t k = 0; k < 5; ++k) {
      ASSERT_EQ(erase(d.steps[k].env), c.steps[k]) << src;
      for (const auto& [x, v] : d.steps[k].env) {
        auto expected = locations(el.main_vars.at(x));
        EXPECT_EQ(loc_of(v), std::set<Location>(expected.begin(), expected.end())) << src << " " << x;
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(DistValues, Inhabits) {
  auto int_at = [](const Location& l) { return type_at(local_base(BaseSort::Int), l); };
  EXPECT_TRUE(inhabits(DistValue::located(Value::integer(1), A), int_at(A)));
  EXPECT_FALSE(inhabits(DistValue::located(Value::integer(1), B), int_at(A)));
  EXPECT_FALSE(inhabits(DistValue::located(Value::boolean(true), A), int_at(A)));
  EXPECT_TRUE(inhabits(DistValue(), int_at(A)));
  auto p = DistValue::pair(DistValue::located(Value::integer(1), A), DistValue::located(Value::integer(2), B));
  EXPECT_TRUE(inhabits(p, type_prod(int_at(A), int_at(B))));
  EXPECT_FALSE(inhabits(p, type_prod(int_at(B), int_at(A))));
  EXPECT_FALSE(inhabits(p, int_at(A)));
}
