#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "sdf/diagnostics.hpp"
#include "sdf/parser.hpp"
#include "sdf/spatial_types.hpp"

using namespace sdf;

namespace {

const char* kLocalNodes = R"(
loc A; loc B; link A to B;
node f1(x) = x + 1;
node f2(x) = x * 2;
node f3(x) = x - 3;
)";

std::string with_locals(const std::string& rest) { return std::string(kLocalNodes) + rest; }

std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(SDF_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_code(const std::string& src) {
  try {
    infer_program(parse_or_throw(src));
  } catch (const CompileError& e) {
    return e.diagnostics().front().code;
  }
  return "";
}

std::string scheme_of(const ElaboratedProgram& el, const std::string& node) {
  return to_string(el.nodes.at(node).scheme);
}

auto A = Location::constant("A");
auto B = Location::constant("B");
auto I = local_base(BaseSort::Int);

}  // namespace

TEST(SpatialUnify, BindsTypeAndLocationVariables) {
  auto s = unify(type_at(local_var("'a"), Location::var("d")), type_at(I, A));
  EXPECT_EQ(to_string(s.types.at("'a")), "int");
  EXPECT_EQ(s.locs.at("d"), A);
}

TEST(SpatialUnify, DistinctConstantsClash) {
  try {
    unify(type_at(I, A), type_at(I, B));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TYPE001");
  }
}

TEST(SpatialUnify, LocatedProductSplitsIntoComponents) {
  auto d = Location::var("d"), d1 = Location::var("d1"), d2 = Location::var("d2");
  auto s = unify(type_at(local_prod(I, I), d), type_prod(type_at(I, d1), type_at(I, d2)));
  EXPECT_EQ(s.locs.size(), 2u);
  EXPECT_EQ(s.locs.at("d1"), d);
  EXPECT_EQ(s.locs.at("d2"), d);
}

TEST(SpatialUnify, ShapeClashAndOccursCheck) {
  try {
    unify(type_at(I, A), type_prod(type_at(I, A), type_at(I, A)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TYPE002");
  }
  try {
    unify(type_at(local_var("'a"), A), type_at(local_func(local_var("'a"), I), A));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TYPE003");
  }
}

TEST(SpatialEnv, OperatorSchemes) {
  auto env = initial_env();
  EXPECT_EQ(to_string(env.at("fby")), "forall 'a. forall d1. ('a@d1 * 'a@d1) -{d1}-> 'a@d1");
  EXPECT_EQ(to_string(env.at("+")), "forall d1. (int@d1 * int@d1) -{d1}-> int@d1");
  EXPECT_EQ(to_string(env.at("=")), "forall 'a. forall d1. ('a@d1 * 'a@d1) -{d1}-> bool@d1");
}

TEST(SpatialInstantiate, LocatedEnvironmentPinsLocalNode) {
  auto d = Location::var("d");
  Scheme f{{}, {"d"}, {}, type_func(type_at(I, d), {d}, type_at(I, d)), {}};
  EXPECT_EQ(to_string(instantiate(f, A).type), "int@A -{A}-> int@A");
  auto plain = instantiate(f, std::nullopt, 5);
  EXPECT_EQ(to_string(plain.type), "int@d5 -{d5}-> int@d5");
}

TEST(SpatialInstantiate, ChannelsGetFreshNamesInOrder) {
  auto d1 = Location::var("d1"), d2 = Location::var("d2");
  Scheme h{{}, {"d1", "d2"}, {{d1, d2}}, type_func(type_at(I, d1), {d1, d2}, type_at(I, d2)),
           {{"c$1", d1, d2, I}, {"c$2", d2, d1, I}}};
  auto a = instantiate(h, std::nullopt, 1);
  auto b = instantiate(h, std::nullopt, 3);
  EXPECT_EQ(a.chans[0].name, "c$1");
  EXPECT_EQ(a.chans[1].name, "c$2");
  EXPECT_EQ(b.chans[0].name, "c$3");
  EXPECT_EQ(b.chans[1].name, "c$4");
  ASSERT_EQ(b.constraints.size(), 1u);
  EXPECT_EQ(b.constraints[0].lhs, Location::var("d3"));
}

TEST(SpatialInstantiate, MultiLocationNodeCannotBeLocated) {
  Scheme g{{}, {}, {}, type_func(type_at(I, A), {A, B}, type_at(I, B)), {}};
  try {
    instantiate(g, A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TYPE004");
  }
}

TEST(SpatialInfer, LocalNodeIsLocationPolymorphic) {
  auto el = infer_program(parse_or_throw("node id(x) = x; node inc(x) = x + 1;"));
  EXPECT_EQ(scheme_of(el, "id"), "forall 'a. forall d1. 'a@d1 -{d1}-> 'a@d1");
  EXPECT_EQ(scheme_of(el, "inc"), "forall d1. int@d1 -{d1}-> int@d1");
  EXPECT_TRUE(el.nodes.at("inc").scheme.constraints.empty());
  EXPECT_TRUE(el.nodes.at("inc").chans.empty());
}

TEST(SpatialInfer, ChainAcrossTwoLocations) {
  auto el = infer_program(parse_or_throw(with_locals(R"(
node g(x) = y3 with
      y1 = f1(x) at A
  and y2 = f2(y1)
  and y3 = f3(y2) at B;
)")));
  EXPECT_EQ(scheme_of(el, "g"), "int@A -{A,B}-> int@B");
  const auto& chans = el.nodes.at("g").chans;
  ASSERT_EQ(chans.size(), 1u);
  EXPECT_EQ(to_string(chans[0]), "c$1: A -> B (int)");
  // the unlocated middle stage stays with its producer
  EXPECT_EQ(to_string(el.nodes.at("g").vars.at("y2")), "int@A");
}

TEST(SpatialInfer, ChainAgainstTheLinkIsRejected) {
  EXPECT_EQ(first_code(with_locals(R"(
node g(x) = y3 with
      y1 = f1(x) at B
  and y2 = f2(y1)
  and y3 = f3(y2) at A;
)")),
            "TYPE007");
}

TEST(SpatialInfer, MultiLocationNodeInLocatedDeclaration) {
  EXPECT_EQ(first_code(with_locals(R"(
node g(m, x) = y3 with
      y1 = f1(x) at A
  and y3 = f3(y1) at B;
node g2(m, x) = y with y = g(m, x) at A;
)")),
            "TYPE004");
}

TEST(SpatialInfer, HigherOrderNodeWithLocationParameters) {
  auto el = infer_program(parse_or_throw(with_locals(R"(
node h[d1, d2](f, g, x) = z with
      y = f(x) at d1
  and z = g(y) at d2;
y1 = h(f1 at A, f2 at A, x1)
and y2 = h(f1 at A, f2 at B, x2);
)")));
  EXPECT_EQ(scheme_of(el, "h"),
            "forall 'a 'b 'c. forall d1 d2 : {d1~>d2}. "
            "(('a@d1 -{d1}-> 'b@d1) * ('b@d2 -{d2}-> 'c@d2) * 'a@d1) -{d1,d2}-> 'c@d2");
  const auto& h = el.nodes.at("h");
  ASSERT_EQ(h.chans.size(), 1u);
  EXPECT_EQ(to_string(h.chans[0]), "c$1: d1 -> d2 ('b)");
  EXPECT_EQ(h.loc_params.at("d2"), Location::var("d2"));
  EXPECT_EQ(to_string(el.main_vars.at("y1")), "int@A");
  EXPECT_EQ(to_string(el.main_vars.at("y2")), "int@B");
  // only the second instance communicates
  ASSERT_EQ(el.main_chans.size(), 1u);
  EXPECT_EQ(to_string(el.main_chans[0]), "c$1: A -> B (int)");
  auto main = flatten_and(el.program.main);
  EXPECT_EQ(el.info(main[0]).loc_instance.at("d2"), A);
  EXPECT_EQ(el.info(main[1]).loc_instance.at("d2"), B);
  EXPECT_TRUE(el.info(main[0]).chan_renaming.empty());
  EXPECT_EQ(el.info(main[1]).chan_renaming.at("c$1"), "c$1");
}

TEST(SpatialInfer, MissingBackLinkRejectsProgram) {
  EXPECT_EQ(first_code("loc A; loc B; link A to B; y = (x + 1) at B and z = (y * 2) at A;"), "TYPE007");
  EXPECT_EQ(first_code("loc A; loc B; link A to B; link B to A; y = (x + 1) at B and z = (y * 2) at A;"), "");
}

TEST(SpatialInfer, SoftwareRadio) {
  auto el = infer_program(parse_or_throw(read_corpus("multichannel_sdr.sdf")));
  EXPECT_EQ(scheme_of(el, "multichannel_sdr"), "int@FPGA -{FPGA,DSP,GPP}-> int@GPP");
  EXPECT_EQ(scheme_of(el, "channel"),
            "forall 'a 'b 'c 'd. (('a@FPGA -{FPGA}-> 'b@FPGA) * ('b@DSP -{DSP}-> 'c@DSP) * "
            "('c@GPP -{GPP}-> 'd@GPP) * 'a@FPGA) -{FPGA,DSP,GPP}-> 'd@GPP");
  EXPECT_EQ(to_string(el.main_vars.at("x")), "int@FPGA");
  EXPECT_EQ(to_string(el.main_vars.at("y")), "int@GPP");
  const auto& sdr = el.nodes.at("multichannel_sdr");
  // the condition is computed at GPP and broadcast to the other two
  auto body = flatten_and(el.program.find_node("multichannel_sdr")->body_decls);
  const DeclPtr& cond = body[1];
  ASSERT_TRUE(cond->is<Decl::If>());
  const auto& info = el.info(cond);
  EXPECT_EQ(info.cond_loc, Location::constant("GPP"));
  int sent = 0;
  for (const auto& [to, chan] : info.broadcast) sent += chan.has_value();
  EXPECT_EQ(sent, 2);
  for (const auto& c : sdr.chans) {
    EXPECT_NE(c.from, c.to);
    EXPECT_TRUE(el.arch.has_link(c.from.name, c.to.name));
  }
}

TEST(SpatialInfer, Diagnostics) {
  EXPECT_EQ(first_code("loc A; y = x at C;"), "TYPE005");
  EXPECT_EQ(first_code("loc A; if c then y = 1 else z = 2;"), "TYPE006");
  EXPECT_EQ(first_code("y = 1 + true;"), "TYPE002");
  EXPECT_EQ(first_code("y = z(1);"), "TYPE010");
  EXPECT_EQ(first_code("y = 1 and y = 2;"), "TYPE011");
}

TEST(SpatialInfer, DiagnosticCarriesSpan) {
  try {
    infer_program(parse_or_throw("loc A;\ny = x at C;"));
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_EQ(e.diagnostics().front().span.line, 2);
  }
}

// Every communication point of an accepted program lies on a declared link.
TEST(SpatialProperty, CommunicationsFollowLinks) {
  std::mt19937 rng(11);
  const char* locs[] = {"A", "B", "C"};
  int accepted = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::string src = "loc A; loc B; loc C;";
    for (auto* a : locs)
      for (auto* b : locs)
        if (a != b && rng() % 2) src += std::string(" link ") + a + " to " + b + ";";
    src += " v0 = x at " + std::string(locs[rng() % 3]);
    for (int k = 1; k < 5; ++k) {
      std::string prev = "v" + std::to_string(rng() % k);
      src += " and v" + std::to_string(k) + " = (" + prev + " + 1)";
      if (rng() % 2) src += std::string(" at ") + locs[rng() % 3];
    }
    src += ";";
    ElaboratedProgram el;
    try {
      el = infer_program(parse_or_throw(src));
    } catch (const CompileError& e) {
      EXPECT_EQ(e.diagnostics().front().code, "TYPE007") << src;
      continue;
    }
    ++accepted;
    for (const auto& [e, c] : el.comms) {
      EXPECT_TRUE(el.arch.reaches(c.from.name, c.to.name)) << src;
      EXPECT_EQ(c.channel.has_value(), c.from != c.to) << src;
    }
    for (const auto& c : el.main_chans) EXPECT_TRUE(el.arch.has_link(c.from.name, c.to.name)) << src;
  }
  EXPECT_GT(accepted, 20);
}

// Typing an already elaborated program again gives the same schemes.
TEST(SpatialProperty, InferenceIsIdempotent) {
  for (const char* name : {"multichannel_sdr.sdf"}) {
    auto p = parse_or_throw(read_corpus(name));
    auto a = infer_program(p);
    auto b = infer_program(parse_or_throw(pretty_print(p)));
    for (const auto& [n, el] : a.nodes) EXPECT_EQ(to_string(el.scheme), to_string(b.nodes.at(n).scheme)) << n;
    for (const auto& [x, t] : a.main_vars) EXPECT_EQ(to_string(t), to_string(b.main_vars.at(x))) << x;
  }
}
