#include <catch2/catch_amalgamated.hpp>

#include "causalrep/generate.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/rng.hpp"
#include "fixtures.hpp"

using namespace causalrep;
using fixtures::asg;
using fixtures::chain_model;
using fixtures::chain_sig;
using fixtures::ctx_of;

namespace {
Signature xyz_sig() {
  return Signature::make({"U"}, {"X", "Y", "Z"},
                         {{"U", {0, 1}}, {"X", {0, 1}}, {"Y", {0, 1}}, {"Z", {0, 1, 2}}});
}
}  // namespace

TEST_CASE("formula parsing") {
  Signature sig = xyz_sig();
  SECTION("precedence: & binds tighter than |, ! tighter still") {
    Formula f = parse_formula("X=1 & !(Y=0 | Z=2)", sig);
    REQUIRE(f.kind() == Formula::Kind::And);
    CHECK(f.lhs().kind() == Formula::Kind::Eq);
    CHECK(f.lhs().var() == *sig.find("X"));
    CHECK(f.lhs().value() == 1);
    REQUIRE(f.rhs().kind() == Formula::Kind::Not);
    REQUIRE(f.rhs().lhs().kind() == Formula::Kind::Or);
  }
  SECTION("whitespace is free") {
    CHECK(to_string(parse_formula("X=1&Y=0", sig), sig) ==
          to_string(parse_formula("  X = 1 &   Y = 0 ", sig), sig));
  }
  SECTION("errors carry positions and names") {
    CHECK_THROWS_AS(parse_formula("Q=1", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("X=7", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("X=1 &", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("X=1 Y=0", sig), ParseError);
    CHECK_THROWS_WITH(parse_formula("Q=1", sig), Catch::Matchers::ContainsSubstring("Q"));
  }
}

TEST_CASE("action parsing") {
  Signature sig = xyz_sig();
  SECTION("if-then-else") {
    Action a = parse_action("if X=1 then do[Y:=0] else do[]", sig);
    REQUIRE_FALSE(a.is_primitive());
    CHECK(a.test().kind() == Formula::Kind::Eq);
    CHECK(a.then_branch().assignment().pairs().size() == 1);
    CHECK(a.else_branch().assignment().empty());
  }
  SECTION("if without else defaults to do[]") {
    Action a = parse_action("if X=1 then do[Y:=0]", sig);
    CHECK(a.else_branch().is_primitive());
    CHECK(a.else_branch().assignment().empty());
  }
  SECTION("interventions on exogenous variables are rejected") {
    CHECK_THROWS_AS(parse_action("do[U:=1]", sig), ParseError);
  }
  SECTION("other action errors") {
    CHECK_THROWS_AS(parse_action("do[X:=9]", sig), ParseError);
    CHECK_THROWS_AS(parse_action("do[X:=1, X:=0]", sig), ParseError);
    CHECK_THROWS_AS(parse_action("if X=1 then", sig), ParseError);
    CHECK_THROWS_AS(parse_action("do[X=1]", sig), ParseError);  // '=' vs ':='
  }
}

TEST_CASE("printer round trip") {
  Signature sig = xyz_sig();
  SplitMix64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    Formula f = gen_formula(rng, sig, 4);
    std::string printed = to_string(f, sig);
    CHECK(to_string(parse_formula(printed, sig), sig) == printed);
  }
  for (int i = 0; i < 200; ++i) {
    // random depth-2 actions
    Action p1 = Action::primitive(gen_assignment(rng, sig));
    Action p2 = Action::primitive(gen_assignment(rng, sig));
    Action inner = Action::conditional(gen_formula(rng, sig, 2), p1, p2);
    Action a = rng.below(2) == 0
                   ? Action::conditional(gen_formula(rng, sig, 2), inner, p1)
                   : inner;
    std::string printed = to_string(a, sig);
    CHECK(to_string(parse_action(printed, sig), sig) == printed);
  }
  SECTION("extended formulas") {
    ExtFormula f = parse_ext_formula("[X:=0, Z:=2](Y=0 | Z=1)", sig);
    CHECK(f.intervention.size() == 2);
    std::string printed = to_string(f, sig);
    CHECK(to_string(parse_ext_formula(printed, sig), sig) == printed);
    CHECK_THROWS_AS(parse_ext_formula("[U:=1](X=0)", sig), ParseError);
  }
}

TEST_CASE("atom_implies") {
  Signature sig = chain_sig();
  Atom a = fixtures::atom_of(sig, {1, 1, 1});
  CHECK(atom_implies(sig, a, parse_formula("X=1", sig)));
  CHECK_FALSE(atom_implies(sig, a, parse_formula("!(X=1)", sig)));
  for (std::uint64_t i = 0; i < sig.atom_count(); ++i)
    CHECK(atom_implies(sig, atom_at(sig, i), parse_formula("X=1 | !(X=1)", sig)));
}

TEST_CASE("satisfies") {
  CausalModel m = chain_model();
  const Signature& sig = m.signature();
  CHECK(satisfies(m, ctx_of(sig, {1}), parse_ext_formula("[X:=0](Y=0)", sig)));
  CHECK(satisfies(m, ctx_of(sig, {1}), parse_ext_formula("Y=1", sig)));
  SECTION("interventions are effective") {
    SplitMix64 rng(7);
    for (int round = 0; round < 50; ++round) {
      Assignment a = gen_assignment(rng, sig);
      for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
        for (auto [var, val] : a.pairs())
          CHECK(satisfies(m, context_at(sig, c), ExtFormula{a, Formula::eq(var, val)}));
      }
    }
  }
}

TEST_CASE("h compilation") {
  Signature sig = xyz_sig();
  SECTION("primitive actions are constant") {
    ExtensionalAction ext(parse_action("do[X:=0]", sig), sig);
    for (std::uint64_t i = 0; i < sig.atom_count(); ++i)
      CHECK(ext.at(i) == asg(sig, {{"X", 0}}));
  }
  SECTION("one-step dispatch") {
    ExtensionalAction ext(parse_action("if X=1 then do[X:=0] else do[]", sig), sig);
    for (std::uint64_t i = 0; i < sig.atom_count(); ++i) {
      Atom a = atom_at(sig, i);
      if (a.values[*sig.find("X")] == 1)
        CHECK(ext.at(i) == asg(sig, {{"X", 0}}));
      else
        CHECK(ext.at(i).empty());
    }
  }
  SECTION("nested conditionals unfold at one atom") {
    Action a = parse_action("if X=1 then (if Y=1 then do[Z:=0] else do[Z:=1]) else do[]", sig);
    ExtensionalAction ext(a, sig);
    for (std::uint64_t i = 0; i < sig.atom_count(); ++i) {
      Atom atom = atom_at(sig, i);
      // the direct interpreter is the oracle for the table
      CHECK(ext.at(i) == h_at(a, sig, atom));
      if (atom.values[*sig.find("X")] == 1 && atom.values[*sig.find("Y")] == 0)
        CHECK(ext.at(i) == asg(sig, {{"Z", 1}}));
    }
  }
}

TEST_CASE("beta") {
  CausalModel m = chain_model();
  const Signature& sig = m.signature();
  Action cond = parse_action("if X=1 then do[X:=0] else do[]", sig);
  CHECK(beta(m, cond, ctx_of(sig, {1})).values == std::vector<Value>{1, 0, 0});
  CHECK(beta(m, cond, ctx_of(sig, {0})).values == std::vector<Value>{0, 0, 0});
  SECTION("the trivial action returns the factual solution") {
    for (std::uint64_t c = 0; c < sig.context_count(); ++c)
      CHECK(beta(m, Action::nothing(), context_at(sig, c)) == solve(m, context_at(sig, c)));
  }
  SECTION("beta only reads the extensional form") {
    Action syntactic = parse_action("if X=1 then do[Y:=1] else do[Y:=1]", sig);
    Action plain = parse_action("do[Y:=1]", sig);
    REQUIRE(ExtensionalAction(syntactic, sig).key() == ExtensionalAction(plain, sig).key());
    for (std::uint64_t c = 0; c < sig.context_count(); ++c)
      CHECK(beta(m, syntactic, context_at(sig, c)) == beta(m, plain, context_at(sig, c)));
  }
  SECTION("context fidelity and effectiveness") {
    SplitMix64 rng(99);
    for (int round = 0; round < 40; ++round) {
      Assignment a = gen_assignment(rng, sig);
      for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
        Atom out = beta(m, Action::primitive(a), context_at(sig, c));
        CHECK(atom_context(sig, out) == context_at(sig, c));
        for (auto [var, val] : a.pairs()) CHECK(out.values[var] == val);
      }
    }
  }
}
