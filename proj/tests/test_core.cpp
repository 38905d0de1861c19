#include <catch2/catch_amalgamated.hpp>

#include "causalrep/core.hpp"
#include "causalrep/generate.hpp"
#include "causalrep/rng.hpp"
#include "fixtures.hpp"

using namespace causalrep;
using fixtures::asg;
using fixtures::chain_model;
using fixtures::chain_sig;
using fixtures::ctx_of;

TEST_CASE("signature validation") {
  CHECK_THROWS_AS(Signature::make({}, {"X"}, {{"X", {0}}}), ModelError);
  CHECK_THROWS_AS(Signature::make({"U"}, {"U"}, {{"U", {0}}}), ModelError);
  CHECK_THROWS_AS(Signature::make({"U"}, {}, {{"U", {}}}), ModelError);
  CHECK_THROWS_AS(Signature::make({"U"}, {}, {{"U", {0, 0}}}), ModelError);
  CHECK_THROWS_AS(Signature::make({"U"}, {}, {{"U", {0}}, {"X", {0}}}), ModelError);
  Signature sig = Signature::make({"U"}, {"X"}, {{"U", {0, 1}}, {"X", {3, 5}}});
  CHECK(sig.var_count() == 2);
  CHECK(sig.range_index(*sig.find("X"), 5) == 1);
  CHECK(sig.range_index(*sig.find("X"), 4) == -1);
  // single-valued ranges are allowed: such variables are constants
  CHECK_NOTHROW(Signature::make({"U"}, {}, {{"U", {7}}}));
}

TEST_CASE("recursivity check") {
  SECTION("chain has dependency order X, Y") {
    RecursivityCheck r = check_recursive(chain_model());
    REQUIRE(r.recursive());
    const Signature& sig = chain_model().signature();
    REQUIRE(r.order.size() == 2);
    CHECK(r.order[0] == *sig.find("X"));
    CHECK(r.order[1] == *sig.find("Y"));
  }
  SECTION("mutual parents form a two-cycle") {
    Signature sig = Signature::make({"U"}, {"X", "Y"},
                                    {{"U", {0, 1}}, {"X", {0, 1}}, {"Y", {0, 1}}});
    Equation fx{*sig.find("X"), {*sig.find("Y")}, {0, 1}};
    Equation fy{*sig.find("Y"), {*sig.find("X")}, {0, 1}};
    CausalModel m = CausalModel::make(sig, {fx, fy});
    RecursivityCheck r = check_recursive(m);
    REQUIRE_FALSE(r.recursive());
    std::vector<VarId> cycle = r.cycle;
    std::sort(cycle.begin(), cycle.end());
    CHECK(cycle == std::vector<VarId>{*sig.find("X"), *sig.find("Y")});
    CHECK_THROWS_AS(solve(m, ctx_of(sig, {0})), ModelError);
  }
  SECTION("no endogenous variables: empty order") {
    Signature sig = Signature::make({"U"}, {}, {{"U", {0, 1}}});
    CausalModel m = CausalModel::make(sig, {});
    CHECK(check_recursive(m).recursive());
    CHECK(check_recursive(m).order.empty());
  }
}

TEST_CASE("solve") {
  CausalModel m = chain_model();
  const Signature& sig = m.signature();
  CHECK(solve(m, ctx_of(sig, {1})).values == std::vector<Value>{1, 1, 1});
  CHECK(solve(m, ctx_of(sig, {0})).values == std::vector<Value>{0, 0, 0});

  SECTION("negation equation, checked against the equation oracle") {
    // F_X(u) = u, F_Y(u, x) = 1 - x
    Signature s2 = chain_sig();
    Equation fx{*s2.find("X"), {*s2.find("U")}, {0, 1}};
    Equation fy{*s2.find("Y"), {*s2.find("U"), *s2.find("X")}, {0, 1, 0, 1}};
    // rows ordered (U,X): (0,0)->.., (0,1).., (1,0).., (1,1)..: want 1-x
    fy.table = {1, 0, 1, 0};
    CausalModel m2 = CausalModel::make(s2, {fx, fy});
    Atom a = solve(m2, ctx_of(s2, {1}));
    CHECK(a.values == std::vector<Value>{1, 1, 0});
    // the returned atom is the unique one satisfying every equation
    int satisfying = 0;
    for (std::uint64_t i = 0; i < s2.atom_count(); ++i) {
      Atom cand = atom_at(s2, i);
      if (cand.values[0] != 1) continue;
      bool ok = true;
      for (int e = 0; e < s2.endo_count(); ++e) {
        VarId v = s2.endo_id(e);
        if (m2.eval_equation(v, cand.values) != cand.values[v]) ok = false;
      }
      if (ok) {
        ++satisfying;
        CHECK(cand == a);
      }
    }
    CHECK(satisfying == 1);
  }
}

TEST_CASE("intervention submodels") {
  CausalModel m = chain_model();
  const Signature& sig = m.signature();
  SECTION("do[X:=0] cuts the chain") {
    CausalModel sub = intervene(m, asg(sig, {{"X", 0}}));
    CHECK(solve(sub, ctx_of(sig, {1})).values == std::vector<Value>{1, 0, 0});
    CHECK(sub.recursive());
  }
  SECTION("empty intervention changes nothing") {
    CausalModel sub = intervene(m, Assignment{});
    for (std::uint64_t c = 0; c < sig.context_count(); ++c)
      CHECK(solve(sub, context_at(sig, c)) == solve(m, context_at(sig, c)));
  }
  SECTION("do[Y:=1] leaves X alone") {
    CausalModel sub = intervene(m, asg(sig, {{"Y", 1}}));
    CHECK(solve(sub, ctx_of(sig, {0})).values == std::vector<Value>{0, 0, 1});
  }
  SECTION("assignments reject exogenous and unknown variables") {
    CHECK_THROWS_AS(Assignment::make(sig, {{*sig.find("U"), 0}}), ModelError);
    CHECK_THROWS_AS(Assignment::make(sig, {{17, 0}}), ModelError);
    CHECK_THROWS_AS(Assignment::make(sig, {{*sig.find("X"), 9}}), ModelError);
    CHECK_THROWS_AS(Assignment::make(sig, {{*sig.find("X"), 0}, {*sig.find("X"), 1}}), ModelError);
  }
  SECTION("solve_do agrees with solving the materialized submodel") {
    SplitMix64 rng(11);
    for (int round = 0; round < 20; ++round) {
      Assignment a = gen_assignment(rng, sig);
      CausalModel sub = intervene(m, a);
      for (std::uint64_t c = 0; c < sig.context_count(); ++c)
        CHECK(solve_do(m, context_at(sig, c), a) == solve(sub, context_at(sig, c)));
    }
  }
}

TEST_CASE("enumeration") {
  Signature s1 = chain_sig();
  CHECK(s1.atom_count() == 8);
  CHECK(s1.context_count() == 2);
  CHECK(all_atoms(s1).size() == 8);
  CHECK(all_contexts(s1).size() == 2);

  Signature s2 = Signature::make({"U"}, {}, {{"U", {0, 1}}});
  CHECK(all_atoms(s2).size() == 2);

  Signature s3 = Signature::make({"U"}, {"X"}, {{"U", {0, 1}}, {"X", {0, 1, 2}}});
  CHECK(all_atoms(s3).size() == 6);

  CHECK_THROWS_AS(all_atoms(s1, 4), SizeError);

  SECTION("lexicographic order and index round trip") {
    std::vector<Atom> atoms = all_atoms(s3);
    for (std::uint64_t i = 0; i < atoms.size(); ++i)
      CHECK(atom_index(s3, atoms[i]) == i);
    // first variable is most significant
    CHECK(atoms[0].values == std::vector<Value>{0, 0});
    CHECK(atoms[1].values == std::vector<Value>{0, 1});
    CHECK(atoms[3].values == std::vector<Value>{1, 0});
    for (std::uint64_t c = 0; c < s3.context_count(); ++c)
      CHECK(context_index(s3, context_at(s3, c)) == c);
  }
}

TEST_CASE("intervention algebra properties") {
  GenCaps caps;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    GeneratedInstance inst = make_instance(mix_seed(400, seed), caps, false);
    const CausalModel& m = inst.rep.model;
    const Signature& sig = m.signature();
    SplitMix64 rng(seed);
    Assignment a = gen_assignment(rng, sig);
    CausalModel once = intervene(m, a);
    CausalModel twice = intervene(once, a);
    Assignment b = gen_assignment(rng, sig);
    std::vector<std::pair<VarId, Value>> b_pairs;
    for (auto [v, val] : b.pairs())
      if (!a.contains(v)) b_pairs.emplace_back(v, val);
    Assignment b_disjoint = Assignment::make(sig, b_pairs);
    CausalModel ab = intervene(intervene(m, a), b_disjoint);
    CausalModel ba = intervene(intervene(m, b_disjoint), a);
    for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
      Context ctx = context_at(sig, c);
      CHECK(solve(twice, ctx) == solve(once, ctx));       // idempotence
      CHECK(solve(ab, ctx) == solve(ba, ctx));            // commutativity on disjoint sets
      // centering: re-imposing factual values is a no-op
      Atom factual = solve(m, ctx);
      std::vector<VarId> endo;
      for (int i = 0; i < sig.endo_count(); ++i) endo.push_back(sig.endo_id(i));
      std::uint64_t subsets = std::uint64_t{1} << endo.size();
      for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        std::vector<std::pair<VarId, Value>> pairs;
        for (std::size_t k = 0; k < endo.size(); ++k)
          if (mask & (std::uint64_t{1} << k)) pairs.emplace_back(endo[k], factual.values[endo[k]]);
        CHECK(solve_do(m, ctx, Assignment::make(sig, pairs)) == factual);
      }
    }
  }
}

TEST_CASE("strict parent audit") {
  Signature sig = chain_sig();
  Equation fx{*sig.find("X"), {*sig.find("U")}, {0, 1}};
  // Y declares X as parent but ignores it
  Equation fy{*sig.find("Y"), {*sig.find("U"), *sig.find("X")}, {0, 0, 1, 1}};
  CausalModel m = CausalModel::make(sig, {fx, fy});
  auto unused = audit_insensitive_parents(m);
  REQUIRE(unused.size() == 1);
  CHECK(unused[0].first == *sig.find("Y"));
  CHECK(unused[0].second == *sig.find("X"));
  CHECK(audit_insensitive_parents(chain_model()).empty());
}

TEST_CASE("equation table validation") {
  Signature sig = chain_sig();
  Equation fx{*sig.find("X"), {*sig.find("U")}, {0, 1, 0}};  // wrong row count
  CHECK_THROWS_AS(CausalModel::make(sig, {fx, fx}), ModelError);
  Equation ok_x{*sig.find("X"), {*sig.find("U")}, {0, 1}};
  Equation bad_y{*sig.find("Y"), {*sig.find("X")}, {0, 9}};  // out of range
  CHECK_THROWS_AS(CausalModel::make(sig, {ok_x, bad_y}), ModelError);
  Equation self{*sig.find("Y"), {*sig.find("Y")}, {0, 1}};
  CHECK_THROWS_AS(CausalModel::make(sig, {ok_x, self}), ModelError);
}
