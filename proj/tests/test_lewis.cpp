#include <catch2/catch_amalgamated.hpp>

#include "causalrep/construct.hpp"
#include "causalrep/generate.hpp"
#include "causalrep/lewis.hpp"
#include "fixtures.hpp"

using namespace causalrep;
using fixtures::asg;
using fixtures::chain_model;
using fixtures::chain_rep_injective;
using fixtures::chain_sig;

TEST_CASE("lewis satisfaction on a hand-built model") {
  Signature sig = chain_sig();
  // three worlds over (U, X, Y)
  std::vector<Atom> interp = {
      fixtures::atom_of(sig, {0, 1, 0}),  // world 0
      fixtures::atom_of(sig, {0, 0, 1}),  // world 1: closest Y=1 world to 0
      fixtures::atom_of(sig, {1, 1, 1}),  // world 2
  };
  // from any base, closeness is world distance |base - w| with ties toward
  // lower ids; encode as rank
  auto rank = [](LewisModel::WorldId base, LewisModel::WorldId w) -> std::uint64_t {
    long d = base > w ? base - w : w - base;
    return static_cast<std::uint64_t>(2 * d + (w < base ? 1 : 0));
  };
  LewisModel m(sig, interp, rank);

  SECTION("plain formulas read the world's valuation") {
    CHECK(lewis_satisfies(m, 0, parse_ext_formula("X=1 & Y=0", sig)));
    CHECK_FALSE(lewis_satisfies(m, 0, parse_ext_formula("Y=1", sig)));
  }
  SECTION("interventions jump to the closest satisfying world") {
    // closest Y=1 world to world 0 is world 1, where X=0
    CHECK(lewis_satisfies(m, 0, parse_ext_formula("[Y:=1](X=0)", sig)));
    CHECK_FALSE(lewis_satisfies(m, 0, parse_ext_formula("[Y:=1](X=1)", sig)));
  }
  SECTION("the set value holds at the closest world") {
    for (LewisModel::WorldId w = 0; w < m.world_count(); ++w)
      CHECK(lewis_satisfies(m, w, parse_ext_formula("[Y:=1](Y=1)", sig)));
  }
  SECTION("no closest world") {
    // no world satisfies X=0, Y=0
    CHECK_THROWS_AS(lewis_satisfies(m, 0, parse_ext_formula("[X:=0, Y:=0](Y=0)", sig)),
                    NoClosestWorldError);
  }
  SECTION("centering on a single-world model") {
    LewisModel single(sig, {fixtures::atom_of(sig, {0, 1, 0})},
                      [](LewisModel::WorldId, LewisModel::WorldId) { return 0; });
    CHECK(lewis_satisfies(single, 0, parse_ext_formula("[X:=1](X=1 & Y=0)", sig)));
  }
}

TEST_CASE("causal_to_lewis agrees with the model at factual worlds") {
  for (int which = 0; which < 2; ++which) {
    CausalModel m = which == 0 ? chain_model() : fixtures::chain4_model();
    const Signature& sig = m.signature();
    LewisModel lm = causal_to_lewis(m);
    std::vector<VarId> endo;
    for (int i = 0; i < sig.endo_count(); ++i) endo.push_back(sig.endo_id(i));
    for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
      Context ctx = context_at(sig, c);
      LewisModel::WorldId w = static_cast<LewisModel::WorldId>(atom_index(sig, solve(m, ctx)));
      detail::for_each_assignment(sig, endo, [&](const Assignment& a) {
        for (VarId x : endo) {
          for (Value v : sig.range(x)) {
            ExtFormula f{a, Formula::eq(x, v)};
            CHECK(lewis_satisfies(lm, w, f) == satisfies(m, ctx, f));
          }
        }
      });
      // plain formulas agree immediately; the trivial intervention too
      SplitMix64 rng(c);
      ExtFormula plain{Assignment{}, gen_formula(rng, sig, 3)};
      CHECK(lewis_satisfies(lm, w, plain) == satisfies(m, ctx, plain));
    }
  }
}

TEST_CASE("pair-world lift") {
  Representation rep = chain_rep_injective();
  EuOracle oracle(rep);
  const Signature& sig = oracle.signature();
  SplitMix64 fam_rng(5);
  CheckAllResult check = check_all(oracle, gen_action_family(fam_rng, sig, GenCaps{}));
  REQUIRE(check.all_pass);
  VarOrder vo = linearize_affects(sig, check.graph, default_choices(sig));
  ValueOrders vals(sig);
  AtomCloseness closeness = pref_closeness(oracle, vo, vals);
  std::uint64_t n = sig.atom_count();
  std::vector<std::vector<std::uint32_t>> ranks;
  for (std::uint64_t i = 0; i < n; ++i) ranks.push_back(closeness.ranks(atom_at(sig, i)));
  LewisModel pm = build_pref_lewis(ranks, sig);

  SECTION("centering: (a, a) is the minimum from (a, a')") {
    for (std::uint64_t a = 0; a < n; ++a) {
      for (std::uint64_t a2 = 0; a2 < n; ++a2) {
        LewisModel::WorldId base = pair_world_id(n, PairWorld{a, a2});
        LewisModel::WorldId center = pair_world_id(n, PairWorld{a, a});
        for (LewisModel::WorldId w = 0; w < pm.world_count(); ++w)
          if (w != center) CHECK(pm.rank(base, center) < pm.rank(base, w));
      }
    }
  }
  SECTION("closest pair: first component is the closest atom, second the base") {
    SplitMix64 rng(17);
    for (int round = 0; round < 30; ++round) {
      Assignment a = gen_assignment(rng, sig);
      std::uint64_t ai = rng.below(n);
      std::uint64_t aj = rng.below(n);
      Atom base = atom_at(sig, ai);
      LewisModel::WorldId from = pair_world_id(n, PairWorld{ai, aj});
      PairWorld closest = pair_world_at(n, pm.closest(from, a));
      CHECK(closest.origin == ai);
      CHECK(atom_at(sig, closest.current) == closeness.min_satisfying(base, a));
      // the minimal first component is the argmin over satisfying atoms
      CHECK(atom_at(sig, closest.current) == closeness.min_satisfying_scan(base, a));
      if (ai == aj) {
        bool already = true;
        for (auto [var, val] : a.pairs())
          if (base.values[var] != val) already = false;
        if (already) CHECK(closest.current == ai);  // centering clause
      }
    }
  }
}
