#pragma once

// Hand-built preference sources that each violate exactly one axiom.

#include <memory>

#include "causalrep/prefs.hpp"
#include "fixtures.hpp"

namespace controls {

using namespace causalrep;

inline Signature ux_sig() {
  return Signature::make({"U"}, {"X"}, {{"U", {0, 1}}, {"X", {0, 1}}});
}

// A1: a strict preference between two extensionally equal actions (the n = 1
// cancellation instance). Everything else is mutually indifferent, so the
// remaining axioms pass vacuously.
inline TableSource a1_table() {
  Signature sig = ux_sig();
  Action tautology_guarded = parse_action("if U=0 | !(U=0) then do[X:=1] else do[]", sig);
  Action plain = parse_action("do[X:=1]", sig);
  return fixtures::score_table(
      sig, [](const Atom&, const Assignment&) { return 0; },
      {{tautology_guarded, 1}, {plain, 0}});
}

// A1 again, as a synthetic oracle with a three-way strict cycle among
// primitives; all other comparisons are indifferent.
inline std::shared_ptr<PreferenceSource> a1_cycle_oracle() {
  Signature sig = ux_sig();
  std::string k0 = ExtensionalAction(parse_action("do[X:=0]", sig), sig).key();
  std::string k1 = ExtensionalAction(parse_action("do[X:=1]", sig), sig).key();
  std::string ke = ExtensionalAction(parse_action("do[]", sig), sig).key();
  auto fn = [sig, k0, k1, ke](const Action& a, const Action& b) -> Comparison {
    std::string ka = ExtensionalAction(a, sig).key();
    std::string kb = ExtensionalAction(b, sig).key();
    auto beats = [&](const std::string& x, const std::string& y) {
      return (x == k0 && y == k1) || (x == k1 && y == ke) || (x == ke && y == k0);
    };
    if (ka == kb) return Comparison::Equivalent;
    if (beats(ka, kb)) return Comparison::Better;
    if (beats(kb, ka)) return Comparison::Worse;
    return Comparison::Equivalent;
  };
  auto oracle = std::make_shared<CallbackOracle>(sig, fn);
  oracle->set_presented_actions({parse_action("do[X:=0]", sig), parse_action("do[X:=1]", sig),
                                 parse_action("do[]", sig)});
  return oracle;
}

// A2: two non-null atoms over the context U=0. Conditional preferences are
// non-trivial at both (U=0, X=0) and (U=0, X=1), while both definiteness
// checks, centeredness, and recursivity still hold.
inline TableSource a2_table() {
  Signature sig = ux_sig();
  return fixtures::score_table(sig, [&sig](const Atom& atom, const Assignment& p) -> long {
    VarId X = 1;
    auto setting = p.value_of(X);
    if (atom.values == std::vector<Value>{0, 0} && setting == Value{1}) return 5;
    if (atom.values == std::vector<Value>{0, 1} && setting == Value{0}) return 11;
    return 0;
  });
}

// A4: intervening to set X to its factual value at (U=0, X=0) is not a
// no-op. Definiteness still holds because X=1 stays fixed there.
inline TableSource a4_table() {
  Signature sig = ux_sig();
  return fixtures::score_table(sig, [](const Atom& atom, const Assignment& p) -> long {
    auto setting = p.value_of(1);
    if (atom.values == std::vector<Value>{0, 0} && setting == Value{0}) return 7;
    return 0;
  });
}

// A3 (not part of the exactly-one-axiom family): no value of X is fixed by
// doing nothing at (U=0, X=0).
inline TableSource a3_table() {
  Signature sig = ux_sig();
  return fixtures::score_table(sig, [](const Atom& atom, const Assignment& p) -> long {
    if (atom.values != std::vector<Value>{0, 0}) return 0;
    auto setting = p.value_of(1);
    if (setting == Value{0}) return 1;
    if (setting == Value{1}) return 2;
    return 0;
  });
}

// A5: the affects relation gains X -> Y at atom (0,0,0) and Y -> X at atom
// (1,0,0); each atom on its own satisfies definiteness and centeredness.
inline TableSource a5_table() {
  Signature sig = fixtures::chain_sig();
  return fixtures::score_table(sig, [](const Atom& atom, const Assignment& p) -> long {
    auto x = p.value_of(1);
    auto y = p.value_of(2);
    if (atom.values == std::vector<Value>{0, 0, 0}) {
      if (x == Value{1} && !y) return 1;
      if (!x && y == Value{1}) return 3;
      if (x == Value{0} && y == Value{1}) return 3;
      if (x == Value{1} && y == Value{0}) return 2;
      if (x == Value{1} && y == Value{1}) return 1;
      return 0;
    }
    if (atom.values == std::vector<Value>{1, 0, 0}) {
      if (x == Value{1} && !y) return 3;
      if (!x && y == Value{1}) return 1;
      if (x == Value{0} && y == Value{1}) return 2;
      if (x == Value{1} && y == Value{0}) return 3;
      if (x == Value{1} && y == Value{1}) return 1;
      return 0;
    }
    return 0;
  });
}

}  // namespace controls
