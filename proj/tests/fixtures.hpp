#pragma once

// Shared hand-built models and preference sources for the test suites.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/prefs.hpp"

namespace fixtures {

using namespace causalrep;

// U -> X -> Y with identity equations, everything binary.
inline Signature chain_sig() {
  return Signature::make({"U"}, {"X", "Y"},
                         {{"U", {0, 1}}, {"X", {0, 1}}, {"Y", {0, 1}}});
}

inline CausalModel chain_model() {
  Signature sig = chain_sig();
  Equation fx{*sig.find("X"), {*sig.find("U")}, {0, 1}};
  Equation fy{*sig.find("Y"), {*sig.find("X")}, {0, 1}};
  return CausalModel::make(sig, {fx, fy});
}

// Same shape, but F_Y(x) = 1 - x.
inline CausalModel antichain_model() {
  Signature sig = chain_sig();
  Equation fx{*sig.find("X"), {*sig.find("U")}, {0, 1}};
  Equation fy{*sig.find("Y"), {*sig.find("X")}, {1, 0}};
  return CausalModel::make(sig, {fx, fy});
}

inline std::vector<Rat> uniform_prob(const Signature& sig) {
  std::vector<Rat> p(sig.context_count(), Rat(1, static_cast<long>(sig.context_count())));
  return p;
}

// Utility that reads off the value of Y (deliberately not injective).
inline Representation chain_rep_y_utility() {
  CausalModel m = chain_model();
  const Signature& sig = m.signature();
  std::vector<Rat> util;
  for (std::uint64_t a = 0; a < sig.atom_count(); ++a)
    util.push_back(Rat(atom_at(sig, a).values[*sig.find("Y")]));
  return Representation::make(m, uniform_prob(sig), util);
}

// Injective utility: one distinct level per atom.
inline Representation injective_rep(const CausalModel& m) {
  const Signature& sig = m.signature();
  std::vector<Rat> util;
  for (std::uint64_t a = 0; a < sig.atom_count(); ++a) util.push_back(Rat(static_cast<long>(a)));
  return Representation::make(m, uniform_prob(sig), util);
}

inline Representation chain_rep_injective() { return injective_rep(chain_model()); }

// Longer chain U -> X -> Y -> Z, identities, binary.
inline CausalModel chain4_model() {
  Signature sig = Signature::make(
      {"U"}, {"X", "Y", "Z"},
      {{"U", {0, 1}}, {"X", {0, 1}}, {"Y", {0, 1}}, {"Z", {0, 1}}});
  Equation fx{*sig.find("X"), {*sig.find("U")}, {0, 1}};
  Equation fy{*sig.find("Y"), {*sig.find("X")}, {0, 1}};
  Equation fz{*sig.find("Z"), {*sig.find("Y")}, {0, 1}};
  return CausalModel::make(sig, {fx, fy, fz});
}

inline Atom atom_of(const Signature& sig, std::vector<Value> values) {
  Atom a{std::move(values)};
  check_atom(sig, a);
  return a;
}

inline Context ctx_of(const Signature& sig, std::vector<Value> values) {
  Context c{std::move(values)};
  check_context(sig, c);
  return c;
}

inline Assignment asg(const Signature& sig,
                      std::vector<std::pair<std::string, Value>> pairs) {
  std::vector<std::pair<VarId, Value>> ids;
  for (auto& [name, val] : pairs) ids.emplace_back(*sig.find(name), val);
  return Assignment::make(sig, std::move(ids));
}

// Score-driven preference table: one entry per (atom, primitive) pair via a
// caller-supplied score; covers every "if atom then do[...]" query the
// checkers issue over the full primitive family.
inline TableSource score_table(const Signature& sig,
                               const std::function<long(const Atom&, const Assignment&)>& score,
                               std::vector<std::pair<Action, long>> extra = {}) {
  std::vector<Action> actions;
  std::vector<long long> ranks;
  long best = 0;
  std::vector<Assignment> primitives;
  {
    std::vector<VarId> endo;
    for (int i = 0; i < sig.endo_count(); ++i) endo.push_back(sig.endo_id(i));
    std::vector<int> state(endo.size(), 0);
    for (;;) {
      std::vector<std::pair<VarId, Value>> pairs;
      for (std::size_t i = 0; i < endo.size(); ++i)
        if (state[i] > 0) pairs.emplace_back(endo[i], sig.range(endo[i])[state[i] - 1]);
      primitives.push_back(Assignment::make(sig, std::move(pairs)));
      std::size_t i = 0;
      for (; i < endo.size(); ++i) {
        if (state[i] < static_cast<int>(sig.range(endo[i]).size())) {
          ++state[i];
          break;
        }
        state[i] = 0;
      }
      if (i == endo.size()) break;
    }
  }
  std::vector<std::pair<Action, long>> scored;
  for (std::uint64_t ai = 0; ai < sig.atom_count(); ++ai) {
    Atom atom = atom_at(sig, ai);
    Formula guard = atom_formula(sig, atom);
    for (const Assignment& p : primitives) {
      Action act = Action::conditional(guard, Action::primitive(p), Action::nothing());
      scored.emplace_back(act, score(atom, p));
    }
  }
  for (auto& e : extra) scored.push_back(e);
  for (auto& [act, s] : scored) best = std::max(best, s);
  for (auto& [act, s] : scored) {
    actions.push_back(act);
    ranks.push_back(best - s);  // lower rank = preferred
  }
  return TableSource(sig, actions, ranks);
}

}  // namespace fixtures
