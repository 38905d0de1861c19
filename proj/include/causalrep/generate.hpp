#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/prefs.hpp"
#include "causalrep/rng.hpp"

namespace causalrep {

struct GenCaps {
  int max_exo = 2;
  int max_endo = 3;
  int max_range = 3;
  std::uint64_t max_atoms = 32;
  int cond_atom_samples = 3;    // atoms guarding sampled conditionals
  int cond_action_samples = 2;  // branch pairs per sampled atom
};

// Where a --ties instance put its utility tie: two atoms over `context_idx`
// differing only in `var`, reached by intervening `row` on the other
// endogenous variables.
struct TieInfo {
  std::uint64_t context_idx = 0;
  Assignment row;
  VarId var = -1;
  Value tied_value1 = 0, tied_value2 = 0;
  std::uint64_t atom_a = 0, atom_b = 0;
};

struct GeneratedInstance {
  Representation rep;
  std::vector<Action> family;
  std::optional<TieInfo> tie;
};

namespace gen_detail {

inline std::string exo_name(int i) {
  static const char* names[] = {"U", "V", "W"};
  return i < 3 ? names[i] : "U" + std::to_string(i);
}
inline std::string endo_name(int i) {
  static const char* names[] = {"X", "Y", "Z"};
  return i < 3 ? names[i] : "X" + std::to_string(i);
}

inline Signature gen_signature(SplitMix64& rng, const GenCaps& caps, bool ternary_sink) {
  int n_exo = rng.range(1, std::max(1, caps.max_exo));
  int min_endo = ternary_sink ? 2 : 1;
  int n_endo = rng.range(min_endo, std::max(min_endo, caps.max_endo));
  std::vector<int> sizes(n_exo + n_endo);
  for (int i = 0; i < n_exo + n_endo; ++i) sizes[i] = rng.range(2, std::max(2, caps.max_range));
  if (ternary_sink) sizes[n_exo + n_endo - 1] = 3;
  auto product = [&] {
    std::uint64_t p = 1;
    for (int s : sizes) p *= static_cast<std::uint64_t>(s);
    return p;
  };
  while (product() > caps.max_atoms) {
    int widest = -1;
    for (int i = 0; i < n_exo + n_endo; ++i) {
      if (ternary_sink && i == n_exo + n_endo - 1) continue;
      if (sizes[i] > 2 && (widest < 0 || sizes[i] > sizes[widest])) widest = i;
    }
    if (widest >= 0) {
      sizes[widest] = 2;
    } else if (n_endo > min_endo) {
      // drop the endogenous variable just before the (possible) sink
      sizes.erase(sizes.begin() + n_exo + n_endo - 2);
      --n_endo;
    } else if (n_exo > 1) {
      sizes.erase(sizes.begin());
      --n_exo;
    } else {
      throw SizeError("cannot fit signature under the atom cap");
    }
  }
  std::vector<std::string> exo, endo;
  std::map<std::string, std::vector<Value>> ranges;
  for (int i = 0; i < n_exo; ++i) {
    exo.push_back(exo_name(i));
    std::vector<Value> r;
    for (int v = 0; v < sizes[i]; ++v) r.push_back(v);
    ranges[exo.back()] = r;
  }
  for (int i = 0; i < n_endo; ++i) {
    endo.push_back(endo_name(i));
    std::vector<Value> r;
    for (int v = 0; v < sizes[n_exo + i]; ++v) r.push_back(v);
    ranges[endo.back()] = r;
  }
  return Signature::make(exo, endo, ranges);
}

// Parents drawn from exogenous variables and earlier endogenous ones, so the
// declaration order is already topological.
inline CausalModel gen_model(SplitMix64& rng, Signature sig, bool dense_last_parents) {
  std::vector<Equation> eqs;
  for (int i = 0; i < sig.endo_count(); ++i) {
    Equation eq;
    eq.target = sig.endo_id(i);
    bool last = i == sig.endo_count() - 1;
    for (int v = 0; v < sig.exo_count(); ++v)
      if (rng.below(2) == 0) eq.parents.push_back(v);
    for (int k = 0; k < i; ++k)
      if ((dense_last_parents && last) || rng.below(2) == 0)
        eq.parents.push_back(sig.endo_id(k));
    if (eq.parents.empty() && sig.exo_count() > 0) eq.parents.push_back(0);
    std::uint64_t rows = 1;
    for (VarId p : eq.parents) rows *= sig.range(p).size();
    const std::vector<Value>& range = sig.range(eq.target);
    for (std::uint64_t r = 0; r < rows; ++r)
      eq.table.push_back(range[rng.below(range.size())]);
    eqs.push_back(std::move(eq));
  }
  return CausalModel::make(std::move(sig), std::move(eqs));
}

inline std::vector<Rat> gen_prob(SplitMix64& rng, std::uint64_t n) {
  std::vector<long> raw(n);
  long total = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    raw[i] = rng.range(1, 8);
    total += raw[i];
  }
  std::vector<Rat> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(Rat(raw[i], total));
  return out;
}

inline std::vector<Rat> gen_injective_util(SplitMix64& rng, std::uint64_t n) {
  std::vector<long> levels(n);
  for (std::uint64_t i = 0; i < n; ++i) levels[i] = static_cast<long>(i);
  rng.shuffle(levels);
  std::vector<Rat> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(Rat(levels[i]));
  return out;
}

}  // namespace gen_detail

inline Formula gen_formula(SplitMix64& rng, const Signature& sig, int depth) {
  if (depth <= 0 || rng.below(3) == 0) {
    VarId v = static_cast<VarId>(rng.below(sig.var_count()));
    const auto& r = sig.range(v);
    return Formula::eq(v, r[rng.below(r.size())]);
  }
  switch (rng.below(3)) {
    case 0:
      return Formula::negate(gen_formula(rng, sig, depth - 1));
    case 1:
      return Formula::conj(gen_formula(rng, sig, depth - 1), gen_formula(rng, sig, depth - 1));
    default:
      return Formula::disj(gen_formula(rng, sig, depth - 1), gen_formula(rng, sig, depth - 1));
  }
}

inline Assignment gen_assignment(SplitMix64& rng, const Signature& sig) {
  std::vector<std::pair<VarId, Value>> pairs;
  for (int i = 0; i < sig.endo_count(); ++i) {
    if (rng.below(2) == 0) continue;
    VarId v = sig.endo_id(i);
    const auto& r = sig.range(v);
    pairs.emplace_back(v, r[rng.below(r.size())]);
  }
  return Assignment::make(sig, std::move(pairs));
}

// Every primitive assignment (subsets of the endogenous variables with all
// value choices), plus guarded conditionals over sampled atoms: two-branch
// dispatches, one-branch probes, and a couple of single-test conditionals.
inline std::vector<Action> gen_action_family(SplitMix64& rng, const Signature& sig,
                                             const GenCaps& caps) {
  std::vector<Action> family;
  std::map<std::string, bool> seen;
  auto push = [&](const Action& a) {
    std::string key = to_string(a, sig);
    if (seen.emplace(key, true).second) family.push_back(a);
  };
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
  for (const Assignment& p : primitives) push(Action::primitive(p));
  std::uint64_t natoms = sig.atom_count();
  for (int s = 0; s < caps.cond_atom_samples; ++s) {
    Atom atom = atom_at(sig, rng.below(natoms));
    Formula guard = atom_formula(sig, atom);
    for (int k = 0; k < caps.cond_action_samples; ++k) {
      const Assignment& p1 = primitives[rng.below(primitives.size())];
      const Assignment& p2 = primitives[rng.below(primitives.size())];
      push(Action::conditional(guard, Action::primitive(p1), Action::primitive(p2)));
      push(Action::conditional(guard, Action::primitive(p1), Action::nothing()));
    }
  }
  for (int k = 0; k < 2; ++k) {
    VarId v = static_cast<VarId>(rng.below(sig.var_count()));
    const auto& r = sig.range(v);
    Formula test = Formula::eq(v, r[rng.below(r.size())]);
    const Assignment& p1 = primitives[rng.below(primitives.size())];
    const Assignment& p2 = primitives[rng.below(primitives.size())];
    push(Action::conditional(test, Action::primitive(p1), Action::primitive(p2)));
  }
  return family;
}

// Ground-truth instance: recursive model, full-support rational probability,
// injective utility. With `ties`, the last endogenous variable is a ternary
// sink and exactly two of its sibling outcome atoms share a utility value,
// placed so that neither tied value is the factual one (that is what lets
// the value-order tails flip the constructed equation row).
inline GeneratedInstance make_instance(std::uint64_t seed, const GenCaps& caps, bool ties) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    SplitMix64 rng(mix_seed(seed, attempt));
    Signature sig = gen_detail::gen_signature(rng, caps, ties);
    CausalModel model = gen_detail::gen_model(rng, sig, ties);
    const Signature& msig = model.signature();
    std::vector<Rat> prob = gen_detail::gen_prob(rng, msig.context_count());
    std::vector<Rat> util = gen_detail::gen_injective_util(rng, msig.atom_count());
    std::optional<TieInfo> tie;
    if (ties) {
      VarId sink = msig.endo_id(msig.endo_count() - 1);
      std::uint64_t c0 = rng.below(msig.context_count());
      Context ctx = context_at(msig, c0);
      Atom factual = solve(model, ctx);
      std::vector<VarId> others;
      for (int i = 0; i + 1 < msig.endo_count(); ++i) others.push_back(msig.endo_id(i));
      // find a row whose solved sink value differs from the factual one
      std::uint64_t tuples = 1;
      for (VarId v : others) tuples *= msig.range(v).size();
      for (std::uint64_t t = 0; t < tuples && !tie; ++t) {
        std::uint64_t rest = t;
        std::vector<std::pair<VarId, Value>> pairs;
        for (std::size_t k = others.size(); k-- > 0;) {
          std::uint64_t r = msig.range(others[k]).size();
          pairs.emplace_back(others[k], msig.range(others[k])[rest % r]);
          rest /= r;
        }
        Assignment row = Assignment::make(msig, std::move(pairs));
        Atom reached = solve_do(model, ctx, row);
        Value got = reached.values[sink];
        if (got == factual.values[sink]) continue;
        Value third = -1;
        for (Value v : msig.range(sink))
          if (v != got && v != factual.values[sink]) third = v;
        if (third < 0) continue;
        Atom partner = reached;
        partner.values[sink] = third;
        std::uint64_t ia = atom_index(msig, reached);
        std::uint64_t ib = atom_index(msig, partner);
        util[ib] = util[ia];
        tie = TieInfo{c0, row, sink, got, third, ia, ib};
      }
      if (!tie) continue;  // resample
    }
    std::vector<Action> family = gen_action_family(rng, msig, caps);
    Representation rep = Representation::make(std::move(model), std::move(prob), std::move(util));
    return GeneratedInstance{std::move(rep), std::move(family), tie};
  }
  throw Error("could not generate an instance for seed " + std::to_string(seed));
}

}  // namespace causalrep
