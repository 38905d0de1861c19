#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/order.hpp"

namespace causalrep {

// Closest-world model: finite worlds, a strict total order per world (stored
// curried, as an injective rank function from each world's perspective), and
// a total valuation per world.
class LewisModel {
 public:
  using WorldId = std::int64_t;
  using RankFn = std::function<std::uint64_t(WorldId base, WorldId w)>;

  LewisModel(const Signature& sig, std::vector<Atom> interpretation, RankFn rank)
      : sig_(&sig), interp_(std::move(interpretation)), rank_(std::move(rank)) {}

  const Signature& signature() const { return *sig_; }
  WorldId world_count() const { return static_cast<WorldId>(interp_.size()); }
  const Atom& interpretation(WorldId w) const { return interp_[w]; }
  std::uint64_t rank(WorldId base, WorldId w) const { return rank_(base, w); }

  // Order-minimal world whose valuation satisfies the assignment.
  WorldId closest(WorldId base, const Assignment& constraint) const {
    WorldId best = -1;
    std::uint64_t best_rank = 0;
    for (WorldId w = 0; w < world_count(); ++w) {
      bool ok = true;
      for (const auto& [var, val] : constraint.pairs())
        if (interp_[w].values[var] != val) ok = false;
      if (!ok) continue;
      std::uint64_t r = rank_(base, w);
      if (best < 0 || r < best_rank) {
        best = w;
        best_rank = r;
      }
    }
    if (best < 0) throw NoClosestWorldError("no closest world satisfies the assignment");
    return best;
  }

 private:
  const Signature* sig_;
  std::vector<Atom> interp_;
  RankFn rank_;
};

inline bool lewis_satisfies(const LewisModel& m, LewisModel::WorldId w, const ExtFormula& f) {
  if (f.intervention.empty())
    return atom_implies(m.signature(), m.interpretation(w), f.body);
  LewisModel::WorldId v = m.closest(w, f.intervention);
  return atom_implies(m.signature(), m.interpretation(v), f.body);
}

// World of the pair model: the atom after the intervention plus the atom the
// intervention started from. Truth is read off the first component.
struct PairWorld {
  std::uint64_t current = 0;  // atom index
  std::uint64_t origin = 0;   // atom index
};

inline LewisModel::WorldId pair_world_id(std::uint64_t atom_count, const PairWorld& w) {
  return static_cast<LewisModel::WorldId>(w.current * atom_count + w.origin);
}

inline PairWorld pair_world_at(std::uint64_t atom_count, LewisModel::WorldId id) {
  std::uint64_t u = static_cast<std::uint64_t>(id);
  return PairWorld{u / atom_count, u % atom_count};
}

// Lift a family of atom orders <_a to a Lewis model over pairs of atoms.
// From the perspective of a pair with first component a: pairs compare first
// by <_a on their first components; among equal first components the pair
// whose second component is a precedes all others, and the remainder follows
// the global atom enumeration. The pair (a, a) is the minimum.
//
// atom_ranks[a][b] = rank of atom b under <_a (so atom_ranks[a][a] == 0).
inline LewisModel build_pref_lewis(const std::vector<std::vector<std::uint32_t>>& atom_ranks,
                                   const Signature& sig,
                                   std::uint64_t cap = kDefaultEnumCap) {
  std::uint64_t n = sig.atom_count();
  if (atom_ranks.size() != n) throw ModelError("need one atom order per atom");
  if (n * n > cap) throw SizeError("pair space too large for a Lewis model");
  std::vector<Atom> interp;
  interp.reserve(n * n);
  for (std::uint64_t cur = 0; cur < n; ++cur) {
    Atom a = atom_at(sig, cur);
    for (std::uint64_t org = 0; org < n; ++org) interp.push_back(a);
  }
  auto rank = [&atom_ranks, n](LewisModel::WorldId base, LewisModel::WorldId w) -> std::uint64_t {
    PairWorld pb = pair_world_at(n, base);
    PairWorld pw = pair_world_at(n, w);
    std::uint64_t a = pb.current;
    std::uint64_t primary = atom_ranks[a][pw.current];
    std::uint64_t secondary = pw.origin == a ? 0 : 1 + pw.origin;
    return primary * (n + 1) + secondary;
  };
  return LewisModel(sig, std::move(interp), rank);
}

// Halpern-style counterpart of a recursive causal model, used as an oracle:
// worlds are atoms and each world's order is the closeness family driven by
// the model's own interventions. At factual worlds it satisfies exactly the
// formulas the causal model satisfies.
inline LewisModel causal_to_lewis(const CausalModel& m, std::uint64_t cap = kDefaultEnumCap) {
  const Signature& sig = m.signature();
  if (!m.recursive()) throw ModelError("model is not recursive");
  std::uint64_t n = sig.atom_count();
  if (n > cap) throw SizeError("atom space too large");
  std::vector<VarId> seq;
  for (int v = 0; v < sig.exo_count(); ++v) seq.push_back(v);
  for (VarId v : m.dependency_order()) seq.push_back(v);
  VarOrder order = VarOrder::make(sig, std::move(seq));
  FixesFn model_fixes = [&m](const Atom& base, const Assignment& z, VarId var, Value val) {
    Context ctx = atom_context(m.signature(), base);
    return solve_do(m, ctx, z).values[var] == val;
  };
  AtomCloseness closeness(sig, order, ValueOrders(sig), model_fixes);
  std::vector<std::vector<std::uint32_t>> ranks;
  ranks.reserve(n);
  std::vector<Atom> interp;
  interp.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Atom a = atom_at(sig, i);
    ranks.push_back(closeness.ranks(a));
    interp.push_back(a);
  }
  auto rank = [ranks = std::move(ranks)](LewisModel::WorldId base, LewisModel::WorldId w) {
    return static_cast<std::uint64_t>(ranks[base][w]);
  };
  return LewisModel(sig, std::move(interp), rank);
}

}  // namespace causalrep
