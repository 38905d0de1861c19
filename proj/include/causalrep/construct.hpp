#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "causalrep/axioms.hpp"
#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/lp.hpp"
#include "causalrep/order.hpp"
#include "causalrep/prefs.hpp"
#include "causalrep/rng.hpp"

namespace causalrep {

// The admissible arbitrary choices of the construction. Varying them across
// trials is how non-identification gets witnessed.
struct TrialChoices {
  std::vector<VarId> exo_order;    // permutation of exogenous ids
  std::vector<int> endo_priority;  // per endogenous position; lower = earlier tie-break
  ValueOrders::Tail tail = ValueOrders::Tail::Declared;
  std::uint64_t value_seed = 0;
};

inline TrialChoices default_choices(const Signature& sig) {
  TrialChoices c;
  for (int v = 0; v < sig.exo_count(); ++v) c.exo_order.push_back(v);
  c.endo_priority.resize(sig.endo_count());
  for (int i = 0; i < sig.endo_count(); ++i) c.endo_priority[i] = i;
  return c;
}

// trial 0: declaration order, declared value tails. trial 1: same orders,
// reversed tails (any two-element fix set flips between 0 and 1). Later
// trials: seeded shuffles of everything.
inline TrialChoices trial_choices(const Signature& sig, std::uint64_t seed, int trial) {
  TrialChoices c = default_choices(sig);
  if (trial == 0) return c;
  if (trial == 1) {
    c.tail = ValueOrders::Tail::Reversed;
    return c;
  }
  SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
  rng.shuffle(c.exo_order);
  rng.shuffle(c.endo_priority);
  c.tail = ValueOrders::Tail::Shuffled;
  c.value_seed = mix_seed(seed, 0x5eed0000ULL + static_cast<std::uint64_t>(trial));
  return c;
}

// Topological linear extension of the affects graph with the exogenous block
// first. Ties among available endogenous variables go to the smallest
// priority value (declaration order by default).
inline VarOrder linearize_affects(const Signature& sig, const AffectsGraph& graph,
                                  const TrialChoices& choices) {
  int n = sig.endo_count();
  std::vector<int> indeg(n, 0);
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e)
      if (graph.adj[c][e]) ++indeg[e];
  std::vector<VarId> seq = choices.exo_order;
  if (static_cast<int>(seq.size()) != sig.exo_count())
    throw ConstructError("linearize", "exogenous order has wrong arity");
  std::vector<bool> placed(n, false);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (placed[v] || indeg[v] != 0) continue;
      if (best < 0 || choices.endo_priority[v] < choices.endo_priority[best]) best = v;
    }
    if (best < 0) throw ConstructError("linearize", "affects graph is cyclic");
    placed[best] = true;
    seq.push_back(sig.endo_id(best));
    for (int e = 0; e < n; ++e)
      if (graph.adj[best][e]) --indeg[e];
  }
  return VarOrder::make(sig, std::move(seq));
}

// Closeness driven by preference queries.
inline AtomCloseness pref_closeness(const PreferenceSource& pref, VarOrder var_order,
                                    ValueOrders value_orders) {
  FixesFn fn = [&pref](const Atom& base, const Assignment& z, VarId var, Value val) {
    return pref.fixes(base, z, var, val);
  };
  return AtomCloseness(pref.signature(), std::move(var_order), std::move(value_orders),
                       std::move(fn));
}

// The order <_a for one base atom.
class AtomOrder {
 public:
  AtomOrder(const PreferenceSource& pref, Atom base, const VarOrder& var_order,
            const ValueOrders& value_orders)
      : closeness_(pref_closeness(pref, var_order, value_orders)), base_(std::move(base)) {}

  const Atom& base() const { return base_; }
  bool less(const Atom& b, const Atom& c) const { return closeness_.less(base_, b, c); }
  std::vector<std::uint32_t> ranks() const { return closeness_.ranks(base_); }

 private:
  AtomCloseness closeness_;
  Atom base_;
};

inline AtomOrder atom_order(const PreferenceSource& pref, const Atom& base,
                            const VarOrder& var_order, const ValueOrders& value_orders) {
  return AtomOrder(pref, base, var_order, value_orders);
}

// Closest atom satisfying the assignment: exogenous part copied from the
// base, assigned variables as given, every other variable the value-order
// minimum of its fix set against the already-built prefix. An empty fix set
// signals a Definiteness violation.
inline Atom min_atom(const PreferenceSource& pref, const Atom& base, const Assignment& asg,
                     const VarOrder& var_order, const ValueOrders& value_orders) {
  AtomCloseness closeness = pref_closeness(pref, var_order, value_orders);
  bool empty_m = false;
  Atom out = closeness.min_satisfying(base, asg, &empty_m);
  if (empty_m)
    throw ConstructError("min_atom", "empty fix set: Definiteness (A3) does not hold here");
  return out;
}

// Enumeration argmin over the same order; the independent cross-check.
inline Atom min_atom_by_enumeration(const PreferenceSource& pref, const Atom& base,
                                    const Assignment& asg, const VarOrder& var_order,
                                    const ValueOrders& value_orders) {
  AtomCloseness closeness = pref_closeness(pref, var_order, value_orders);
  return closeness.min_satisfying_scan(base, asg);
}

// Literal restatement of the two order rules, checked against the comparator
// over every atom pair.
struct OrConformance {
  bool ok = true;
  std::string detail;
};

inline OrConformance verify_or_rules(const PreferenceSource& pref, const Atom& base,
                                     const VarOrder& var_order, const ValueOrders& value_orders) {
  const Signature& sig = pref.signature();
  AtomCloseness closeness = pref_closeness(pref, var_order, value_orders);
  std::uint64_t n = sig.atom_count();
  auto first_disagreement = [&](const Atom& x, const Atom& y) -> int {
    for (VarId v : var_order.sequence)
      if (x.values[v] != y.values[v]) return var_order.position[v];
    return -1;
  };
  OrConformance out;
  for (std::uint64_t bi = 0; bi < n && out.ok; ++bi) {
    Atom b = atom_at(sig, bi);
    if (b == base) continue;
    for (std::uint64_t ci = 0; ci < n && out.ok; ++ci) {
      if (bi == ci) continue;
      Atom c = atom_at(sig, ci);
      if (c == base) continue;
      int pab = first_disagreement(base, b);
      int pac = first_disagreement(base, c);
      if (pac < pab) {
        // OR1: c deviates earlier, so b must be closer
        if (!closeness.less(base, b, c)) {
          out.ok = false;
          out.detail = "OR1 violated at atoms " + std::to_string(bi) + "," + std::to_string(ci);
        }
        continue;
      }
      if (pab != pac) continue;
      int pbc = first_disagreement(b, c);
      VarId y = var_order.sequence[pbc];
      if (sig.is_exogenous(y)) continue;  // OR2 queries are over endogenous variables
      std::vector<std::pair<VarId, Value>> zpairs;
      for (int k = 0; k < pbc; ++k) {
        VarId w = var_order.sequence[k];
        if (!sig.is_exogenous(w)) zpairs.emplace_back(w, b.values[w]);
      }
      Assignment z = Assignment::make(sig, std::move(zpairs));
      bool fb = pref.fixes(base, z, y, b.values[y]);
      bool fc = pref.fixes(base, z, y, c.values[y]);
      bool or2 = fb && (!fc || value_orders.rank(base, y, b.values[y]) <
                                   value_orders.rank(base, y, c.values[y]));
      if (or2 && !closeness.less(base, b, c)) {
        out.ok = false;
        out.detail = "OR2 violated at atoms " + std::to_string(bi) + "," + std::to_string(ci);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equation construction.

struct EquationBuildTrace {
  struct Row {
    VarId target = -1;
    std::uint64_t context_idx = 0;
    std::vector<Value> prefix_values;
    Value value = 0;
    bool constrained = true;
  };
  std::vector<Row> rows;
};

// For the j-th endogenous variable in the order: parents are all exogenous
// variables plus the earlier endogenous ones, and the table row at
// (u, y_1..y_j) is the variable's value in the closest atom to the non-null
// atom of u under do[Y_1 <- y_1, ..., Y_j <- y_j]. Contexts without a
// non-null atom get the first range value and are flagged unconstrained.
inline CausalModel build_equations(const PreferenceSource& pref, const CdaggerMap& c_dagger,
                                   const VarOrder& var_order, const ValueOrders& value_orders,
                                   EquationBuildTrace* trace = nullptr) {
  const Signature& sig = pref.signature();
  AtomCloseness closeness = pref_closeness(pref, var_order, value_orders);
  std::vector<VarId> endo_seq;
  for (VarId v : var_order.sequence)
    if (!sig.is_exogenous(v)) endo_seq.push_back(v);

  std::vector<Equation> equations;
  for (std::size_t j = 0; j < endo_seq.size(); ++j) {
    VarId target = endo_seq[j];
    Equation eq;
    eq.target = target;
    for (int v = 0; v < sig.exo_count(); ++v) eq.parents.push_back(v);
    for (std::size_t k = 0; k < j; ++k) eq.parents.push_back(endo_seq[k]);
    std::uint64_t rows = 1;
    for (VarId p : eq.parents) rows *= sig.range(p).size();
    eq.table.resize(rows);
    std::vector<int> digits(eq.parents.size(), 0);
    for (std::uint64_t r = 0; r < rows; ++r) {
      // decode row -> parent values (first parent most significant)
      std::uint64_t rest = r;
      for (std::size_t p = eq.parents.size(); p-- > 0;) {
        digits[p] = static_cast<int>(rest % sig.range(eq.parents[p]).size());
        rest /= sig.range(eq.parents[p]).size();
      }
      Context ctx;
      ctx.values.resize(sig.exo_count());
      for (int v = 0; v < sig.exo_count(); ++v) ctx.values[v] = sig.range(v)[digits[v]];
      std::uint64_t ci = context_index(sig, ctx);
      std::vector<Value> prefix_values;
      for (std::size_t k = 0; k < j; ++k)
        prefix_values.push_back(sig.range(endo_seq[k])[digits[sig.exo_count() + k]]);

      Value out_val;
      bool constrained = c_dagger.atom_of_context[ci].has_value();
      if (constrained) {
        Atom base = atom_at(sig, *c_dagger.atom_of_context[ci]);
        Atom scratch;
        scratch.values.assign(sig.var_count(), 0);
        for (int v = 0; v < sig.var_count(); ++v) scratch.values[v] = sig.range(v)[0];
        for (int v = 0; v < sig.exo_count(); ++v) scratch.values[v] = ctx.values[v];
        for (std::size_t k = 0; k < j; ++k) scratch.values[endo_seq[k]] = prefix_values[k];
        std::vector<Value> m = closeness.fix_set(base, scratch, target);
        if (m.empty())
          throw ConstructError("build_equations",
                               "empty fix set for " + sig.name(target) +
                                   ": Definiteness (A3) does not hold here");
        out_val = sig.range(target)[0];
        for (Value cand : value_orders.order(base, target)) {
          if (std::find(m.begin(), m.end(), cand) != m.end()) {
            out_val = cand;
            break;
          }
        }
      } else {
        out_val = sig.range(target)[0];
      }
      eq.table[r] = out_val;
      if (trace)
        trace->rows.push_back(
            EquationBuildTrace::Row{target, ci, prefix_values, out_val, constrained});
    }
    equations.push_back(std::move(eq));
  }
  return CausalModel::make(sig, std::move(equations));
}

// ---------------------------------------------------------------------------
// Weight fitting: a margin LP over (context, outcome atom) weights.

struct FitResult {
  std::vector<Rat> prob;
  std::vector<Rat> util;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, Rat>> weights;  // (context, atom, w)
  Rat margin = 0;
};

inline FitResult fit_weights(const PreferenceSource& pref, const std::vector<Action>& actions,
                             const CdaggerMap& c_dagger, const CausalModel& model) {
  const Signature& sig = model.signature();
  FitResult out;
  out.prob.assign(sig.context_count(), Rat(0));
  out.util.assign(sig.atom_count(), Rat(0));
  std::vector<std::uint64_t> contexts = c_dagger.context_indices();
  if (contexts.empty()) {
    // fully trivial preferences: any probability works, utility constant
    Rat u(1, static_cast<long>(sig.context_count()));
    for (auto& p : out.prob) p = u;
    return out;
  }
  Rat p_each(1, static_cast<long>(contexts.size()));
  for (std::uint64_t c : contexts) out.prob[c] = p_each;

  GroupResult grouped = group_actions(pref, actions);
  if (grouped.incoherence)
    throw ConstructError("fit_weights", "presented preferences are not a weak order");

  std::map<std::pair<std::uint64_t, std::uint64_t>, int> var_of_cell;
  std::vector<std::vector<int>> profiles(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (std::uint64_t c : contexts) {
      Atom outcome = beta(model, actions[i], context_at(sig, c));
      auto [it, fresh] = var_of_cell.emplace(std::make_pair(c, atom_index(sig, outcome)),
                                             static_cast<int>(var_of_cell.size()));
      profiles[i].push_back(it->second);
    }
    std::sort(profiles[i].begin(), profiles[i].end());
  }

  detail::OrderLp olp = detail::build_order_lp(profiles, grouped.classes);
  lp::Solution sol = lp::solve(olp.problem);
  if (sol.status != lp::Status::Optimal)
    throw ConstructError("fit_weights", "margin program did not solve");
  if (sgn(sol.objective) <= 0)
    throw ConstructError("fit_weights",
                         "no positive margin: cancellation cannot have held on this set");
  out.margin = sol.objective;
  for (const auto& [cell, var] : var_of_cell) {
    Rat w = sol.primal[var];
    out.util[cell.second] = w / p_each;
    out.weights.emplace_back(cell.first, cell.second, w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full pipeline.

struct ConstructOptions {
  CheckOptions check;
  std::optional<TrialChoices> choices;  // default: declaration orders
  bool verify_round_trip = true;
};

struct ConstructTrace {
  VarOrder var_order;
  std::vector<std::uint64_t> c_dagger;
  EquationBuildTrace equations;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, Rat>> weights;
  Rat margin = 0;
  std::vector<AxiomReport> axiom_reports;
};

struct ConstructedRep {
  Representation rep;
  CdaggerMap c_dagger;
  ConstructTrace trace;
};

inline ConstructedRep construct_representation(const PreferenceSource& pref,
                                               const std::vector<Action>& actions,
                                               ConstructOptions opts = {},
                                               const CheckAllResult* precomputed = nullptr) {
  const Signature& sig = pref.signature();
  CheckAllResult check = precomputed ? *precomputed : check_all(pref, actions, opts.check);
  if (check.inconclusive)
    throw ConstructError("check_all", "axiom checks inconclusive (budget or coverage)");
  if (!check.all_pass) {
    std::string which;
    for (const AxiomReport& r : check.reports)
      if (r.axiom != "A3*" && r.verdict == Verdict::Fail) which += r.axiom + " ";
    throw ConstructError("check_all", "axioms failed: " + which);
  }
  TrialChoices choices = opts.choices ? *opts.choices : default_choices(sig);
  VarOrder var_order = linearize_affects(sig, check.graph, choices);
  ValueOrders value_orders(sig, choices.tail, choices.value_seed);
  ConstructTrace trace;
  CausalModel model = build_equations(pref, check.c_dagger, var_order, value_orders,
                                      &trace.equations);
  FitResult fit = fit_weights(pref, actions, check.c_dagger, model);
  Representation rep = Representation::make(std::move(model), fit.prob, fit.util);
  if (opts.verify_round_trip) {
    EuOracle induced(rep);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      for (std::size_t j = i + 1; j < actions.size(); ++j) {
        if (induced.compare(actions[i], actions[j]) != pref.compare(actions[i], actions[j]))
          throw ConstructError("verify",
                               "constructed representation disagrees with the source on pair " +
                                   std::to_string(i) + "," + std::to_string(j));
      }
    }
  }
  trace.var_order = var_order;
  trace.c_dagger = check.c_dagger.context_indices();
  trace.weights = std::move(fit.weights);
  trace.margin = fit.margin;
  trace.axiom_reports = check.reports;
  return ConstructedRep{std::move(rep), std::move(check.c_dagger), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Identification.

struct EquivalenceWitness {
  std::uint64_t context_idx = 0;
  Assignment assignment;
  VarId var = -1;
  Value value1 = 0, value2 = 0;
};

struct ModelsEquivalence {
  bool equivalent = true;
  std::optional<EquivalenceWitness> witness;
};

// Two models agree on every extended formula at the given contexts iff all
// intervened solutions agree variable-by-variable there.
inline ModelsEquivalence models_equivalent(const CausalModel& m1, const CausalModel& m2,
                                           const std::vector<std::uint64_t>& contexts) {
  if (!(m1.signature() == m2.signature()))
    throw ModelError("models_equivalent: signatures differ");
  const Signature& sig = m1.signature();
  std::vector<VarId> endo;
  for (int i = 0; i < sig.endo_count(); ++i) endo.push_back(sig.endo_id(i));
  ModelsEquivalence out;
  for (std::uint64_t c : contexts) {
    Context ctx = context_at(sig, c);
    detail::for_each_assignment(sig, endo, [&](const Assignment& asg) {
      if (!out.equivalent) return;
      Atom a1 = solve_do(m1, ctx, asg);
      Atom a2 = solve_do(m2, ctx, asg);
      for (VarId v : endo) {
        if (a1.values[v] != a2.values[v]) {
          out.equivalent = false;
          out.witness = EquivalenceWitness{c, asg, v, a1.values[v], a2.values[v]};
          return;
        }
      }
    });
    if (!out.equivalent) break;
  }
  return out;
}

enum class IdentifiedVerdict { Identified, NotIdentified, Inconsistent };

inline const char* verdict_str(IdentifiedVerdict v) {
  switch (v) {
    case IdentifiedVerdict::Identified: return "identified";
    case IdentifiedVerdict::NotIdentified: return "not_identified";
    case IdentifiedVerdict::Inconsistent: return "inconsistent";
  }
  return "?";
}

struct IdentifyResult {
  IdentifiedVerdict verdict = IdentifiedVerdict::Inconsistent;
  bool a3_star_pass = false;
  AxiomReport a3_star;
  std::vector<CausalModel> models;  // one per trial
  std::vector<std::uint64_t> c_dagger;
  std::optional<EquivalenceWitness> witness;
  int witness_trial_a = -1, witness_trial_b = -1;
  std::string note;
};

// Rebuilds the model under `trials` admissible choice variations and compares
// the results pairwise on the non-null contexts. Identified iff Strong
// Definiteness holds and every pair agrees; a disagreement between those two
// signals is a bug-level inconsistency and reported as such.
inline IdentifyResult check_identified(const PreferenceSource& pref,
                                       const std::vector<Action>& actions, int trials,
                                       std::uint64_t seed = 0, CheckOptions copts = {},
                                       const CheckAllResult* precomputed = nullptr) {
  const Signature& sig = pref.signature();
  CheckAllResult check = precomputed ? *precomputed : check_all(pref, actions, copts);
  if (check.inconclusive)
    throw ConstructError("check_all", "axiom checks inconclusive (budget or coverage)");
  if (!check.all_pass)
    throw ConstructError("check_all", "axioms failed; nothing to identify");
  IdentifyResult out;
  out.a3_star = check.report("A3*");
  out.a3_star_pass = out.a3_star.verdict == Verdict::Pass;
  out.c_dagger = check.c_dagger.context_indices();
  for (int t = 0; t < trials; ++t) {
    TrialChoices choices = trial_choices(sig, seed, t);
    VarOrder var_order = linearize_affects(sig, check.graph, choices);
    ValueOrders value_orders(sig, choices.tail, choices.value_seed);
    out.models.push_back(build_equations(pref, check.c_dagger, var_order, value_orders));
  }
  for (std::size_t i = 0; i < out.models.size() && !out.witness; ++i) {
    for (std::size_t j = i + 1; j < out.models.size(); ++j) {
      ModelsEquivalence eq = models_equivalent(out.models[i], out.models[j], out.c_dagger);
      if (!eq.equivalent) {
        out.witness = eq.witness;
        out.witness_trial_a = static_cast<int>(i);
        out.witness_trial_b = static_cast<int>(j);
        break;
      }
    }
  }
  if (out.a3_star_pass && !out.witness) {
    out.verdict = IdentifiedVerdict::Identified;
  } else if (!out.a3_star_pass && out.witness) {
    out.verdict = IdentifiedVerdict::NotIdentified;
  } else {
    out.verdict = IdentifiedVerdict::Inconsistent;
    out.note = out.a3_star_pass
                   ? "Strong Definiteness holds yet trials produced distinct models"
                   : "Strong Definiteness fails yet all trials agreed; vary trials or seeds";
  }
  return out;
}

}  // namespace causalrep
