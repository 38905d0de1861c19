#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/lp.hpp"
#include "causalrep/prefs.hpp"
#include "causalrep/rational.hpp"

namespace causalrep {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

// Witnesses are replayable: every fact they assert can be re-checked by
// re-issuing the underlying preference queries.

// Premise pairs first, conclusion pair last: A_i is weakly preferred to B_i
// for i < n, and A_n is strictly preferred to B_n although the h tables
// balance, so cancellation demanded B_n weakly preferred to A_n.
struct CancellationWitness {
  std::vector<Action> a_side, b_side;
  std::string origin;
};

struct UniquenessWitness {
  std::uint64_t context_idx = 0;
  std::uint64_t atom1 = 0, atom2 = 0;  // both non-null, both extend the context
};

struct DefinitenessWitness {
  std::uint64_t atom_idx = 0;
  Assignment assignment;
  VarId var = -1;
  std::vector<Value> fixed_values;  // the offending m set
};

struct CenteringWitness {
  std::uint64_t atom_idx = 0;
  std::vector<VarId> vars;  // Y, intervened at the atom's own values
  VarId var = -1;           // X whose factual value is not fixed
};

struct RecursivityWitness {
  std::vector<VarId> cycle;
  std::vector<AffectsEdge> evidence;  // one witnessed edge per cycle arc
};

using AxiomWitness = std::variant<std::monostate, CancellationWitness, UniquenessWitness,
                                  DefinitenessWitness, CenteringWitness, RecursivityWitness>;

struct AxiomReport {
  std::string axiom;
  Verdict verdict = Verdict::Pass;
  std::uint64_t queries_used = 0;
  std::string note;
  AxiomWitness witness;
};

// ---------------------------------------------------------------------------
// Weak-order grouping. Actions are placed into ranked indifference classes;
// afterwards every pair is verified against the placement. A contradiction is
// itself a cancellation violation (see the chain construction below).

struct OrderClasses {
  std::vector<std::vector<int>> classes;  // best to worst, member indices
  std::vector<int> class_of;              // action index -> class position
};

// class_of[first] <= class_of[second], yet compare(first, second) returned
// Worse or Equivalent (and Equivalent only across distinct classes).
struct IncoherenceInfo {
  int first = -1, second = -1;
};

struct GroupResult {
  OrderClasses classes;
  std::optional<IncoherenceInfo> incoherence;
};

inline GroupResult group_actions(const PreferenceSource& pref,
                                 const std::vector<Action>& actions) {
  GroupResult out;
  OrderClasses& oc = out.classes;
  oc.class_of.assign(actions.size(), -1);
  std::vector<int> reps;  // representative action index per class
  for (int i = 0; i < static_cast<int>(actions.size()); ++i) {
    std::size_t at = reps.size();
    bool joined = false;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      Comparison r = pref.compare(actions[i], actions[reps[c]]);
      if (r == Comparison::Better) {
        at = c;
        break;
      }
      if (r == Comparison::Equivalent) {
        oc.classes[c].push_back(i);
        oc.class_of[i] = static_cast<int>(c);
        joined = true;
        break;
      }
    }
    if (joined) continue;
    oc.classes.insert(oc.classes.begin() + at, {i});
    reps.insert(reps.begin() + at, i);
    for (std::size_t c = 0; c < oc.classes.size(); ++c)
      for (int m : oc.classes[c]) oc.class_of[m] = static_cast<int>(c);
  }
  // the placement is only trustworthy if every pair agrees with it
  for (int i = 0; i < static_cast<int>(actions.size()) && !out.incoherence; ++i) {
    for (int j = i + 1; j < static_cast<int>(actions.size()); ++j) {
      Comparison r = pref.compare(actions[i], actions[j]);
      Comparison want = oc.class_of[i] < oc.class_of[j]   ? Comparison::Better
                        : oc.class_of[i] > oc.class_of[j] ? Comparison::Worse
                                                          : Comparison::Equivalent;
      if (r == want) continue;
      if (oc.class_of[i] < oc.class_of[j])
        out.incoherence = IncoherenceInfo{i, j};
      else if (oc.class_of[i] > oc.class_of[j])
        out.incoherence = IncoherenceInfo{j, i};
      else
        out.incoherence = r == Comparison::Better ? IncoherenceInfo{j, i} : IncoherenceInfo{i, j};
      break;
    }
  }
  return out;
}

namespace detail {

// Telescoping chain witness for an order contradiction. The pair multiset
// {(first, rep_a), (rep_k, rep_k+1)..., (rep_b, second), (second, first)}
// has equal action multisets on both sides and every pair holds weakly; one
// strict pair goes into the conclusion slot.
inline CancellationWitness incoherence_witness(const OrderClasses& oc,
                                               const std::vector<Action>& actions,
                                               const IncoherenceInfo& info) {
  int ca = oc.class_of[info.first];
  int cb = oc.class_of[info.second];
  std::vector<std::pair<int, int>> pairs;
  std::size_t strict_at = 0;
  if (oc.classes[ca][0] != info.first) pairs.emplace_back(info.first, oc.classes[ca][0]);
  if (ca < cb) strict_at = pairs.size();  // (rep_ca, rep_ca+1) is strict
  for (int k = ca; k < cb; ++k) pairs.emplace_back(oc.classes[k][0], oc.classes[k + 1][0]);
  if (oc.classes[cb][0] != info.second) pairs.emplace_back(oc.classes[cb][0], info.second);
  pairs.emplace_back(info.second, info.first);
  // same-class contradictions make the closing pair itself strict
  if (ca < cb) std::swap(pairs[strict_at], pairs.back());
  CancellationWitness w;
  w.origin = "intransitive-chain";
  for (auto [x, y] : pairs) {
    w.a_side.push_back(actions[x]);
    w.b_side.push_back(actions[y]);
  }
  return w;
}

inline std::vector<std::vector<int>> intern_h_tables(const Signature& sig,
                                                     const std::vector<Action>& actions,
                                                     std::vector<std::string>* keys = nullptr) {
  std::uint64_t atoms = sig.atom_count();
  std::map<std::string, int> interned;
  std::vector<std::vector<int>> h(actions.size(), std::vector<int>(atoms, -1));
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (std::uint64_t a = 0; a < atoms; ++a) {
      Atom atom = atom_at(sig, a);
      const Assignment& asg = h_at(actions[i], sig, atom);
      std::string k;
      for (const auto& [var, val] : asg.pairs())
        k += std::to_string(var) + "=" + std::to_string(val) + ",";
      auto [it, fresh] = interned.emplace(k, static_cast<int>(interned.size()));
      h[i][a] = it->second;
    }
    if (keys) keys->push_back(ExtensionalAction(actions[i], sig).key());
  }
  return h;
}

}  // namespace detail

// Re-issue the witness's queries: per-atom h multisets must balance, all
// premise pairs must hold weakly, and the conclusion pair strictly.
inline bool replay_cancellation(const PreferenceSource& pref, const CancellationWitness& w) {
  if (w.a_side.empty() || w.a_side.size() != w.b_side.size()) return false;
  const Signature& sig = pref.signature();
  std::uint64_t atoms = sig.atom_count();
  for (std::uint64_t a = 0; a < atoms; ++a) {
    Atom atom = atom_at(sig, a);
    std::map<std::string, int> delta;
    auto key_of = [&](const Action& act) {
      std::string k;
      for (const auto& [var, val] : h_at(act, sig, atom).pairs())
        k += std::to_string(var) + "=" + std::to_string(val) + ",";
      return k;
    };
    for (const Action& act : w.a_side) ++delta[key_of(act)];
    for (const Action& act : w.b_side) --delta[key_of(act)];
    for (const auto& [k, d] : delta)
      if (d != 0) return false;
  }
  for (std::size_t i = 0; i + 1 < w.a_side.size(); ++i)
    if (!pref.weakly_prefers(w.a_side[i], w.b_side[i])) return false;
  return pref.compare(w.a_side.back(), w.b_side.back()) == Comparison::Better;
}

struct CancellationOptions {
  int n_max = 3;
  std::uint64_t search_steps = 200000;
};

struct CancellationResult {
  AxiomReport report;
  bool lp_feasible = false;
  bool search_complete = false;
  std::optional<OrderClasses> classes;
};

namespace detail {

// Bounded direct search for a violating tuple: a conclusion pair A ≻ B plus
// premise pairs (weak preferences), whose per-atom h multisets balance.
inline std::optional<CancellationWitness> cancellation_search(
    const PreferenceSource& pref, const std::vector<Action>& actions,
    const std::vector<std::vector<int>>& h, int n_max, std::uint64_t step_budget,
    bool* complete) {
  *complete = true;
  std::uint64_t atoms = h.empty() ? 0 : h[0].size();
  int n_actions = static_cast<int>(actions.size());
  std::vector<std::pair<int, int>> weak_pairs, strict_pairs;
  for (int x = 0; x < n_actions; ++x) {
    for (int y = 0; y < n_actions; ++y) {
      if (x == y) continue;
      Comparison r = pref.compare(actions[x], actions[y]);
      if (r == Comparison::Better) strict_pairs.emplace_back(x, y);
      if (r != Comparison::Worse) weak_pairs.emplace_back(x, y);
    }
  }
  std::uint64_t steps = 0;
  // delta[atom * K + key] bookkeeping via map (keys are interned ints)
  std::map<std::pair<std::uint64_t, int>, int> delta;
  int nonzero = 0;
  auto apply = [&](int x, int y, int dir) {
    for (std::uint64_t a = 0; a < atoms; ++a) {
      if (h[x][a] == h[y][a]) continue;
      auto bump = [&](int key, int d) {
        auto it = delta.try_emplace(std::make_pair(a, key), 0).first;
        bool was = it->second != 0;
        it->second += d;
        bool now = it->second != 0;
        nonzero += static_cast<int>(now) - static_cast<int>(was);
      };
      bump(h[x][a], dir);
      bump(h[y][a], -dir);
    }
  };
  std::vector<std::pair<int, int>> chosen;
  std::optional<CancellationWitness> found;
  // premises chosen with non-decreasing pool index to avoid permutations
  auto rec = [&](auto&& self, int remaining, std::size_t from) -> void {
    if (found) return;
    if (++steps > step_budget) {
      *complete = false;
      return;
    }
    if (nonzero == 0 && remaining < n_max) {
      // balanced multisets with the conclusion pair placed last
      CancellationWitness w;
      w.origin = "bounded-search";
      for (std::size_t i = 1; i < chosen.size(); ++i) {
        w.a_side.push_back(actions[chosen[i].first]);
        w.b_side.push_back(actions[chosen[i].second]);
      }
      w.a_side.push_back(actions[chosen[0].first]);
      w.b_side.push_back(actions[chosen[0].second]);
      found = std::move(w);
      return;
    }
    if (remaining == 0) return;
    for (std::size_t p = from; p < weak_pairs.size() && !found; ++p) {
      auto [x, y] = weak_pairs[p];
      apply(x, y, 1);
      chosen.emplace_back(x, y);
      self(self, remaining - 1, p);
      chosen.pop_back();
      apply(x, y, -1);
    }
  };
  for (const auto& [x, y] : strict_pairs) {
    apply(x, y, 1);
    chosen.emplace_back(x, y);
    rec(rec, n_max - 1, 0);
    chosen.pop_back();
    apply(x, y, -1);
    if (found || !*complete) break;
  }
  return found;
}

struct OrderLp {
  lp::Problem problem;
  std::vector<int> row_kind;                  // per row: 0 = eq, 1 = gap, 2 = cap
  std::vector<std::pair<int, int>> row_pair;  // per row: (preferred, other); (-1,-1) for cap
};

// Feasibility of an additively separable score respecting the weak order:
// one free variable per merged profile column, plus the margin variable.
// Profiles are 0/1 over columns merged by identical incidence.
inline OrderLp build_order_lp(const std::vector<std::vector<int>>& profiles,
                              const OrderClasses& oc) {
  OrderLp out;
  int cols = 0;
  for (const auto& p : profiles)
    for (int c : p) cols = std::max(cols, c + 1);
  int eps = cols;
  out.problem.num_vars = cols + 1;
  out.problem.objective.assign(cols + 1, Rat(0));
  out.problem.objective[eps] = 1;
  out.problem.nonnegative.assign(cols + 1, false);
  out.problem.nonnegative[eps] = true;
  auto diff_coeffs = [&](int hi, int lo) {
    std::map<int, Rat> c;
    for (int col : profiles[hi]) c[col] += 1;
    for (int col : profiles[lo]) c[col] -= 1;
    std::vector<std::pair<int, Rat>> out_c;
    for (auto& [col, v] : c)
      if (sgn(v) != 0) out_c.emplace_back(col, v);
    return out_c;
  };
  for (std::size_t k = 0; k < oc.classes.size(); ++k) {
    int rep = oc.classes[k][0];
    for (std::size_t m = 1; m < oc.classes[k].size(); ++m) {
      lp::Constraint cons;
      cons.coeffs = diff_coeffs(rep, oc.classes[k][m]);
      cons.rel = lp::Rel::Eq;
      cons.rhs = 0;
      if (cons.coeffs.empty()) continue;  // identical profiles
      out.row_kind.push_back(0);
      out.row_pair.emplace_back(rep, oc.classes[k][m]);
      out.problem.constraints.push_back(std::move(cons));
    }
    if (k + 1 < oc.classes.size()) {
      lp::Constraint cons;
      cons.coeffs = diff_coeffs(rep, oc.classes[k + 1][0]);
      cons.coeffs.emplace_back(eps, Rat(-1));
      cons.rel = lp::Rel::Ge;
      cons.rhs = 0;
      out.row_kind.push_back(1);
      out.row_pair.emplace_back(rep, oc.classes[k + 1][0]);
      out.problem.constraints.push_back(std::move(cons));
    }
  }
  lp::Constraint cap;
  cap.coeffs.emplace_back(eps, Rat(1));
  cap.rel = lp::Rel::Le;
  cap.rhs = 1;
  out.row_kind.push_back(2);
  out.row_pair.emplace_back(-1, -1);
  out.problem.constraints.push_back(std::move(cap));
  return out;
}

// Turn the dual of a zero-margin LP into integer multiplicities and a
// replayable violating tuple. Verified by replay before being reported.
inline std::optional<CancellationWitness> farkas_witness(const PreferenceSource& pref,
                                                         const std::vector<Action>& actions,
                                                         const OrderLp& olp,
                                                         const lp::Solution& sol) {
  mpz_class denom_lcm(1);
  for (const Rat& d : sol.dual) {
    mpz_class den = d.get_den();
    mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), den.get_mpz_t());
  }
  std::vector<std::pair<int, int>> tuple;
  std::optional<std::pair<int, int>> strict_pair;
  for (std::size_t r = 0; r < sol.dual.size(); ++r) {
    if (olp.row_kind[r] == 2) continue;
    Rat scaled = sol.dual[r] * denom_lcm;
    if (scaled.get_den() != 1) return std::nullopt;
    mpz_class count = scaled.get_num();
    if (sgn(count) == 0) continue;
    mpz_class mag = abs(count);
    if (mag > 4096) return std::nullopt;  // implausibly large certificate
    long n = mag.get_si();
    std::pair<int, int> pr = olp.row_pair[r];
    if (olp.row_kind[r] == 1) {
      if (sgn(count) > 0) return std::nullopt;  // gap duals are nonpositive here
      if (!strict_pair) strict_pair = pr;
    } else if (sgn(count) < 0) {
      std::swap(pr.first, pr.second);  // equality rows may pull either way
    }
    for (long i = 0; i < n; ++i) tuple.push_back(pr);
  }
  if (!strict_pair) return std::nullopt;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] == *strict_pair) {
      std::swap(tuple[i], tuple.back());
      break;
    }
  }
  CancellationWitness w;
  w.origin = "lp-certificate";
  for (auto [x, y] : tuple) {
    w.a_side.push_back(actions[x]);
    w.b_side.push_back(actions[y]);
  }
  if (!replay_cancellation(pref, w)) return std::nullopt;
  return w;
}

}  // namespace detail

// Axiom A1 (Cancellation). Two sub-checks, both reported: a bounded direct
// search over tuples from the presented list, and a linear-feasibility
// certificate for an additively separable score over the presented set. The
// certificate is decisive on the presented set; the search yields small
// witnesses and covers the certificate's blind spot for tuple extraction.
inline CancellationResult check_cancellation(const PreferenceSource& pref,
                                             const std::vector<Action>& actions,
                                             CancellationOptions opts = {}) {
  CancellationResult result;
  AxiomReport& rep = result.report;
  rep.axiom = "A1";
  std::uint64_t before = pref.queries_issued();
  try {
    const Signature& sig = pref.signature();
    std::vector<std::string> ext_keys;
    std::vector<std::vector<int>> h = detail::intern_h_tables(sig, actions, &ext_keys);

    // extensionally equal actions must be indifferent (the n = 1 instance)
    std::map<std::string, int> first_with_key;
    for (int i = 0; i < static_cast<int>(actions.size()); ++i) {
      auto [it, fresh] = first_with_key.emplace(ext_keys[i], i);
      if (fresh) continue;
      Comparison r = pref.compare(actions[it->second], actions[i]);
      if (r != Comparison::Equivalent) {
        CancellationWitness w;
        w.origin = "h-equal-pair";
        int a = r == Comparison::Better ? it->second : i;
        int b = r == Comparison::Better ? i : it->second;
        w.a_side.push_back(actions[a]);
        w.b_side.push_back(actions[b]);
        rep.verdict = Verdict::Fail;
        rep.note = "strict preference between extensionally equal actions";
        rep.witness = std::move(w);
        rep.queries_used = pref.queries_issued() - before;
        return result;
      }
    }

    GroupResult grouped = group_actions(pref, actions);
    if (grouped.incoherence) {
      rep.verdict = Verdict::Fail;
      rep.note = "presented preferences are not a weak order";
      rep.witness = detail::incoherence_witness(grouped.classes, actions, *grouped.incoherence);
      rep.queries_used = pref.queries_issued() - before;
      return result;
    }
    OrderClasses oc = std::move(grouped.classes);

    std::optional<CancellationWitness> search_hit = detail::cancellation_search(
        pref, actions, h, opts.n_max, opts.search_steps, &result.search_complete);
    if (search_hit) {
      rep.verdict = Verdict::Fail;
      rep.note = "violating tuple found by direct search (n <= " + std::to_string(opts.n_max) + ")";
      rep.witness = std::move(*search_hit);
      rep.queries_used = pref.queries_issued() - before;
      return result;
    }

    // merge (atom, h value) columns with identical incidence across actions
    std::uint64_t atoms = sig.atom_count();
    std::map<std::vector<int>, int> col_of_incidence;
    std::vector<std::vector<int>> profiles(actions.size());
    for (std::uint64_t a = 0; a < atoms; ++a) {
      std::map<int, std::vector<int>> by_key;
      for (int i = 0; i < static_cast<int>(actions.size()); ++i) by_key[h[i][a]].push_back(i);
      for (auto& [key, incidence] : by_key) {
        auto [it, fresh] =
            col_of_incidence.emplace(incidence, static_cast<int>(col_of_incidence.size()));
        if (fresh)
          for (int i : incidence) profiles[i].push_back(it->second);
      }
    }

    detail::OrderLp olp = detail::build_order_lp(profiles, oc);
    lp::Solution sol = lp::solve(olp.problem);
    result.lp_feasible = sol.status == lp::Status::Optimal && sgn(sol.objective) > 0;
    result.classes = std::move(oc);
    if (result.lp_feasible) {
      rep.verdict = Verdict::Pass;
      rep.note = std::string("separable score exists (margin certificate); direct search ") +
                 (result.search_complete ? "complete" : "budget-truncated") + " at n <= " +
                 std::to_string(opts.n_max);
    } else {
      rep.verdict = Verdict::Fail;
      rep.note = "no separable score over the presented actions";
      if (auto w = detail::farkas_witness(pref, actions, olp, sol))
        rep.witness = std::move(*w);
      else
        rep.note += "; dual certificate could not be folded into a tuple";
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  } catch (const UncoveredActionError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  rep.queries_used = pref.queries_issued() - before;
  return result;
}

// Contexts with their unique non-null atom, where one exists.
struct CdaggerMap {
  std::vector<std::optional<std::uint64_t>> atom_of_context;

  std::vector<std::uint64_t> context_indices() const {
    std::vector<std::uint64_t> out;
    for (std::size_t c = 0; c < atom_of_context.size(); ++c)
      if (atom_of_context[c]) out.push_back(c);
    return out;
  }
};

struct UniquenessResult {
  AxiomReport report;
  CdaggerMap c_dagger;
};

// Axiom A2 (Model Uniqueness): at most one non-null atom per context.
inline UniquenessResult check_model_uniqueness(const PreferenceSource& pref) {
  UniquenessResult result;
  AxiomReport& rep = result.report;
  rep.axiom = "A2";
  rep.note = "nullness decided over the finite probe family (full and single-variable assignments)";
  std::uint64_t before = pref.queries_issued();
  const Signature& sig = pref.signature();
  try {
    std::uint64_t ncontexts = sig.context_count();
    std::uint64_t natoms = sig.atom_count();
    result.c_dagger.atom_of_context.assign(ncontexts, std::nullopt);
    for (std::uint64_t a = 0; a < natoms; ++a) {
      Atom atom = atom_at(sig, a);
      if (is_null_atom(pref, atom)) continue;
      std::uint64_t c = context_index(sig, atom_context(sig, atom));
      if (result.c_dagger.atom_of_context[c]) {
        rep.verdict = Verdict::Fail;
        rep.witness = UniquenessWitness{c, *result.c_dagger.atom_of_context[c], a};
        rep.queries_used = pref.queries_issued() - before;
        return result;
      }
      result.c_dagger.atom_of_context[c] = a;
    }
    rep.verdict = Verdict::Pass;
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  } catch (const UncoveredActionError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  rep.queries_used = pref.queries_issued() - before;
  return result;
}

namespace detail {

// All assignments (including the empty one) over subsets of `pool`.
template <typename Fn>
void for_each_assignment(const Signature& sig, const std::vector<VarId>& pool, Fn&& fn) {
  std::vector<int> state(pool.size(), 0);  // 0 = unset, k = range index k-1
  for (;;) {
    std::vector<std::pair<VarId, Value>> pairs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (state[i] > 0) pairs.emplace_back(pool[i], sig.range(pool[i])[state[i] - 1]);
    fn(Assignment::make(sig, std::move(pairs)));
    std::size_t i = 0;
    for (; i < pool.size(); ++i) {
      if (state[i] < static_cast<int>(sig.range(pool[i]).size())) {
        ++state[i];
        break;
      }
      state[i] = 0;
    }
    if (i == pool.size()) return;
  }
}

}  // namespace detail

// Axiom A3 (Definiteness) and A3* (Strong Definiteness). A3 requires the set
// m = {x : do[Y] fixes X=x at the atom} nonempty for every atom; A3* requires
// |m| = 1 at every non-null atom.
inline AxiomReport check_definiteness_impl(const PreferenceSource& pref, bool strong) {
  AxiomReport rep;
  rep.axiom = strong ? "A3*" : "A3";
  std::uint64_t before = pref.queries_issued();
  const Signature& sig = pref.signature();
  try {
    std::uint64_t natoms = sig.atom_count();
    for (std::uint64_t ai = 0; ai < natoms && rep.verdict == Verdict::Pass; ++ai) {
      Atom atom = atom_at(sig, ai);
      if (strong && is_null_atom(pref, atom)) continue;
      for (int xp = 0; xp < sig.endo_count() && rep.verdict == Verdict::Pass; ++xp) {
        VarId x = sig.endo_id(xp);
        std::vector<VarId> pool;
        for (int i = 0; i < sig.endo_count(); ++i)
          if (sig.endo_id(i) != x) pool.push_back(sig.endo_id(i));
        detail::for_each_assignment(sig, pool, [&](const Assignment& asg) {
          if (rep.verdict != Verdict::Pass) return;
          std::vector<Value> m;
          for (Value val : sig.range(x))
            if (pref.fixes(atom, asg, x, val)) m.push_back(val);
          bool bad = strong ? m.size() != 1 : m.empty();
          if (bad) {
            rep.verdict = Verdict::Fail;
            rep.witness = DefinitenessWitness{ai, asg, x, m};
          }
        });
      }
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  } catch (const UncoveredActionError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  rep.queries_used = pref.queries_issued() - before;
  return rep;
}

inline AxiomReport check_definiteness(const PreferenceSource& pref) {
  return check_definiteness_impl(pref, false);
}
inline AxiomReport check_strong_definiteness(const PreferenceSource& pref) {
  return check_definiteness_impl(pref, true);
}

// Axiom A4 (Centeredness): setting variables to their factual values fixes
// every other variable's factual value.
inline AxiomReport check_centeredness(const PreferenceSource& pref) {
  AxiomReport rep;
  rep.axiom = "A4";
  std::uint64_t before = pref.queries_issued();
  const Signature& sig = pref.signature();
  try {
    std::uint64_t natoms = sig.atom_count();
    int ne = sig.endo_count();
    for (std::uint64_t ai = 0; ai < natoms && rep.verdict == Verdict::Pass; ++ai) {
      Atom atom = atom_at(sig, ai);
      for (int xp = 0; xp < ne && rep.verdict == Verdict::Pass; ++xp) {
        VarId x = sig.endo_id(xp);
        std::vector<VarId> pool;
        for (int i = 0; i < ne; ++i)
          if (sig.endo_id(i) != x) pool.push_back(sig.endo_id(i));
        std::uint64_t subsets = std::uint64_t{1} << pool.size();
        for (std::uint64_t mask = 0; mask < subsets && rep.verdict == Verdict::Pass; ++mask) {
          std::vector<std::pair<VarId, Value>> pairs;
          std::vector<VarId> vars;
          for (std::size_t k = 0; k < pool.size(); ++k) {
            if (mask & (std::uint64_t{1} << k)) {
              pairs.emplace_back(pool[k], atom.values[pool[k]]);
              vars.push_back(pool[k]);
            }
          }
          Assignment asg = Assignment::make(sig, std::move(pairs));
          if (!pref.fixes(atom, asg, x, atom.values[x])) {
            rep.verdict = Verdict::Fail;
            rep.witness = CenteringWitness{ai, vars, x};
          }
        }
      }
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  } catch (const UncoveredActionError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  rep.queries_used = pref.queries_issued() - before;
  return rep;
}

struct RecursivityResult {
  AxiomReport report;
  AffectsGraph graph;
};

// Axiom A5 (Recursivity): the affects relation, accumulated over non-null
// atoms, must be acyclic.
inline RecursivityResult check_recursivity(const PreferenceSource& pref) {
  RecursivityResult result;
  AxiomReport& rep = result.report;
  rep.axiom = "A5";
  std::uint64_t before = pref.queries_issued();
  const Signature& sig = pref.signature();
  try {
    result.graph = affects_graph(pref);
    int n = result.graph.endo_count;
    // Kahn; leftover nodes contain a cycle
    std::vector<int> indeg(n, 0);
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e)
        if (result.graph.adj[c][e]) ++indeg[e];
    std::vector<bool> removed(n, false);
    for (bool progress = true; progress;) {
      progress = false;
      for (int v = 0; v < n; ++v) {
        if (!removed[v] && indeg[v] == 0) {
          removed[v] = true;
          progress = true;
          for (int e = 0; e < n; ++e)
            if (result.graph.adj[v][e]) --indeg[e];
        }
      }
    }
    std::vector<VarId> cycle;
    int start = -1;
    for (int v = 0; v < n; ++v)
      if (!removed[v]) start = v;
    if (start >= 0) {
      // every leftover node keeps an incoming edge from a leftover node, so
      // walking predecessors must revisit a node; reverse to edge orientation
      std::vector<int> stamp(n, -1);
      std::vector<int> path;
      int cur = start;
      for (;;) {
        if (stamp[cur] >= 0) {
          for (std::size_t i = path.size(); i-- > static_cast<std::size_t>(stamp[cur]);)
            cycle.push_back(sig.endo_id(path[i]));
          break;
        }
        stamp[cur] = static_cast<int>(path.size());
        path.push_back(cur);
        for (int p = 0; p < n; ++p) {
          if (!removed[p] && result.graph.adj[p][cur]) {
            cur = p;
            break;
          }
        }
      }
      RecursivityWitness w;
      w.cycle = cycle;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        VarId from = cycle[i];
        VarId to = cycle[(i + 1) % cycle.size()];
        for (const AffectsEdge& edge : result.graph.edges)
          if (edge.cause == from && edge.effect == to) {
            w.evidence.push_back(edge);
            break;
          }
      }
      rep.verdict = Verdict::Fail;
      rep.witness = std::move(w);
    } else {
      rep.verdict = Verdict::Pass;
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  } catch (const UncoveredActionError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  rep.queries_used = pref.queries_issued() - before;
  return result;
}

struct CheckOptions {
  CancellationOptions cancellation;
};

struct CheckAllResult {
  std::vector<AxiomReport> reports;  // A1, A2, A3, A3*, A4, A5
  CdaggerMap c_dagger;
  AffectsGraph graph;
  std::optional<OrderClasses> classes;
  bool all_pass = false;      // A1-A5 (A3* excluded: it gates identification only)
  bool inconclusive = false;  // any A1-A5 inconclusive

  const AxiomReport& report(const std::string& axiom) const {
    for (const AxiomReport& r : reports)
      if (r.axiom == axiom) return r;
    throw Error("no such axiom report: " + axiom);
  }
};

inline CheckAllResult check_all(const PreferenceSource& pref, const std::vector<Action>& actions,
                                CheckOptions opts = {}) {
  CheckAllResult out;
  CancellationResult a1 = check_cancellation(pref, actions, opts.cancellation);
  out.classes = a1.classes;
  out.reports.push_back(std::move(a1.report));
  UniquenessResult a2 = check_model_uniqueness(pref);
  out.c_dagger = std::move(a2.c_dagger);
  out.reports.push_back(std::move(a2.report));
  out.reports.push_back(check_definiteness(pref));
  out.reports.push_back(check_strong_definiteness(pref));
  out.reports.push_back(check_centeredness(pref));
  RecursivityResult a5 = check_recursivity(pref);
  out.graph = std::move(a5.graph);
  out.reports.push_back(std::move(a5.report));
  out.all_pass = true;
  for (const AxiomReport& r : out.reports) {
    if (r.axiom == "A3*") continue;
    if (r.verdict != Verdict::Pass) out.all_pass = false;
    if (r.verdict == Verdict::Inconclusive) out.inconclusive = true;
  }
  return out;
}

// Replays for the remaining witness kinds.

inline bool replay_uniqueness(const PreferenceSource& pref, const UniquenessWitness& w) {
  const Signature& sig = pref.signature();
  Atom a1 = atom_at(sig, w.atom1);
  Atom a2 = atom_at(sig, w.atom2);
  if (context_index(sig, atom_context(sig, a1)) != w.context_idx) return false;
  if (context_index(sig, atom_context(sig, a2)) != w.context_idx) return false;
  return !is_null_atom(pref, a1) && !is_null_atom(pref, a2);
}

inline bool replay_definiteness(const PreferenceSource& pref, const DefinitenessWitness& w,
                                bool strong) {
  const Signature& sig = pref.signature();
  Atom atom = atom_at(sig, w.atom_idx);
  std::vector<Value> m;
  for (Value val : sig.range(w.var))
    if (pref.fixes(atom, w.assignment, w.var, val)) m.push_back(val);
  if (m != w.fixed_values) return false;
  return strong ? m.size() != 1 : m.empty();
}

inline bool replay_centering(const PreferenceSource& pref, const CenteringWitness& w) {
  const Signature& sig = pref.signature();
  Atom atom = atom_at(sig, w.atom_idx);
  std::vector<std::pair<VarId, Value>> pairs;
  for (VarId v : w.vars) pairs.emplace_back(v, atom.values[v]);
  Assignment asg = Assignment::make(sig, std::move(pairs));
  return !pref.fixes(atom, asg, w.var, atom.values[w.var]);
}

inline bool replay_recursivity(const PreferenceSource& pref, const RecursivityWitness& w) {
  const Signature& sig = pref.signature();
  if (w.cycle.empty() || w.evidence.size() != w.cycle.size()) return false;
  for (const AffectsEdge& e : w.evidence) {
    Atom atom = atom_at(sig, e.atom_idx);
    if (is_null_atom(pref, atom)) return false;
    std::vector<std::pair<VarId, Value>> ext(e.witness.base.pairs());
    ext.emplace_back(e.cause, e.witness.cause_value);
    Assignment zy = Assignment::make(sig, std::move(ext));
    bool without = pref.fixes(atom, e.witness.base, e.effect, e.witness.effect_value);
    bool with = pref.fixes(atom, zy, e.effect, e.witness.effect_value);
    if (without == with) return false;
  }
  return true;
}

}  // namespace causalrep
