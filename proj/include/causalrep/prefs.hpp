#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/rational.hpp"

namespace causalrep {

// (M, p, mu): a causal model, a probability on contexts, a utility on atoms.
struct Representation {
  CausalModel model;
  std::vector<Rat> prob;  // indexed by context_index
  std::vector<Rat> util;  // indexed by atom_index

  static Representation make(CausalModel model, std::vector<Rat> prob, std::vector<Rat> util) {
    const Signature& sig = model.signature();
    if (!model.recursive()) throw ModelError("representation model must be recursive");
    if (prob.size() != sig.context_count()) throw ModelError("prob must cover every context");
    if (util.size() != sig.atom_count()) throw ModelError("util must cover every atom");
    Rat total(0);
    for (const Rat& p : prob) {
      if (sgn(p) < 0) throw ModelError("negative probability");
      total += p;
    }
    if (total != 1) throw ModelError("probabilities must sum to 1, got " + rat_str(total));
    return Representation{std::move(model), std::move(prob), std::move(util)};
  }
};

// Eq-style expected utility: sum over contexts of p(u) * mu(outcome of A at u).
inline Rat expected_utility(const Representation& rep, const Action& action) {
  const Signature& sig = rep.model.signature();
  Rat total(0);
  std::uint64_t ncontexts = sig.context_count();
  for (std::uint64_t c = 0; c < ncontexts; ++c) {
    if (sgn(rep.prob[c]) == 0) continue;
    Atom outcome = beta(rep.model, action, context_at(sig, c));
    Rat t = rep.prob[c] * rep.util[atom_index(sig, outcome)];
    total += t;
  }
  return total;
}

enum class Comparison { Worse = -1, Equivalent = 0, Better = 1 };

inline Comparison invert(Comparison c) {
  return static_cast<Comparison>(-static_cast<int>(c));
}

struct QueryBudget {
  std::uint64_t max_queries = 1'000'000'000;
  std::uint64_t issued = 0;
};

// A weak order over actions, answered by queries. Derived classes supply the
// actual comparison; this base memoizes answers, enforces symmetry, counts
// the budget, and caches the fixes and nullness relations that the axiom
// checkers drive through it.
class PreferenceSource {
 public:
  explicit PreferenceSource(Signature sig) : sig_(std::move(sig)) {}
  virtual ~PreferenceSource() = default;

  const Signature& signature() const { return sig_; }

  // Better = first argument strictly preferred.
  Comparison compare(const Action& a, const Action& b) const {
    std::string ka = to_string(a, sig_);
    std::string kb = to_string(b, sig_);
    if (ka == kb) return Comparison::Equivalent;
    bool flip = kb < ka;
    std::string key = flip ? kb + "\x1f" + ka : ka + "\x1f" + kb;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = compare_memo_.find(key);
      if (it != compare_memo_.end()) return flip ? invert(it->second) : it->second;
      if (budget_.issued >= budget_.max_queries)
        throw BudgetError("preference query budget exhausted");
      ++budget_.issued;
    }
    Comparison r = flip ? invert(evaluate(b, a)) : evaluate(a, b);
    std::lock_guard<std::mutex> lock(mutex_);
    compare_memo_.emplace(std::move(key), r);
    return r;
  }

  bool indifferent(const Action& a, const Action& b) const {
    return compare(a, b) == Comparison::Equivalent;
  }
  // A is weakly preferred to B.
  bool weakly_prefers(const Action& a, const Action& b) const {
    return compare(a, b) != Comparison::Worse;
  }

  // do[asg] ~> (var = val) at `atom`: the extra intervention changes nothing.
  bool fixes(const Atom& atom, const Assignment& asg, VarId var, Value val) const {
    if (asg.contains(var)) throw ModelError("fixes: variable already in assignment");
    if (sig_.is_exogenous(var)) throw ModelError("fixes: exogenous variable");
    if (sig_.range_index(var, val) < 0) throw ModelError("fixes: value out of range");
    std::string key = fixes_key(atom, asg, var, val);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = fixes_memo_.find(key);
      if (it != fixes_memo_.end()) return it->second;
    }
    Formula guard = atom_formula(sig_, atom);
    std::vector<std::pair<VarId, Value>> extended(asg.pairs());
    extended.emplace_back(var, val);
    Action with_extra = Action::conditional(
        guard, Action::primitive(Assignment::make(sig_, std::move(extended))), Action::nothing());
    Action without = Action::conditional(guard, Action::primitive(asg), Action::nothing());
    bool result = indifferent(with_extra, without);
    std::lock_guard<std::mutex> lock(mutex_);
    fixes_memo_.emplace(std::move(key), result);
    return result;
  }

  std::uint64_t queries_issued() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return budget_.issued;
  }
  void set_budget(std::uint64_t max_queries) {
    std::lock_guard<std::mutex> lock(mutex_);
    budget_.max_queries = max_queries;
  }
  const QueryBudget& budget() const { return budget_; }

  const std::vector<Action>& presented_actions() const { return presented_; }
  void set_presented_actions(std::vector<Action> actions) { presented_ = std::move(actions); }

 protected:
  virtual Comparison evaluate(const Action& a, const Action& b) const = 0;

 private:
  std::string fixes_key(const Atom& atom, const Assignment& asg, VarId var, Value val) const {
    std::string key = std::to_string(atom_index(sig_, atom));
    key += '|';
    for (const auto& [v, x] : asg.pairs()) {
      key += std::to_string(v);
      key += '=';
      key += std::to_string(x);
      key += ',';
    }
    key += '|';
    key += std::to_string(var);
    key += '=';
    key += std::to_string(val);
    return key;
  }

  Signature sig_;
  std::vector<Action> presented_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Comparison> compare_memo_;
  mutable std::map<std::string, bool> fixes_memo_;
  mutable QueryBudget budget_;
};

// Oracle induced by a representation: compare by exact expected utility.
// Expected utilities are cached on the extensional form of the action, which
// is sound here because Eq-1 scoring only reads the h table.
class EuOracle : public PreferenceSource {
 public:
  explicit EuOracle(Representation rep)
      : PreferenceSource(rep.model.signature()), rep_(std::move(rep)) {
    const Signature& sig = rep_.model.signature();
    std::uint64_t n = sig.context_count();
    factual_.reserve(n);
    for (std::uint64_t c = 0; c < n; ++c)
      factual_.push_back(solve(rep_.model, context_at(sig, c)));
  }

  const Representation& representation() const { return rep_; }

  Rat expected_utility_of(const Action& a) const {
    ExtensionalAction ext(a, signature());
    return eu_by_ext(ext);
  }

 protected:
  Comparison evaluate(const Action& a, const Action& b) const override {
    ExtensionalAction ea(a, signature());
    ExtensionalAction eb(b, signature());
    if (ea.key() == eb.key()) return Comparison::Equivalent;
    Rat ua = eu_by_ext(ea);
    Rat ub = eu_by_ext(eb);
    int s = cmp(ua, ub);
    return s > 0 ? Comparison::Better : s < 0 ? Comparison::Worse : Comparison::Equivalent;
  }

 private:
  Rat eu_by_ext(const ExtensionalAction& ext) const {
    {
      std::lock_guard<std::mutex> lock(eu_mutex_);
      auto it = eu_memo_.find(ext.key());
      if (it != eu_memo_.end()) return it->second;
    }
    const Signature& sig = rep_.model.signature();
    Rat total(0);
    for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
      if (sgn(rep_.prob[c]) == 0) continue;
      const Assignment& chosen = ext.at(atom_index(sig, factual_[c]));
      Atom outcome = solve_do(rep_.model, context_at(sig, c), chosen);
      Rat t = rep_.prob[c] * rep_.util[atom_index(sig, outcome)];
      total += t;
    }
    std::lock_guard<std::mutex> lock(eu_mutex_);
    eu_memo_.emplace(ext.key(), total);
    return total;
  }

  Representation rep_;
  std::vector<Atom> factual_;  // solve(M,u) per context
  mutable std::mutex eu_mutex_;
  mutable std::map<std::string, Rat> eu_memo_;
};

// Finite table: listed actions with integer ranks, lower rank preferred.
// Lookup is first by canonical printed form, then by extensional form when
// that is unambiguous in the table.
class TableSource : public PreferenceSource {
 public:
  TableSource(Signature sig, std::vector<Action> actions, std::vector<long long> ranks)
      : PreferenceSource(sig), ranks_(std::move(ranks)) {
    if (actions.size() != ranks_.size())
      throw ModelError("preference table: actions and ranks differ in length");
    for (std::size_t i = 0; i < actions.size(); ++i) {
      std::string printed = to_string(actions[i], signature());
      auto [it, fresh] = by_text_.emplace(printed, ranks_[i]);
      if (!fresh && it->second != ranks_[i])
        throw ModelError("preference table: action '" + printed + "' listed with two ranks");
      std::string ext = ExtensionalAction(actions[i], signature()).key();
      auto [eit, efresh] = by_ext_.emplace(ext, std::optional<long long>(ranks_[i]));
      if (!efresh && eit->second != ranks_[i]) eit->second = std::nullopt;  // ambiguous
    }
    set_presented_actions(std::move(actions));
  }

 protected:
  Comparison evaluate(const Action& a, const Action& b) const override {
    long long ra = rank_of(a);
    long long rb = rank_of(b);
    return ra < rb ? Comparison::Better : ra > rb ? Comparison::Worse : Comparison::Equivalent;
  }

 private:
  long long rank_of(const Action& a) const {
    auto it = by_text_.find(to_string(a, signature()));
    if (it != by_text_.end()) return it->second;
    auto eit = by_ext_.find(ExtensionalAction(a, signature()).key());
    if (eit != by_ext_.end()) {
      if (!eit->second)
        throw UncoveredActionError(
            "preference table ranks extensionally equal actions inconsistently; cannot resolve '" +
            to_string(a, signature()) + "'");
      return *eit->second;
    }
    throw UncoveredActionError("preference table does not cover action '" +
                               to_string(a, signature()) + "'");
  }

  std::vector<long long> ranks_;
  std::map<std::string, long long> by_text_;
  std::map<std::string, std::optional<long long>> by_ext_;
};

// Arbitrary comparison callback; used for synthetic sources in tests.
class CallbackOracle : public PreferenceSource {
 public:
  using Fn = std::function<Comparison(const Action&, const Action&)>;
  CallbackOracle(Signature sig, Fn fn) : PreferenceSource(std::move(sig)), fn_(std::move(fn)) {}

 protected:
  Comparison evaluate(const Action& a, const Action& b) const override { return fn_(a, b); }

 private:
  Fn fn_;
};

inline std::shared_ptr<PreferenceSource> induce_preferences(Representation rep,
                                                            std::vector<Action> actions) {
  auto oracle = std::make_shared<EuOracle>(std::move(rep));
  oracle->set_presented_actions(std::move(actions));
  return oracle;
}

inline bool fixes(const PreferenceSource& pref, const Atom& atom, const Assignment& asg,
                  VarId var, Value val) {
  return pref.fixes(atom, asg, var, val);
}

// Probe family for nullness: every full assignment to the endogenous
// variables plus every single-variable assignment. Full assignments realize
// every reachable outcome; singletons catch one-variable effects directly.
inline std::vector<Assignment> nullness_probes(const Signature& sig) {
  std::vector<Assignment> probes;
  std::vector<VarId> endo(sig.endo_count());
  for (int i = 0; i < sig.endo_count(); ++i) endo[i] = sig.endo_id(i);
  // full assignments, lexicographic
  std::uint64_t total = 1;
  for (VarId v : endo) total *= sig.range(v).size();
  if (total > (std::uint64_t{1} << 16))
    throw SizeError("endogenous space too large for nullness probes");
  for (std::uint64_t i = 0; i < total; ++i) {
    std::uint64_t rest = i;
    std::vector<std::pair<VarId, Value>> pairs;
    for (int k = sig.endo_count() - 1; k >= 0; --k) {
      std::uint64_t r = sig.range(endo[k]).size();
      pairs.emplace_back(endo[k], sig.range(endo[k])[rest % r]);
      rest /= r;
    }
    probes.push_back(Assignment::make(sig, std::move(pairs)));
  }
  if (sig.endo_count() > 1) {
    for (VarId v : endo)
      for (Value val : sig.range(v))
        probes.push_back(Assignment::make(sig, {{v, val}}));
  }
  return probes;
}

// An atom is null when conditioning on it makes every pair of probe actions
// indifferent. This decides nullness over the finite probe family rather
// than all actions; the checkers flag that in their reports.
inline bool is_null_atom(const PreferenceSource& pref, const Atom& atom) {
  const Signature& sig = pref.signature();
  Formula guard = atom_formula(sig, atom);
  std::vector<Assignment> probes = nullness_probes(sig);
  std::vector<Action> acts;
  acts.reserve(probes.size());
  for (const Assignment& p : probes)
    acts.push_back(Action::conditional(guard, Action::primitive(p), Action::nothing()));
  for (std::size_t i = 0; i < acts.size(); ++i)
    for (std::size_t j = i + 1; j < acts.size(); ++j)
      if (!pref.indifferent(acts[i], acts[j])) return false;
  return true;
}

inline bool is_null_formula(const PreferenceSource& pref, const Formula& f) {
  const Signature& sig = pref.signature();
  std::uint64_t n = sig.atom_count();
  for (std::uint64_t i = 0; i < n; ++i) {
    Atom a = atom_at(sig, i);
    if (atom_implies(sig, a, f) && !is_null_atom(pref, a)) return false;
  }
  return true;
}

// Witness that `effect` reacts to an intervention on `cause` at this atom.
struct AffectWitness {
  Assignment base;        // do[Z <- z]
  Value cause_value = 0;  // y
  Value effect_value = 0; // x
  bool fixes_without = false;
  bool fixes_with = false;
};

// Scans all Z <- z over V \ {cause, effect} and all (y, x) for a violation of
// the unaffectedness biconditional.
inline std::optional<AffectWitness> affected(const PreferenceSource& pref, const Atom& atom,
                                             VarId cause, VarId effect) {
  const Signature& sig = pref.signature();
  if (cause == effect) throw ModelError("affected: cause equals effect");
  std::vector<VarId> others;
  for (int i = 0; i < sig.endo_count(); ++i) {
    VarId v = sig.endo_id(i);
    if (v != cause && v != effect) others.push_back(v);
  }
  std::uint64_t subsets = std::uint64_t{1} << others.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    std::vector<VarId> zvars;
    for (std::size_t k = 0; k < others.size(); ++k)
      if (mask & (std::uint64_t{1} << k)) zvars.push_back(others[k]);
    std::uint64_t tuples = 1;
    for (VarId v : zvars) tuples *= sig.range(v).size();
    for (std::uint64_t t = 0; t < tuples; ++t) {
      std::uint64_t rest = t;
      std::vector<std::pair<VarId, Value>> zpairs;
      for (int k = static_cast<int>(zvars.size()) - 1; k >= 0; --k) {
        std::uint64_t r = sig.range(zvars[k]).size();
        zpairs.emplace_back(zvars[k], sig.range(zvars[k])[rest % r]);
        rest /= r;
      }
      Assignment z = Assignment::make(sig, zpairs);
      for (Value y : sig.range(cause)) {
        std::vector<std::pair<VarId, Value>> zy(zpairs);
        zy.emplace_back(cause, y);
        Assignment zext = Assignment::make(sig, std::move(zy));
        for (Value x : sig.range(effect)) {
          bool without = pref.fixes(atom, z, effect, x);
          bool with = pref.fixes(atom, zext, effect, x);
          if (without != with)
            return AffectWitness{z, y, x, without, with};
        }
      }
    }
  }
  return std::nullopt;
}

struct AffectsEdge {
  VarId cause = -1;
  VarId effect = -1;
  std::uint64_t atom_idx = 0;
  AffectWitness witness;
};

struct AffectsGraph {
  int endo_count = 0;
  std::vector<std::vector<bool>> adj;  // adj[cause_pos][effect_pos]
  std::vector<AffectsEdge> edges;     // one witness per edge

  bool has_edge(int cause_pos, int effect_pos) const { return adj[cause_pos][effect_pos]; }
};

// Union over non-null atoms of the per-atom affects relation. Null atoms
// cannot contribute: every conditional on them is indifferent, so the
// biconditional holds vacuously.
inline AffectsGraph affects_graph(const PreferenceSource& pref) {
  const Signature& sig = pref.signature();
  AffectsGraph g;
  g.endo_count = sig.endo_count();
  g.adj.assign(g.endo_count, std::vector<bool>(g.endo_count, false));
  std::uint64_t n = sig.atom_count();
  for (std::uint64_t i = 0; i < n; ++i) {
    Atom a = atom_at(sig, i);
    if (is_null_atom(pref, a)) continue;
    for (int cp = 0; cp < g.endo_count; ++cp) {
      for (int ep = 0; ep < g.endo_count; ++ep) {
        if (cp == ep || g.adj[cp][ep]) continue;
        if (auto w = affected(pref, a, sig.endo_id(cp), sig.endo_id(ep))) {
          g.adj[cp][ep] = true;
          g.edges.push_back(AffectsEdge{sig.endo_id(cp), sig.endo_id(ep), i, *w});
        }
      }
    }
  }
  return g;
}

}  // namespace causalrep
