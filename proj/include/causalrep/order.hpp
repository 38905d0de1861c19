#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/rng.hpp"

namespace causalrep {

// A strict linear order over all variables with the exogenous block first.
struct VarOrder {
  std::vector<VarId> sequence;
  std::vector<int> position;  // var id -> index in sequence

  static VarOrder make(const Signature& sig, std::vector<VarId> seq) {
    if (static_cast<int>(seq.size()) != sig.var_count())
      throw ModelError("variable order must cover every variable");
    std::vector<bool> seen(sig.var_count(), false);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      VarId v = seq[i];
      if (v < 0 || v >= sig.var_count() || seen[v]) throw ModelError("bad variable order");
      seen[v] = true;
      if (sig.is_exogenous(v) && i >= static_cast<std::size_t>(sig.exo_count()))
        throw ModelError("exogenous variables must precede endogenous ones");
    }
    VarOrder o;
    o.position.resize(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) o.position[seq[i]] = static_cast<int>(i);
    o.sequence = std::move(seq);
    return o;
  }
};

// Per (base atom, variable) value orders with the base atom's value first.
// The tail completion is one of the admissible arbitrary choices, so it is a
// pure function of (seed, atom, variable) and varied across trials.
class ValueOrders {
 public:
  enum class Tail { Declared, Reversed, Shuffled };

  ValueOrders(const Signature& sig, Tail tail = Tail::Declared, std::uint64_t seed = 0)
      : sig_(&sig), tail_(tail), seed_(seed) {}

  std::vector<Value> order(const Atom& base, VarId v) const {
    const std::vector<Value>& range = sig_->range(v);
    Value first = base.values[v];
    std::vector<Value> rest;
    rest.reserve(range.size() - 1);
    for (Value x : range)
      if (x != first) rest.push_back(x);
    switch (tail_) {
      case Tail::Declared:
        break;
      case Tail::Reversed:
        std::reverse(rest.begin(), rest.end());
        break;
      case Tail::Shuffled: {
        SplitMix64 rng(mix_seed(seed_, atom_index(*sig_, base) * 8191 + static_cast<std::uint64_t>(v)));
        rng.shuffle(rest);
        break;
      }
    }
    std::vector<Value> out;
    out.reserve(range.size());
    out.push_back(first);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }

  int rank(const Atom& base, VarId v, Value val) const {
    std::vector<Value> o = order(base, v);
    for (std::size_t i = 0; i < o.size(); ++i)
      if (o[i] == val) return static_cast<int>(i);
    throw ModelError("value not in range");
  }

  const Signature& signature() const { return *sig_; }

 private:
  const Signature* sig_;
  Tail tail_;
  std::uint64_t seed_;
};

// Decides whether intervening do[z] at `base` pins `var` to `val`. Driven by
// a preference source in the construction and by the model itself when the
// closeness order is read off a causal model.
using FixesFn = std::function<bool(const Atom& base, const Assignment& z, VarId var, Value val)>;

// The per-atom closeness family <_a: a lexicographic sweep along the variable
// order, ranking each candidate value first by whether the intervention on
// the shared prefix pins it and then by the per-atom value order. Exogenous
// positions compare by the value order alone.
class AtomCloseness {
 public:
  AtomCloseness(const Signature& sig, VarOrder var_order, ValueOrders value_orders, FixesFn fixes)
      : sig_(&sig),
        var_order_(std::move(var_order)),
        value_orders_(std::move(value_orders)),
        fixes_(std::move(fixes)) {}

  const VarOrder& var_order() const { return var_order_; }
  const ValueOrders& value_orders() const { return value_orders_; }

  // b <_base c
  bool less(const Atom& base, const Atom& b, const Atom& c) const {
    for (VarId v : var_order_.sequence) {
      if (b.values[v] == c.values[v]) continue;
      auto kb = value_key(base, b, v);
      auto kc = value_key(base, c, v);
      return kb < kc;
    }
    return false;
  }

  // Rank of every atom under <_base; rank 0 is base itself.
  std::vector<std::uint32_t> ranks(const Atom& base, std::uint64_t cap = kDefaultEnumCap) const {
    std::uint64_t n = sig_->atom_count();
    if (n > cap) throw SizeError("atom space too large to rank");
    std::vector<std::uint64_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) atoms.push_back(atom_at(*sig_, i));
    std::sort(idx.begin(), idx.end(), [&](std::uint64_t x, std::uint64_t y) {
      return less(base, atoms[x], atoms[y]);
    });
    std::vector<std::uint32_t> rank(n);
    for (std::uint64_t i = 0; i < n; ++i) rank[idx[i]] = static_cast<std::uint32_t>(i);
    return rank;
  }

  // Greedy construction of the <_base-minimal atom satisfying `constraint`:
  // copy the base's exogenous part, take assigned values as given, and give
  // every other variable the key-minimal value against the already-built
  // prefix. Coincides with the enumeration argmin for this order.
  Atom min_satisfying(const Atom& base, const Assignment& constraint,
                      bool* empty_fix_set = nullptr) const {
    if (empty_fix_set) *empty_fix_set = false;
    Atom out;
    out.values.assign(sig_->var_count(), 0);
    for (VarId v : var_order_.sequence) {
      if (sig_->is_exogenous(v)) {
        out.values[v] = base.values[v];
        continue;
      }
      if (auto forced = constraint.value_of(v)) {
        out.values[v] = *forced;
        continue;
      }
      Assignment z = prefix_assignment(out, v);
      std::optional<Value> best;
      for (Value x : value_orders_.order(base, v)) {
        if (fixes_(base, z, v, x)) {
          best = x;
          break;
        }
      }
      if (!best) {
        if (empty_fix_set) *empty_fix_set = true;
        best = value_orders_.order(base, v)[0];
      }
      out.values[v] = *best;
    }
    return out;
  }

  // Enumeration argmin used as the independent cross-check.
  Atom min_satisfying_scan(const Atom& base, const Assignment& constraint,
                           std::uint64_t cap = kDefaultEnumCap) const {
    std::uint64_t n = sig_->atom_count();
    if (n > cap) throw SizeError("atom space too large to scan");
    std::optional<Atom> best;
    for (std::uint64_t i = 0; i < n; ++i) {
      Atom a = atom_at(*sig_, i);
      bool ok = true;
      for (const auto& [var, val] : constraint.pairs())
        if (a.values[var] != val) ok = false;
      if (!ok) continue;
      if (!best || less(base, a, *best)) best = a;
    }
    if (!best) throw ModelError("no atom satisfies the assignment");
    return *best;
  }

  // The set m(base, var) = values the prefix intervention pins, given the
  // values already chosen below `var`.
  std::vector<Value> fix_set(const Atom& base, const Atom& built_prefix, VarId var) const {
    Assignment z = prefix_assignment(built_prefix, var);
    std::vector<Value> m;
    for (Value x : sig_->range(var))
      if (fixes_(base, z, var, x)) m.push_back(x);
    return m;
  }

 private:
  // Endogenous variables strictly below v in the order, with values from `a`.
  Assignment prefix_assignment(const Atom& a, VarId v) const {
    std::vector<std::pair<VarId, Value>> pairs;
    for (VarId w : var_order_.sequence) {
      if (w == v) break;
      if (!sig_->is_exogenous(w)) pairs.emplace_back(w, a.values[w]);
    }
    return Assignment::make(*sig_, std::move(pairs));
  }

  // (pinned?, value-order rank); lexicographically smaller = closer.
  std::pair<int, int> value_key(const Atom& base, const Atom& of, VarId v) const {
    int vr = value_orders_.rank(base, v, of.values[v]);
    if (sig_->is_exogenous(v)) return {0, vr};
    Assignment z = prefix_assignment(of, v);
    bool pinned = fixes_(base, z, v, of.values[v]);
    return {pinned ? 0 : 1, vr};
  }

  const Signature* sig_;
  VarOrder var_order_;
  ValueOrders value_orders_;
  FixesFn fixes_;
};

}  // namespace causalrep
