#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalrep/errors.hpp"

namespace causalrep {

using VarId = int;
using Value = int;

// Default cap on enumerated atom/context spaces.
inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t{1} << 20;

// Variable declarations with finite integer ranges. Exogenous variables get
// ids [0, exo_count), endogenous ids [exo_count, var_count).
class Signature {
 public:
  static Signature make(std::vector<std::string> exogenous,
                        std::vector<std::string> endogenous,
                        const std::map<std::string, std::vector<Value>>& ranges) {
    Signature sig;
    sig.exo_count_ = static_cast<int>(exogenous.size());
    sig.names_ = std::move(exogenous);
    sig.names_.insert(sig.names_.end(), endogenous.begin(), endogenous.end());
    if (sig.exo_count_ == 0) throw ModelError("signature needs at least one exogenous variable");
    for (int i = 0; i < sig.var_count(); ++i) {
      const std::string& n = sig.names_[i];
      if (n.empty()) throw ModelError("empty variable name");
      for (int j = 0; j < i; ++j)
        if (sig.names_[j] == n) throw ModelError("duplicate variable name: " + n);
    }
    sig.ranges_.resize(sig.names_.size());
    for (int i = 0; i < sig.var_count(); ++i) {
      auto it = ranges.find(sig.names_[i]);
      if (it == ranges.end()) throw ModelError("missing range for variable: " + sig.names_[i]);
      const auto& r = it->second;
      if (r.empty()) throw ModelError("empty range for variable: " + sig.names_[i]);
      for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = a + 1; b < r.size(); ++b)
          if (r[a] == r[b])
            throw ModelError("duplicate range value for variable: " + sig.names_[i]);
      sig.ranges_[i] = r;
    }
    if (ranges.size() != sig.names_.size())
      throw ModelError("ranges mention undeclared variables");
    return sig;
  }

  int var_count() const { return static_cast<int>(names_.size()); }
  int exo_count() const { return exo_count_; }
  int endo_count() const { return var_count() - exo_count_; }
  bool is_exogenous(VarId v) const { return v < exo_count_; }
  VarId endo_id(int endo_pos) const { return exo_count_ + endo_pos; }

  const std::string& name(VarId v) const { return names_[v]; }
  const std::vector<Value>& range(VarId v) const { return ranges_[v]; }

  std::optional<VarId> find(std::string_view name) const {
    for (int i = 0; i < var_count(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  // Position of `val` in range(v), or -1.
  int range_index(VarId v, Value val) const {
    const auto& r = ranges_[v];
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] == val) return static_cast<int>(i);
    return -1;
  }

  std::uint64_t atom_count() const { return space_size(0, var_count()); }
  std::uint64_t context_count() const { return space_size(0, exo_count_); }

  bool operator==(const Signature& o) const {
    return exo_count_ == o.exo_count_ && names_ == o.names_ && ranges_ == o.ranges_;
  }

 private:
  std::uint64_t space_size(int from, int to) const {
    std::uint64_t n = 1;
    for (int i = from; i < to; ++i) {
      std::uint64_t r = ranges_[i].size();
      if (n > (std::uint64_t{1} << 62) / r) throw SizeError("variable space size overflows");
      n *= r;
    }
    return n;
  }

  int exo_count_ = 0;
  std::vector<std::string> names_;          // exogenous first, then endogenous
  std::vector<std::vector<Value>> ranges_;  // aligned with names_
};

// Total assignment to all variables, in signature id order.
struct Atom {
  std::vector<Value> values;
  bool operator==(const Atom&) const = default;
};

// Total assignment to the exogenous variables.
struct Context {
  std::vector<Value> values;
  bool operator==(const Context&) const = default;
};

inline void check_atom(const Signature& sig, const Atom& a) {
  if (static_cast<int>(a.values.size()) != sig.var_count())
    throw ModelError("atom has wrong arity");
  for (int v = 0; v < sig.var_count(); ++v)
    if (sig.range_index(v, a.values[v]) < 0)
      throw ModelError("atom value out of range for " + sig.name(v));
}

inline void check_context(const Signature& sig, const Context& c) {
  if (static_cast<int>(c.values.size()) != sig.exo_count())
    throw ModelError("context has wrong arity");
  for (int v = 0; v < sig.exo_count(); ++v)
    if (sig.range_index(v, c.values[v]) < 0)
      throw ModelError("context value out of range for " + sig.name(v));
}

// Lexicographic enumeration in declared variable order: the first variable is
// the most significant digit, values run in declared range order.
inline std::uint64_t atom_index(const Signature& sig, const Atom& a) {
  std::uint64_t idx = 0;
  for (int v = 0; v < sig.var_count(); ++v) {
    int p = sig.range_index(v, a.values[v]);
    if (p < 0) throw ModelError("atom value out of range for " + sig.name(v));
    idx = idx * sig.range(v).size() + static_cast<std::uint64_t>(p);
  }
  return idx;
}

inline Atom atom_at(const Signature& sig, std::uint64_t idx) {
  Atom a;
  a.values.resize(sig.var_count());
  for (int v = sig.var_count() - 1; v >= 0; --v) {
    std::uint64_t r = sig.range(v).size();
    a.values[v] = sig.range(v)[static_cast<std::size_t>(idx % r)];
    idx /= r;
  }
  return a;
}

inline std::uint64_t context_index(const Signature& sig, const Context& c) {
  std::uint64_t idx = 0;
  for (int v = 0; v < sig.exo_count(); ++v) {
    int p = sig.range_index(v, c.values[v]);
    if (p < 0) throw ModelError("context value out of range for " + sig.name(v));
    idx = idx * sig.range(v).size() + static_cast<std::uint64_t>(p);
  }
  return idx;
}

inline Context context_at(const Signature& sig, std::uint64_t idx) {
  Context c;
  c.values.resize(sig.exo_count());
  for (int v = sig.exo_count() - 1; v >= 0; --v) {
    std::uint64_t r = sig.range(v).size();
    c.values[v] = sig.range(v)[static_cast<std::size_t>(idx % r)];
    idx /= r;
  }
  return c;
}

inline Context atom_context(const Signature& sig, const Atom& a) {
  return Context{{a.values.begin(), a.values.begin() + sig.exo_count()}};
}

inline std::vector<Atom> all_atoms(const Signature& sig, std::uint64_t cap = kDefaultEnumCap) {
  std::uint64_t n = sig.atom_count();
  if (n > cap)
    throw SizeError("atom space of size " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  std::vector<Atom> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(atom_at(sig, i));
  return out;
}

inline std::vector<Context> all_contexts(const Signature& sig, std::uint64_t cap = kDefaultEnumCap) {
  std::uint64_t n = sig.context_count();
  if (n > cap)
    throw SizeError("context space of size " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  std::vector<Context> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(context_at(sig, i));
  return out;
}

// Intervention payload: distinct endogenous variables with in-range values,
// kept sorted by variable id.
class Assignment {
 public:
  Assignment() = default;

  static Assignment make(const Signature& sig, std::vector<std::pair<VarId, Value>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto [v, val] = pairs[i];
      if (v < 0 || v >= sig.var_count()) throw ModelError("assignment to unknown variable");
      if (sig.is_exogenous(v))
        throw ModelError("cannot intervene on exogenous variable " + sig.name(v));
      if (sig.range_index(v, val) < 0)
        throw ModelError("assignment value out of range for " + sig.name(v));
      if (i > 0 && pairs[i - 1].first == v)
        throw ModelError("duplicate variable in assignment: " + sig.name(v));
    }
    Assignment a;
    a.pairs_ = std::move(pairs);
    return a;
  }

  const std::vector<std::pair<VarId, Value>>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }

  bool contains(VarId v) const { return value_of(v).has_value(); }

  std::optional<Value> value_of(VarId v) const {
    for (const auto& [var, val] : pairs_)
      if (var == v) return val;
    return std::nullopt;
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::pair<VarId, Value>> pairs_;
};

// Restriction of an atom to an assignment over the given variables.
inline Assignment restrict_atom(const Signature& sig, const Atom& a, const std::vector<VarId>& vars) {
  std::vector<std::pair<VarId, Value>> pairs;
  pairs.reserve(vars.size());
  for (VarId v : vars) pairs.emplace_back(v, a.values[v]);
  return Assignment::make(sig, std::move(pairs));
}

// Structural equation for one endogenous variable, tabulated over an explicit
// parent list. The table is indexed in mixed radix over the parents' range
// positions, first parent most significant.
struct Equation {
  VarId target = -1;
  std::vector<VarId> parents;
  std::vector<Value> table;
};

inline std::uint64_t equation_row_count(const Signature& sig, const Equation& eq) {
  std::uint64_t n = 1;
  for (VarId p : eq.parents) n *= sig.range(p).size();
  return n;
}

class CausalModel {
 public:
  static CausalModel make(Signature sig, std::vector<Equation> equations) {
    if (static_cast<int>(equations.size()) != sig.endo_count())
      throw ModelError("expected one equation per endogenous variable");
    std::vector<Equation> ordered(sig.endo_count());
    std::vector<bool> seen(sig.endo_count(), false);
    for (auto& eq : equations) {
      if (eq.target < sig.exo_count() || eq.target >= sig.var_count())
        throw ModelError("equation target is not endogenous");
      int pos = eq.target - sig.exo_count();
      if (seen[pos]) throw ModelError("duplicate equation for " + sig.name(eq.target));
      seen[pos] = true;
      for (std::size_t i = 0; i < eq.parents.size(); ++i) {
        VarId p = eq.parents[i];
        if (p < 0 || p >= sig.var_count()) throw ModelError("unknown parent id");
        if (p == eq.target)
          throw ModelError("equation for " + sig.name(eq.target) + " lists itself as parent");
        for (std::size_t j = 0; j < i; ++j)
          if (eq.parents[j] == p)
            throw ModelError("duplicate parent " + sig.name(p) + " for " + sig.name(eq.target));
      }
      std::uint64_t rows = 1;
      for (VarId p : eq.parents) rows *= sig.range(p).size();
      if (eq.table.size() != rows)
        throw ModelError("equation table for " + sig.name(eq.target) + " has " +
                         std::to_string(eq.table.size()) + " rows, expected " + std::to_string(rows));
      for (Value v : eq.table)
        if (sig.range_index(eq.target, v) < 0)
          throw ModelError("equation output out of range for " + sig.name(eq.target));
      ordered[pos] = std::move(eq);
    }
    CausalModel m;
    m.sig_ = std::move(sig);
    m.equations_ = std::move(ordered);
    m.compute_order();
    return m;
  }

  const Signature& signature() const { return sig_; }

  const Equation& equation(VarId endo) const { return equations_[endo - sig_.exo_count()]; }
  const std::vector<Equation>& equations() const { return equations_; }

  bool recursive() const { return cycle_.empty(); }
  // Topological order over endogenous ids (empty iff model has a cycle).
  const std::vector<VarId>& dependency_order() const { return order_; }
  const std::vector<VarId>& cycle() const { return cycle_; }

  Value eval_equation(VarId endo, const std::vector<Value>& values) const {
    const Equation& eq = equation(endo);
    std::uint64_t idx = 0;
    for (VarId p : eq.parents) {
      int pos = sig_.range_index(p, values[p]);
      idx = idx * sig_.range(p).size() + static_cast<std::uint64_t>(pos);
    }
    return eq.table[idx];
  }

 private:
  // Kahn's algorithm over declared parents restricted to endogenous
  // variables; ties broken by declaration order.
  void compute_order() {
    int n = sig_.endo_count();
    std::vector<std::vector<int>> children(n);
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i) {
      for (VarId p : equations_[i].parents) {
        if (!sig_.is_exogenous(p)) {
          children[p - sig_.exo_count()].push_back(i);
          ++indeg[i];
        }
      }
    }
    std::vector<int> pending = indeg;
    order_.clear();
    for (bool progress = true; progress;) {
      progress = false;
      for (int i = 0; i < n; ++i) {
        if (pending[i] == 0) {
          pending[i] = -1;
          order_.push_back(sig_.endo_id(i));
          for (int c : children[i]) --pending[c];
          progress = true;
        }
      }
    }
    if (static_cast<int>(order_.size()) == n) return;
    // Walk parent links among the leftover variables until a vertex repeats.
    order_.clear();
    std::vector<int> stamp(n, -1);
    int cur = 0;
    while (pending[cur] < 0) ++cur;
    std::vector<int> path;
    for (;;) {
      if (stamp[cur] >= 0) {
        // path walks parent links; reverse the loop to dependency order
        for (std::size_t i = path.size(); i-- > static_cast<std::size_t>(stamp[cur]);)
          cycle_.push_back(sig_.endo_id(path[i]));
        return;
      }
      stamp[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      for (VarId p : equations_[cur].parents) {
        if (!sig_.is_exogenous(p) && pending[p - sig_.exo_count()] >= 0) {
          cur = p - sig_.exo_count();
          break;
        }
      }
    }
  }

  Signature sig_;
  std::vector<Equation> equations_;
  std::vector<VarId> order_;
  std::vector<VarId> cycle_;
};

struct RecursivityCheck {
  std::vector<VarId> order;  // meaningful iff recursive
  std::vector<VarId> cycle;  // nonempty iff not recursive
  bool recursive() const { return cycle.empty(); }
};

inline RecursivityCheck check_recursive(const CausalModel& m) {
  return RecursivityCheck{m.dependency_order(), m.cycle()};
}

// Unique solution of the equations under `asg` replacing the intervened
// variables, starting from the context. The base model's dependency order
// remains valid for every submodel.
inline Atom solve_do(const CausalModel& m, const Context& ctx, const Assignment& asg) {
  const Signature& sig = m.signature();
  if (!m.recursive()) throw ModelError("model is not recursive");
  if (static_cast<int>(ctx.values.size()) != sig.exo_count())
    throw ModelError("context has wrong arity");
  Atom a;
  a.values.resize(sig.var_count());
  std::copy(ctx.values.begin(), ctx.values.end(), a.values.begin());
  for (VarId v : m.dependency_order()) {
    if (auto forced = asg.value_of(v))
      a.values[v] = *forced;
    else
      a.values[v] = m.eval_equation(v, a.values);
  }
  return a;
}

inline Atom solve(const CausalModel& m, const Context& ctx) {
  return solve_do(m, ctx, Assignment{});
}

// Submodel with the intervened variables' equations replaced by constants.
inline CausalModel intervene(const CausalModel& m, const Assignment& asg) {
  const Signature& sig = m.signature();
  std::vector<Equation> eqs = m.equations();
  for (const auto& [var, val] : asg.pairs()) {
    Equation& eq = eqs[var - sig.exo_count()];
    eq.parents.clear();
    eq.table = {val};
  }
  return CausalModel::make(sig, std::move(eqs));
}

// Parents declared but never consulted by the table (the --strict audit).
inline std::vector<std::pair<VarId, VarId>> audit_insensitive_parents(const CausalModel& m) {
  const Signature& sig = m.signature();
  std::vector<std::pair<VarId, VarId>> out;
  for (const Equation& eq : m.equations()) {
    for (std::size_t pi = 0; pi < eq.parents.size(); ++pi) {
      std::uint64_t rows = eq.table.size();
      std::uint64_t below = 1;  // product of radices after position pi
      for (std::size_t j = pi + 1; j < eq.parents.size(); ++j)
        below *= sig.range(eq.parents[j]).size();
      std::uint64_t radix = sig.range(eq.parents[pi]).size();
      bool sensitive = false;
      for (std::uint64_t r = 0; r < rows && !sensitive; ++r) {
        std::uint64_t digit = (r / below) % radix;
        if (digit + 1 < radix && eq.table[r] != eq.table[r + below]) sensitive = true;
      }
      if (!sensitive) out.emplace_back(eq.target, eq.parents[pi]);
    }
  }
  return out;
}

}  // namespace causalrep
