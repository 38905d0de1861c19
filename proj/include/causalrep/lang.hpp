#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"

namespace causalrep {

// Boolean formulas over variable-value tests. Immutable; cheap to copy.
class Formula {
 public:
  enum class Kind { Eq, Not, And, Or };

  static Formula eq(VarId var, Value val) {
    return Formula(std::make_shared<Node>(Node{Kind::Eq, var, val, nullptr, nullptr}));
  }
  static Formula negate(Formula f) {
    return Formula(std::make_shared<Node>(Node{Kind::Not, -1, 0, f.node_, nullptr}));
  }
  static Formula conj(Formula a, Formula b) {
    return Formula(std::make_shared<Node>(Node{Kind::And, -1, 0, a.node_, b.node_}));
  }
  static Formula disj(Formula a, Formula b) {
    return Formula(std::make_shared<Node>(Node{Kind::Or, -1, 0, a.node_, b.node_}));
  }

  Kind kind() const { return node_->kind; }
  VarId var() const { return node_->var; }
  Value value() const { return node_->val; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }

 private:
  struct Node {
    Kind kind;
    VarId var;
    Value val;
    std::shared_ptr<const Node> lhs, rhs;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Actions: primitive interventions closed under if-then-else.
class Action {
 public:
  static Action primitive(Assignment asg) {
    return Action(std::make_shared<Node>(Node{std::move(asg), std::nullopt, nullptr, nullptr}));
  }
  static Action conditional(Formula test, Action then_branch, Action else_branch) {
    return Action(std::make_shared<Node>(
        Node{Assignment{}, std::move(test),
             std::make_shared<Action>(std::move(then_branch)),
             std::make_shared<Action>(std::move(else_branch))}));
  }
  static Action nothing() { return primitive(Assignment{}); }

  bool is_primitive() const { return !node_->test.has_value(); }
  const Assignment& assignment() const { return node_->asg; }
  const Formula& test() const { return *node_->test; }
  const Action& then_branch() const { return *node_->then_b; }
  const Action& else_branch() const { return *node_->else_b; }

 private:
  struct Node {
    Assignment asg;
    std::optional<Formula> test;
    std::shared_ptr<Action> then_b, else_b;
  };
  explicit Action(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// A formula with at most one intervention prefix: [Y1:=y1,...] body.
struct ExtFormula {
  Assignment intervention;  // empty = plain formula
  Formula body;
};

// ---------------------------------------------------------------------------
// Surface syntax.
//
//   formula  := term { "|" term }
//   term     := factor { "&" factor }
//   factor   := "!" factor | "(" formula ")" | IDENT "=" INT
//   action   := "do" "[" [ IDENT ":=" INT { "," IDENT ":=" INT } ] "]"
//             | "if" formula "then" action [ "else" action ]
//   extform  := [ "[" [ IDENT ":=" INT { "," ... } ] "]" ] formula
//
// Whitespace-insensitive. ":=" assigns inside do[...], "=" tests equality.

namespace detail {

class Cursor {
 public:
  Cursor(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool try_consume(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    // keywords must not run into identifier characters
    if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
      std::size_t after = pos_ + tok.size();
      if (after < text_.size() && is_ident_char(text_[after])) return false;
    }
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!try_consume(tok))
      throw ParseError("expected '" + std::string(tok) + "'", pos_);
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() ||
        !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      throw ParseError("expected identifier", pos_);
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Value integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("expected integer", start);
    return static_cast<Value>(std::stol(std::string(text_.substr(start, pos_ - start))));
  }

  VarId variable() {
    skip_ws();
    std::size_t at = pos_;
    std::string name = ident();
    auto v = sig_.find(name);
    if (!v) throw ParseError("unknown variable '" + name + "'", at);
    return *v;
  }

  // IDENT "=" INT with range validation
  Formula atomic() {
    skip_ws();
    std::size_t at = pos_;
    VarId v = variable();
    expect("=");
    Value val = integer();
    if (sig_.range_index(v, val) < 0)
      throw ParseError("value " + std::to_string(val) + " not in range of " + sig_.name(v), at);
    return Formula::eq(v, val);
  }

  Formula formula() {
    Formula f = term();
    while (try_consume("|")) f = Formula::disj(f, term());
    return f;
  }
  Formula term() {
    Formula f = factor();
    while (try_consume("&")) f = Formula::conj(f, factor());
    return f;
  }
  Formula factor() {
    if (try_consume("!")) return Formula::negate(factor());
    if (try_consume("(")) {
      Formula f = formula();
      expect(")");
      return f;
    }
    return atomic();
  }

  Assignment do_body() {
    expect("[");
    std::vector<std::pair<VarId, Value>> pairs;
    if (!try_consume("]")) {
      do {
        skip_ws();
        std::size_t at = pos_;
        VarId v = variable();
        expect(":=");
        Value val = integer();
        if (sig_.is_exogenous(v))
          throw ParseError("cannot intervene on exogenous variable '" + sig_.name(v) + "'", at);
        if (sig_.range_index(v, val) < 0)
          throw ParseError("value " + std::to_string(val) + " not in range of " + sig_.name(v), at);
        pairs.emplace_back(v, val);
        for (std::size_t i = 0; i + 1 < pairs.size(); ++i)
          if (pairs[i].first == v)
            throw ParseError("duplicate variable '" + sig_.name(v) + "' in do[...]", at);
      } while (try_consume(","));
      expect("]");
    }
    return Assignment::make(sig_, std::move(pairs));
  }

  Action action() {
    if (try_consume("do")) return Action::primitive(do_body());
    if (try_consume("if")) {
      Formula test = formula();
      expect("then");
      Action then_b = action();
      Action else_b = try_consume("else") ? action() : Action::nothing();
      return Action::conditional(std::move(test), std::move(then_b), std::move(else_b));
    }
    if (try_consume("(")) {  // grouping, beyond the minimal grammar
      Action a = action();
      expect(")");
      return a;
    }
    throw ParseError("expected 'do' or 'if'", pos_);
  }

  ExtFormula ext_formula() {
    skip_ws();
    if (peek() == '[') {
      expect("[");
      std::vector<std::pair<VarId, Value>> pairs;
      if (!try_consume("]")) {
        do {
          skip_ws();
          std::size_t at = pos_;
          VarId v = variable();
          expect(":=");
          Value val = integer();
          if (sig_.is_exogenous(v))
            throw ParseError("cannot intervene on exogenous variable '" + sig_.name(v) + "'", at);
          if (sig_.range_index(v, val) < 0)
            throw ParseError("value " + std::to_string(val) + " not in range of " + sig_.name(v), at);
          for (const auto& [pv, pval] : pairs)
            if (pv == v)
              throw ParseError("duplicate variable '" + sig_.name(v) + "' in [...]", at);
          pairs.emplace_back(v, val);
        } while (try_consume(","));
        expect("]");
      }
      return ExtFormula{Assignment::make(sig_, std::move(pairs)), formula()};
    }
    return ExtFormula{Assignment{}, formula()};
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text, const Signature& sig) {
  detail::Cursor c(text, sig);
  Formula f = c.formula();
  if (!c.at_end()) throw ParseError("trailing input", c.pos());
  return f;
}

inline Action parse_action(std::string_view text, const Signature& sig) {
  detail::Cursor c(text, sig);
  Action a = c.action();
  if (!c.at_end()) throw ParseError("trailing input", c.pos());
  return a;
}

inline ExtFormula parse_ext_formula(std::string_view text, const Signature& sig) {
  detail::Cursor c(text, sig);
  ExtFormula f = c.ext_formula();
  if (!c.at_end()) throw ParseError("trailing input", c.pos());
  return f;
}

// ---------------------------------------------------------------------------
// Printers. parse(print(x)) == x up to node identity.

inline std::string to_string(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case Formula::Kind::Eq:
      return sig.name(f.var()) + "=" + std::to_string(f.value());
    case Formula::Kind::Not: {
      Formula inner = f.lhs();
      if (inner.kind() == Formula::Kind::Eq) return "!" + to_string(inner, sig);
      return "!(" + to_string(inner, sig) + ")";
    }
    case Formula::Kind::And: {
      auto part = [&](const Formula& g) {
        std::string s = to_string(g, sig);
        return g.kind() == Formula::Kind::Or ? "(" + s + ")" : s;
      };
      return part(f.lhs()) + " & " + part(f.rhs());
    }
    case Formula::Kind::Or:
      return to_string(f.lhs(), sig) + " | " + to_string(f.rhs(), sig);
  }
  throw Error("unreachable");
}

inline std::string to_string(const Assignment& asg, const Signature& sig) {
  std::string out = "do[";
  bool first = true;
  for (const auto& [var, val] : asg.pairs()) {
    if (!first) out += ", ";
    first = false;
    out += sig.name(var) + ":=" + std::to_string(val);
  }
  return out + "]";
}

inline std::string to_string(const Action& a, const Signature& sig) {
  if (a.is_primitive()) return to_string(a.assignment(), sig);
  std::string out = "if " + to_string(a.test(), sig) + " then ";
  const Action& t = a.then_branch();
  out += t.is_primitive() ? to_string(t, sig) : "(" + to_string(t, sig) + ")";
  const Action& e = a.else_branch();
  out += " else ";
  out += e.is_primitive() ? to_string(e, sig) : "(" + to_string(e, sig) + ")";
  return out;
}

inline std::string to_string(const ExtFormula& f, const Signature& sig) {
  if (f.intervention.empty()) return to_string(f.body, sig);
  std::string out = "[";
  bool first = true;
  for (const auto& [var, val] : f.intervention.pairs()) {
    if (!first) out += ", ";
    first = false;
    out += sig.name(var) + ":=" + std::to_string(val);
  }
  return out + "](" + to_string(f.body, sig) + ")";
}

// ---------------------------------------------------------------------------
// Semantics.

namespace detail {
inline bool eval_formula(const Atom& a, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Eq:
      return a.values[f.var()] == f.value();
    case Formula::Kind::Not:
      return !eval_formula(a, f.lhs());
    case Formula::Kind::And:
      return eval_formula(a, f.lhs()) && eval_formula(a, f.rhs());
    case Formula::Kind::Or:
      return eval_formula(a, f.lhs()) || eval_formula(a, f.rhs());
  }
  throw Error("unreachable");
}
}  // namespace detail

inline bool atom_implies(const Signature&, const Atom& a, const Formula& f) {
  return detail::eval_formula(a, f);
}

// The conjunction characterizing an atom, one conjunct per variable.
inline Formula atom_formula(const Signature& sig, const Atom& a) {
  Formula f = Formula::eq(0, a.values[0]);
  for (int v = 1; v < sig.var_count(); ++v)
    f = Formula::conj(f, Formula::eq(v, a.values[v]));
  return f;
}

// Truth of an extended formula in a situation.
inline bool satisfies(const CausalModel& m, const Context& ctx, const ExtFormula& f) {
  Atom a = solve_do(m, ctx, f.intervention);
  return atom_implies(m.signature(), a, f.body);
}

// The primitive intervention an action prescribes at a given atom: unfold
// conditionals, dispatching each test on that single atom.
inline const Assignment& h_at(const Action& a, const Signature& sig, const Atom& atom) {
  const Action* cur = &a;
  while (!cur->is_primitive())
    cur = atom_implies(sig, atom, cur->test()) ? &cur->then_branch() : &cur->else_branch();
  return cur->assignment();
}

// Materialized h table over the whole atom space, with a canonical key used
// for extensional identity.
class ExtensionalAction {
 public:
  ExtensionalAction(const Action& a, const Signature& sig, std::uint64_t cap = kDefaultEnumCap) {
    std::uint64_t n = sig.atom_count();
    if (n > cap) throw SizeError("atom space too large to materialize h table");
    table_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Atom atom = atom_at(sig, i);
      table_.push_back(h_at(a, sig, atom));
    }
    key_.reserve(n * 4);
    for (const Assignment& asg : table_) {
      for (const auto& [var, val] : asg.pairs())
        key_ += std::to_string(var) + "=" + std::to_string(val) + ",";
      key_ += ";";
    }
  }

  const Assignment& at(std::uint64_t atom_idx) const { return table_[atom_idx]; }
  const std::vector<Assignment>& table() const { return table_; }
  const std::string& key() const { return key_; }

 private:
  std::vector<Assignment> table_;
  std::string key_;
};

inline ExtensionalAction compile_h(const Action& a, const Signature& sig) {
  return ExtensionalAction(a, sig);
}

// Outcome of performing an action in a context: tests are evaluated at the
// pre-intervention solution, then the selected primitive is applied.
inline Atom beta(const CausalModel& m, const Action& a, const Context& ctx) {
  Atom factual = solve(m, ctx);
  return solve_do(m, ctx, h_at(a, m.signature(), factual));
}

}  // namespace causalrep
