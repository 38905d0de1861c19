#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "causalrep/errors.hpp"
#include "causalrep/rational.hpp"

namespace causalrep::lp {

enum class Rel { Le, Ge, Eq };

struct Constraint {
  std::vector<std::pair<int, Rat>> coeffs;  // sparse (var, coefficient)
  Rel rel = Rel::Le;
  Rat rhs = 0;
};

struct Problem {
  int num_vars = 0;
  std::vector<Rat> objective;       // maximize; size num_vars
  std::vector<bool> nonnegative;    // size num_vars; false = free variable
  std::vector<Constraint> constraints;
};

enum class Status { Optimal, Unbounded, Infeasible };

struct Solution {
  Status status = Status::Infeasible;
  Rat objective = 0;
  std::vector<Rat> primal;  // per original variable
  std::vector<Rat> dual;    // per original constraint (>=0 for Le, <=0 for Ge, free for Eq)
};

// Dense two-phase primal simplex over exact rationals.
//
// Free variables share a single negative-shift column (x_v = x'_v - s), so
// the tableau stays near the original width. Every row gets a slack (Le: +1,
// Ge: -1, Eq: none) and an artificial; phase one drives the artificials to
// zero. Pivoting uses Dantzig's rule, switching to Bland's rule after a run
// of degenerate steps so termination is guaranteed.
class Simplex {
 public:
  explicit Simplex(const Problem& p) : prob_(p) { build(); }

  Solution solve() {
    Solution sol;
    if (needs_phase1_) {
      set_phase1_objective();
      run();
      if (sgn(obj_value_) != 0) {
        sol.status = Status::Infeasible;
        return sol;
      }
      pivot_out_artificials();
    }
    set_phase2_objective();
    artificials_eligible_ = false;
    if (!run()) {
      sol.status = Status::Unbounded;
      return sol;
    }
    sol.status = Status::Optimal;
    sol.objective = obj_value_;
    sol.primal.assign(prob_.num_vars, Rat(0));
    Rat shift(0);
    for (int r = 0; r < m_; ++r) {
      int col = basis_[r];
      if (col < var_cols_)
        sol.primal[col] = rhs_[r];
      else if (col == shift_col_)
        shift = rhs_[r];
    }
    if (shift_col_ >= 0 && sgn(shift) != 0)
      for (int v = 0; v < prob_.num_vars; ++v)
        if (is_free(v)) sol.primal[v] -= shift;
    sol.dual.assign(prob_.constraints.size(), Rat(0));
    for (int r = 0; r < m_; ++r) {
      Rat y = -obj_row_[art_col_ + r];  // reduced cost of row r's artificial
      sol.dual[r] = y * row_sign_[r];
    }
    return sol;
  }

 private:
  bool is_free(int v) const { return !prob_.nonnegative.empty() && !prob_.nonnegative[v]; }

  void build() {
    m_ = static_cast<int>(prob_.constraints.size());
    var_cols_ = prob_.num_vars;
    bool any_free = false;
    for (int v = 0; v < var_cols_; ++v) any_free |= is_free(v);
    shift_col_ = any_free ? var_cols_ : -1;
    slack_col_ = var_cols_ + (any_free ? 1 : 0);
    art_col_ = slack_col_ + m_;
    n_cols_ = art_col_ + m_;

    rows_.assign(m_, std::vector<Rat>(n_cols_, Rat(0)));
    rhs_.assign(m_, Rat(0));
    row_sign_.assign(m_, Rat(1));
    basis_.assign(m_, -1);

    for (int r = 0; r < m_; ++r) {
      const Constraint& c = prob_.constraints[r];
      Rat flip = sgn(c.rhs) < 0 ? Rat(-1) : Rat(1);  // keep rhs nonnegative
      row_sign_[r] = flip;
      Rat free_sum(0);
      for (const auto& [var, coef] : c.coeffs) {
        if (var < 0 || var >= var_cols_) throw Error("lp: coefficient on unknown variable");
        Rat t = coef * flip;
        rows_[r][var] += t;
        if (is_free(var)) free_sum += t;
      }
      if (shift_col_ >= 0) rows_[r][shift_col_] = -free_sum;
      rhs_[r] = c.rhs * flip;
      if (c.rel == Rel::Le)
        rows_[r][slack_col_ + r] = flip;
      else if (c.rel == Rel::Ge)
        rows_[r][slack_col_ + r] = -flip;
      rows_[r][art_col_ + r] = 1;
      basis_[r] = art_col_ + r;
    }
    needs_phase1_ = false;
    for (int r = 0; r < m_; ++r)
      if (sgn(rhs_[r]) != 0) needs_phase1_ = true;
    obj_row_.assign(n_cols_, Rat(0));
  }

  void set_phase1_objective() {
    costs_.assign(n_cols_, Rat(0));
    for (int r = 0; r < m_; ++r) costs_[art_col_ + r] = -1;
    artificials_eligible_ = true;
    recompute_obj_row();
  }

  void set_phase2_objective() {
    costs_.assign(n_cols_, Rat(0));
    Rat free_obj(0);
    for (int v = 0; v < var_cols_; ++v) {
      Rat c = prob_.objective.empty() ? Rat(0) : prob_.objective[v];
      costs_[v] = c;
      if (is_free(v)) free_obj += c;
    }
    if (shift_col_ >= 0) costs_[shift_col_] = -free_obj;
    recompute_obj_row();
  }

  // obj_row_[j] = c_j - c_B . T_j (reduced costs), obj_value_ = c_B . x_B
  void recompute_obj_row() {
    obj_row_ = costs_;
    obj_value_ = 0;
    for (int r = 0; r < m_; ++r) {
      const Rat& cb = costs_[basis_[r]];
      if (sgn(cb) == 0) continue;
      for (int j = 0; j < n_cols_; ++j) {
        if (sgn(rows_[r][j]) != 0) {
          Rat t = cb * rows_[r][j];
          obj_row_[j] -= t;
        }
      }
      Rat t = cb * rhs_[r];
      obj_value_ += t;
    }
  }

  // Returns false iff unbounded.
  bool run() {
    int degenerate_streak = 0;
    bool bland = false;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > 200000) throw Error("simplex iteration cap exceeded");
      int enter = -1;
      if (bland) {
        for (int j = 0; j < n_cols_; ++j)
          if (eligible(j) && sgn(obj_row_[j]) > 0) {
            enter = j;
            break;
          }
      } else {
        for (int j = 0; j < n_cols_; ++j)
          if (eligible(j) && sgn(obj_row_[j]) > 0 &&
              (enter < 0 || obj_row_[j] > obj_row_[enter]))
            enter = j;
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      Rat best_ratio(0);
      for (int r = 0; r < m_; ++r) {
        if (sgn(rows_[r][enter]) > 0) {
          Rat ratio = rhs_[r] / rows_[r][enter];
          if (leave < 0 || ratio < best_ratio ||
              (ratio == best_ratio && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      if (sgn(best_ratio) == 0) {
        if (++degenerate_streak > 2 * (m_ + n_cols_)) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
  }

  bool eligible(int j) const { return artificials_eligible_ || j < art_col_; }

  void pivot(int r, int enter) {
    Rat piv = rows_[r][enter];
    for (int j = 0; j < n_cols_; ++j)
      if (sgn(rows_[r][j]) != 0) rows_[r][j] /= piv;
    rhs_[r] /= piv;
    rows_[r][enter] = 1;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      Rat f = rows_[i][enter];
      if (sgn(f) == 0) continue;
      for (int j = 0; j < n_cols_; ++j) {
        if (sgn(rows_[r][j]) != 0) {
          Rat t = f * rows_[r][j];
          rows_[i][j] -= t;
        }
      }
      Rat t = f * rhs_[r];
      rhs_[i] -= t;
      rows_[i][enter] = 0;
    }
    Rat f = obj_row_[enter];
    if (sgn(f) != 0) {
      for (int j = 0; j < n_cols_; ++j) {
        if (sgn(rows_[r][j]) != 0) {
          Rat t = f * rows_[r][j];
          obj_row_[j] -= t;
        }
      }
      Rat t = f * rhs_[r];
      obj_value_ += t;
      obj_row_[enter] = 0;
    }
    basis_[r] = enter;
  }

  // Swap any artificial still in the basis for a structural or slack column
  // when the row allows it; all-zero rows are redundant and stay put.
  void pivot_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < art_col_) continue;
      for (int j = 0; j < art_col_; ++j) {
        if (sgn(rows_[r][j]) != 0) {
          pivot(r, j);
          break;
        }
      }
    }
  }

  const Problem& prob_;
  int m_ = 0;
  int var_cols_ = 0, shift_col_ = -1, slack_col_ = 0, art_col_ = 0, n_cols_ = 0;
  std::vector<std::vector<Rat>> rows_;
  std::vector<Rat> rhs_;
  std::vector<Rat> row_sign_;
  std::vector<int> basis_;
  std::vector<Rat> costs_;
  std::vector<Rat> obj_row_;
  Rat obj_value_ = 0;
  bool needs_phase1_ = false;
  bool artificials_eligible_ = true;
};

inline Solution solve(const Problem& p) { return Simplex(p).solve(); }

}  // namespace causalrep::lp
