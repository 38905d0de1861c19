#include <catch2/catch_amalgamated.hpp>

#include "causalrep/lp.hpp"

using namespace causalrep;
using lp::Constraint;
using lp::Problem;
using lp::Rel;
using lp::Solution;
using lp::Status;

TEST_CASE("textbook maximum") {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x,y >= 0  -> 12 at (4, 0)
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(3), Rat(2)};
  p.nonnegative = {true, true};
  p.constraints.push_back({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Le, Rat(4)});
  p.constraints.push_back({{{0, Rat(1)}, {1, Rat(3)}}, Rel::Le, Rat(6)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == 12);
  CHECK(s.primal[0] == 4);
  CHECK(s.primal[1] == 0);
  // dual of the binding first row is 3, of the slack second row 0
  CHECK(s.dual[0] == 3);
  CHECK(s.dual[1] == 0);
}

TEST_CASE("unbounded") {
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.nonnegative = {true};
  Solution s = lp::solve(p);
  CHECK(s.status == Status::Unbounded);
}

TEST_CASE("infeasible") {
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(0)};
  p.nonnegative = {true};
  p.constraints.push_back({{{0, Rat(1)}}, Rel::Le, Rat(1)});
  p.constraints.push_back({{{0, Rat(1)}}, Rel::Ge, Rat(2)});
  Solution s = lp::solve(p);
  CHECK(s.status == Status::Infeasible);
}

TEST_CASE("free variables and equalities") {
  // max x s.t. x + y = 3, y >= 1, x free, y >= 0  -> x = 2
  Problem p;
  p.num_vars = 2;
  p.objective = {Rat(1), Rat(0)};
  p.nonnegative = {false, true};
  p.constraints.push_back({{{0, Rat(1)}, {1, Rat(1)}}, Rel::Eq, Rat(3)});
  p.constraints.push_back({{{1, Rat(1)}}, Rel::Ge, Rat(1)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == 2);
  CHECK(s.primal[0] == 2);
  CHECK(s.primal[1] == 1);
}

TEST_CASE("negative optimum through free variables") {
  // max x s.t. x <= -5, x free
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.nonnegative = {false};
  p.constraints.push_back({{{0, Rat(1)}}, Rel::Le, Rat(-5)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == -5);
  CHECK(s.primal[0] == -5);
}

TEST_CASE("margin program, representable order") {
  // max eps s.t. w1 - w2 >= eps, w2 - w3 >= eps, eps <= 1, w free
  Problem p;
  p.num_vars = 4;  // w1 w2 w3 eps
  p.objective = {Rat(0), Rat(0), Rat(0), Rat(1)};
  p.nonnegative = {false, false, false, true};
  p.constraints.push_back({{{0, Rat(1)}, {1, Rat(-1)}, {3, Rat(-1)}}, Rel::Ge, Rat(0)});
  p.constraints.push_back({{{1, Rat(1)}, {2, Rat(-1)}, {3, Rat(-1)}}, Rel::Ge, Rat(0)});
  p.constraints.push_back({{{3, Rat(1)}}, Rel::Le, Rat(1)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == 1);
  CHECK(s.primal[0] - s.primal[1] >= 1);
}

TEST_CASE("margin program, cyclic order has zero margin") {
  // the three-way cycle a>b, b>c, c>a admits no positive margin
  Problem p;
  p.num_vars = 4;  // a b c eps
  p.objective = {Rat(0), Rat(0), Rat(0), Rat(1)};
  p.nonnegative = {false, false, false, true};
  p.constraints.push_back({{{0, Rat(1)}, {1, Rat(-1)}, {3, Rat(-1)}}, Rel::Ge, Rat(0)});
  p.constraints.push_back({{{1, Rat(1)}, {2, Rat(-1)}, {3, Rat(-1)}}, Rel::Ge, Rat(0)});
  p.constraints.push_back({{{2, Rat(1)}, {0, Rat(-1)}, {3, Rat(-1)}}, Rel::Ge, Rat(0)});
  p.constraints.push_back({{{3, Rat(1)}}, Rel::Le, Rat(1)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == 0);
  // the dual combination certifies it: gap rows carry nonzero multipliers
  Rat dual_mass(0);
  for (int r = 0; r < 3; ++r) {
    Rat d = s.dual[r];
    dual_mass += d < 0 ? Rat(-d) : d;
  }
  CHECK(sgn(dual_mass) > 0);
}

TEST_CASE("exact rationals, no drift") {
  // max x s.t. 3x <= 1 -> 1/3 exactly
  Problem p;
  p.num_vars = 1;
  p.objective = {Rat(1)};
  p.nonnegative = {true};
  p.constraints.push_back({{{0, Rat(3)}}, Rel::Le, Rat(1)});
  Solution s = lp::solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == Rat(1, 3));
}
