#include "microlocal/lp.hpp"

#include <doctest.h>

using namespace microlocal;
using lp::LinearConstraint;
using lp::Relation;

TEST_CASE("lp: bounded minimum on a triangle") {
  // x >= 0, y >= 0, x + y <= 2; minimize -x - 2y -> (0,2), value -4
  std::vector<LinearConstraint> cs{
      {{1, 0}, 0, Relation::Ge}, {{0, 1}, 0, Relation::Ge}, {{-1, -1}, -2, Relation::Ge}};
  auto s = lp::minimize({-1, -2}, 2, cs);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.value == -4);
  CHECK(s.x == Vec{0, 2});
}

TEST_CASE("lp: unbounded and infeasible") {
  std::vector<LinearConstraint> ray{{{1, 0}, 0, Relation::Ge}};
  CHECK(lp::minimize({-1, 0}, 2, ray).status == lp::Status::Unbounded);
  std::vector<LinearConstraint> bad{{{1}, 1, Relation::Ge}, {{-1}, 0, Relation::Ge}};
  CHECK(lp::minimize({1}, 1, bad).status == lp::Status::Infeasible);
  CHECK_FALSE(lp::feasible(1, bad));
}

TEST_CASE("lp: strict inequalities") {
  // x >= 0 and x > 0 and -x >= 0 is infeasible; dropping the last is feasible
  std::vector<LinearConstraint> cs{{{1}, 0, Relation::Ge}, {{1}, 0, Relation::Gt}};
  auto p = lp::find_point(1, cs);
  REQUIRE(p);
  CHECK((*p)[0] > 0);
  cs.push_back({{-1}, 0, Relation::Ge});
  CHECK_FALSE(lp::feasible(1, cs));
}

TEST_CASE("lp: equalities and negative variables") {
  std::vector<LinearConstraint> cs{{{1, 1}, -3, Relation::Eq}, {{1, -1}, 1, Relation::Eq}};
  auto p = lp::find_point(2, cs);
  REQUIRE(p);
  CHECK(*p == Vec{-1, -2});
}

TEST_CASE("lp: zero-dimensional problems") {
  CHECK(lp::feasible(0, std::vector<LinearConstraint>{}));
  std::vector<LinearConstraint> strict{{{}, 0, Relation::Gt}};
  CHECK_FALSE(lp::feasible(0, strict));
}
