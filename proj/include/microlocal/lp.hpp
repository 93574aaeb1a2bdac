#pragma once

// Exact linear programming over the rationals (two-phase primal simplex with
// Bland's rule). Supports strict inequalities for feasibility questions.

#include "microlocal/rational.hpp"

#include <optional>
#include <span>
#include <vector>

namespace microlocal::lp {

enum class Relation { Ge, Gt, Eq };

/// a . x  (>= | > | =)  b
struct LinearConstraint {
  Vec a;
  Rational b;
  Relation rel = Relation::Ge;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  Rational value;
  Vec x;
};

/// A point satisfying every constraint (strict ones strictly), or nullopt.
std::optional<Vec> find_point(std::size_t dim, std::span<const LinearConstraint> constraints);

bool feasible(std::size_t dim, std::span<const LinearConstraint> constraints);

/// Minimizes c . x. Strict constraints are rejected; use find_point for those.
Solution minimize(const Vec& c, std::size_t dim, std::span<const LinearConstraint> constraints);
Solution maximize(const Vec& c, std::size_t dim, std::span<const LinearConstraint> constraints);

}  // namespace microlocal::lp
