#include "microlocal/lp.hpp"

#include "microlocal/errors.hpp"

#include <limits>

namespace microlocal::lp {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class Tableau {
 public:
  Tableau(std::vector<Vec> rows, Vec rhs, std::size_t columns)
      : rows_(std::move(rows)), rhs_(std::move(rhs)), cols_(columns), banned_(columns, false) {}

  std::size_t add_column(const Vec& column) {
    for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i].push_back(column[i]);
    banned_.push_back(false);
    return cols_++;
  }

  std::size_t columns() const { return cols_; }
  std::size_t row_count() const { return rows_.size(); }
  std::vector<std::size_t>& basis() { return basis_; }

  void ban(std::size_t c) { banned_[c] = true; }

  // Returns Optimal or Unbounded. The objective is minimized.
  Status optimize(const Vec& cost) {
    Vec reduced(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
      Rational r = j < cost.size() ? cost[j] : Rational(0);
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const std::size_t b = basis_[i];
        if (b < cost.size() && sgn(cost[b]) != 0 && sgn(rows_[i][j]) != 0) r -= cost[b] * rows_[i][j];
      }
      reduced[j] = r;
    }
    for (;;) {
      std::size_t entering = kNone;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!banned_[j] && sgn(reduced[j]) < 0) {
          entering = j;
          break;
        }
      }
      if (entering == kNone) return Status::Optimal;
      std::size_t leaving = kNone;
      Rational best;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][entering]) <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][entering];
        if (leaving == kNone || ratio < best || (ratio == best && basis_[i] < basis_[leaving])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving == kNone) return Status::Unbounded;
      pivot(leaving, entering, reduced);
    }
  }

  void pivot(std::size_t r, std::size_t c, Vec& reduced) {
    Rational inv = Rational(1) / rows_[r][c];
    for (auto& v : rows_[r]) {
      if (sgn(v) != 0) v *= inv;
    }
    rhs_[r] *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || sgn(rows_[i][c]) == 0) continue;
      Rational f = rows_[i][c];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (sgn(rows_[r][j]) != 0) rows_[i][j] -= f * rows_[r][j];
      }
      rhs_[i] -= f * rhs_[r];
    }
    if (sgn(reduced[c]) != 0) {
      Rational f = reduced[c];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (sgn(rows_[r][j]) != 0) reduced[j] -= f * rows_[r][j];
      }
    }
    basis_[r] = c;
  }

  void pivot_plain(std::size_t r, std::size_t c) {
    Vec dummy(cols_);
    pivot(r, c, dummy);
  }

  void drop_row(std::size_t r) {
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
    rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  const Vec& row(std::size_t r) const { return rows_[r]; }

  Vec values() const {
    Vec x = zeros(cols_);
    for (std::size_t i = 0; i < rows_.size(); ++i) x[basis_[i]] = rhs_[i];
    return x;
  }

 private:
  std::vector<Vec> rows_;
  Vec rhs_;
  std::size_t cols_;
  std::vector<bool> banned_;
  std::vector<std::size_t> basis_;
};

struct StandardForm {
  Tableau tableau;
  std::size_t dim = 0;
  std::size_t sigma = kNone;  // column of the strictness margin, if any
};

// Builds a feasible basis (phase I). Returns nullopt if infeasible.
std::optional<StandardForm> phase_one(std::size_t dim, std::span<const LinearConstraint> constraints,
                                      bool allow_strict) {
  bool any_strict = false;
  for (const auto& c : constraints) {
    if (c.a.size() != dim) throw Error(ErrorCode::DimensionMismatch, "LP constraint has wrong dimension");
    if (c.rel == Relation::Gt) any_strict = true;
  }
  if (any_strict && !allow_strict) {
    throw Error(ErrorCode::InvalidArgument, "strict constraint passed to an optimization LP");
  }

  // Columns: x+ (dim), x- (dim), then slacks, then sigma and its cap slack.
  std::vector<Vec> rows;
  Vec rhs;
  std::vector<std::size_t> slack_of_row;
  std::size_t cols = 2 * dim;
  std::size_t slack_count = 0;
  for (const auto& c : constraints) {
    if (c.rel != Relation::Eq) ++slack_count;
  }
  const std::size_t first_slack = cols;
  cols += slack_count;
  std::size_t sigma = kNone, cap = kNone;
  if (any_strict) {
    sigma = cols++;
    cap = cols++;
  }

  std::size_t next_slack = first_slack;
  for (const auto& c : constraints) {
    Vec row = zeros(cols);
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = c.a[j];
      row[dim + j] = -c.a[j];
    }
    std::size_t slack = kNone;
    if (c.rel != Relation::Eq) {
      slack = next_slack++;
      row[slack] = -1;
    }
    if (c.rel == Relation::Gt) row[sigma] = -1;
    Rational b = c.b;
    if (sgn(b) < 0) {
      for (auto& v : row) v = -v;
      b = -b;
    }
    rows.push_back(std::move(row));
    rhs.push_back(b);
    slack_of_row.push_back(slack);
  }
  if (any_strict) {
    Vec row = zeros(cols);
    row[sigma] = 1;
    row[cap] = 1;
    rows.push_back(std::move(row));
    rhs.push_back(1);
    slack_of_row.push_back(cap);
  }

  const std::size_t m = rows.size();
  Tableau t(std::move(rows), std::move(rhs), cols);
  t.basis().assign(m, kNone);
  std::vector<std::size_t> artificials;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t s = slack_of_row[i];
    if (s != kNone && t.row(i)[s] == 1) {
      t.basis()[i] = s;
      continue;
    }
    Vec column = zeros(m);
    column[i] = 1;
    std::size_t a = t.add_column(column);
    artificials.push_back(a);
    t.basis()[i] = a;
  }

  if (!artificials.empty()) {
    Vec cost = zeros(t.columns());
    for (auto a : artificials) cost[a] = 1;
    t.optimize(cost);
    Vec vals = t.values();
    for (auto a : artificials) {
      if (sgn(vals[a]) != 0) return std::nullopt;
    }
    std::vector<bool> is_art(t.columns(), false);
    for (auto a : artificials) is_art[a] = true;
    for (std::size_t i = 0; i < t.row_count();) {
      if (!is_art[t.basis()[i]]) {
        ++i;
        continue;
      }
      std::size_t col = kNone;
      for (std::size_t j = 0; j < t.columns(); ++j) {
        if (!is_art[j] && sgn(t.row(i)[j]) != 0) {
          col = j;
          break;
        }
      }
      if (col == kNone) {
        t.drop_row(i);
      } else {
        t.pivot_plain(i, col);
        ++i;
      }
    }
    for (auto a : artificials) t.ban(a);
  }
  return StandardForm{std::move(t), dim, sigma};
}

Vec extract(const Vec& values, std::size_t dim) {
  Vec x(dim);
  for (std::size_t j = 0; j < dim; ++j) x[j] = values[j] - values[dim + j];
  return x;
}

}  // namespace

std::optional<Vec> find_point(std::size_t dim, std::span<const LinearConstraint> constraints) {
  auto form = phase_one(dim, constraints, true);
  if (!form) return std::nullopt;
  if (form->sigma != kNone) {
    Vec cost = zeros(form->tableau.columns());
    cost[form->sigma] = -1;
    form->tableau.optimize(cost);
    Vec vals = form->tableau.values();
    if (sgn(vals[form->sigma]) <= 0) return std::nullopt;
    return extract(vals, dim);
  }
  return extract(form->tableau.values(), dim);
}

bool feasible(std::size_t dim, std::span<const LinearConstraint> constraints) {
  return find_point(dim, constraints).has_value();
}

Solution minimize(const Vec& c, std::size_t dim, std::span<const LinearConstraint> constraints) {
  if (c.size() != dim) throw Error(ErrorCode::DimensionMismatch, "LP objective has wrong dimension");
  auto form = phase_one(dim, constraints, false);
  Solution out;
  if (!form) {
    out.status = Status::Infeasible;
    return out;
  }
  Vec cost = zeros(form->tableau.columns());
  for (std::size_t j = 0; j < dim; ++j) {
    cost[j] = c[j];
    cost[dim + j] = -c[j];
  }
  if (form->tableau.optimize(cost) == Status::Unbounded) {
    out.status = Status::Unbounded;
    return out;
  }
  out.status = Status::Optimal;
  out.x = extract(form->tableau.values(), dim);
  out.value = dot(c, out.x);
  return out;
}

Solution maximize(const Vec& c, std::size_t dim, std::span<const LinearConstraint> constraints) {
  Solution s = minimize(negate(c), dim, constraints);
  if (s.status == Status::Optimal) s.value = -s.value;
  return s;
}

}  // namespace microlocal::lp
