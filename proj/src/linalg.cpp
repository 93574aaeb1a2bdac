#include "microlocal/linalg.hpp"

#include "microlocal/errors.hpp"

#include <utility>

namespace microlocal::linalg {

Echelon row_reduce(Matrix rows, std::size_t columns) {
  Echelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < rows.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < rows.size() && sgn(rows[pivot][c]) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    Rational inv = Rational(1) / rows[r][c];
    for (std::size_t k = c; k < columns; ++k) rows[r][k] *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t k = c; k < columns; ++k) {
        if (sgn(rows[r][k]) != 0) rows[i][k] -= f * rows[r][k];
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  out.reduced = std::move(rows);
  return out;
}

std::size_t rank(const Matrix& rows, std::size_t columns) {
  return row_reduce(rows, columns).pivots.size();
}

Matrix nullspace(const Matrix& rows, std::size_t columns) {
  Echelon e = row_reduce(rows, columns);
  std::vector<bool> is_pivot(columns, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  Matrix basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    Vec v = zeros(columns);
    v[free] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.reduced[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<Vec> solve(const Matrix& rows, const Vec& rhs, std::size_t columns) {
  if (rows.size() != rhs.size()) throw Error(ErrorCode::DimensionMismatch, "solve: row/rhs count mismatch");
  Matrix augmented;
  augmented.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vec row = rows[i];
    row.push_back(rhs[i]);
    augmented.push_back(std::move(row));
  }
  Echelon e = row_reduce(std::move(augmented), columns + 1);
  Vec x = zeros(columns);
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == columns) return std::nullopt;
    x[e.pivots[i]] = e.reduced[i][columns];
  }
  return x;
}

Vec project_onto_affine(const Matrix& rows, const Vec& rhs, const Vec& x) {
  if (rows.empty()) return x;
  const std::size_t k = rows.size();
  // y = x - A^T (A A^T)^{-1} (A x - b)
  Matrix gram(k, zeros(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      gram[i][j] = dot(rows[i], rows[j]);
      gram[j][i] = gram[i][j];
    }
  }
  Vec residual(k);
  for (std::size_t i = 0; i < k; ++i) residual[i] = dot(rows[i], x) - rhs[i];
  auto lambda = solve(gram, residual, k);
  if (!lambda) throw Error(ErrorCode::InvalidArgument, "projection onto dependent constraint rows");
  Vec y = x;
  for (std::size_t i = 0; i < k; ++i) {
    if (sgn((*lambda)[i]) == 0) continue;
    for (std::size_t c = 0; c < y.size(); ++c) y[c] -= (*lambda)[i] * rows[i][c];
  }
  return y;
}

Matrix transpose(const Matrix& m, std::size_t columns) {
  Matrix t(columns, zeros(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < columns; ++j) t[j][i] = m[i][j];
  }
  return t;
}

Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && sgn(m[pivot][c]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace microlocal::linalg
