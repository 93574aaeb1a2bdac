#pragma once

// Small dense exact linear algebra over the rationals.

#include "microlocal/rational.hpp"

#include <optional>
#include <vector>

namespace microlocal::linalg {

/// Row-major matrix; every row has the same length.
using Matrix = std::vector<Vec>;

struct Echelon {
  Matrix reduced;                    // reduced row echelon form, zero rows dropped
  std::vector<std::size_t> pivots;   // pivot column of each reduced row
};

Echelon row_reduce(Matrix rows, std::size_t columns);

std::size_t rank(const Matrix& rows, std::size_t columns);

/// Basis of {v : row . v = 0 for every row}.
Matrix nullspace(const Matrix& rows, std::size_t columns);

/// Some solution of rows * x = rhs, or nullopt if inconsistent.
std::optional<Vec> solve(const Matrix& rows, const Vec& rhs, std::size_t columns);

/// Orthogonal projection of x onto {y : rows * y = rhs}. Rows must be
/// linearly independent and the system consistent.
Vec project_onto_affine(const Matrix& rows, const Vec& rhs, const Vec& x);

Matrix transpose(const Matrix& m, std::size_t columns);

Rational determinant(Matrix m);

}  // namespace microlocal::linalg
