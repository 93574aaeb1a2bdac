#pragma once

// Expression trees over x_1..x_n, xi_1..xi_n with exact evaluation and
// exact gradients.
//
// Text syntax (prefix):
//   expr := number | variable | "(" op expr... ")"
//   op   := + | - | * | / | ^ | min | max
//   variable := x<i> | xi<i>   (1-based; aliases x, y, z, xi, eta, zeta)
//   number := integer | p/q | decimal
// "^" takes an integer exponent literal. "-" with one argument negates.

#include "microlocal/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace microlocal {

struct Variable {
  bool fiber = false;      // false: x_i, true: xi_i
  std::size_t index = 0;   // 0-based
  bool operator==(const Variable&) const = default;
};

class ScalarField {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Min, Max, KinkSelect };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  ScalarField();  // constant 0
  explicit ScalarField(NodePtr node) : node_(std::move(node)) {}

  static ScalarField constant(const Rational& value);
  static ScalarField x(std::size_t i);   // 0-based
  static ScalarField xi(std::size_t i);  // 0-based
  static ScalarField variable(Variable v);

  static ScalarField parse(std::string_view text);
  /// {"const": "1/2"} | {"var": "x1"} | {"op": "+", "args": [...]} with
  /// "exp" for "^".
  static ScalarField from_json_text(std::string_view json);

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a);
  friend ScalarField pow(const ScalarField& a, int exponent);
  friend ScalarField min(const ScalarField& a, const ScalarField& b);
  friend ScalarField max(const ScalarField& a, const ScalarField& b);

  Kind kind() const;
  const NodePtr& node() const { return node_; }

  /// Exact value; throws DivisionByZero.
  Rational evaluate(const Vec& x, const Vec& xi) const;
  double evaluate_double(const std::vector<double>& x, const std::vector<double>& xi) const;

  /// Value and gradient (d/dx_1..d/dx_n, d/dxi_1..d/dxi_n), exact, by forward
  /// mode. Throws NonDifferentiable at min/max ties.
  std::pair<Rational, Vec> value_and_gradient(const Vec& x, const Vec& xi) const;

  ScalarField derivative(Variable v) const;

  /// 1 + the largest variable index used (0 for constants).
  std::size_t dimension() const;
  bool uses_fiber_variables() const;
  bool division_free() const;
  bool has_kinks() const;
  bool is_constant() const { return kind() == Kind::Const; }
  /// Value of a constant node.
  const Rational& constant_value() const;

  std::string to_string() const;

 private:
  NodePtr node_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField pow(const ScalarField& a, int exponent);
ScalarField min(const ScalarField& a, const ScalarField& b);
ScalarField max(const ScalarField& a, const ScalarField& b);

/// Affine data of a field that is affine in x only: value = <linear, x> + offset.
struct AffineForm {
  Vec linear;
  Rational offset;
};

/// Returns the affine form if `f` is affine in x_1..x_n and does not use
/// fiber variables (checked exactly by polarization at random points).
std::optional<AffineForm> as_affine(const ScalarField& f, std::size_t n);

/// Quadratic data: value = 1/2 x^T Q x + <c, x> + offset.
struct QuadraticForm {
  std::vector<Vec> q;
  Vec linear;
  Rational offset;
};

std::optional<QuadraticForm> as_quadratic(const ScalarField& f, std::size_t n);

}  // namespace microlocal
