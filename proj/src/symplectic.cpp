#include "microlocal/symplectic.hpp"

#include "microlocal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace microlocal {

ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g, std::size_t n) {
  if (n == 0) n = std::max(f.dimension(), g.dimension());
  ScalarField out;
  for (std::size_t j = 0; j < n; ++j) {
    Variable x{false, j}, xi{true, j};
    out = out + f.derivative(xi) * g.derivative(x) - f.derivative(x) * g.derivative(xi);
  }
  return out;
}

Rational poisson_bracket_at(const ScalarField& f, const ScalarField& g, const CotangentPoint& p) {
  const std::size_t n = p.x.size();
  if (p.xi.size() != n) throw Error(ErrorCode::DimensionMismatch, "x and xi differ in dimension");
  if (std::max(f.dimension(), g.dimension()) > n) {
    throw Error(ErrorCode::DimensionMismatch, "field uses more variables than the point has");
  }
  auto df = f.value_and_gradient(p.x, p.xi).second;
  auto dg = g.value_and_gradient(p.x, p.xi).second;
  Rational out = 0;
  for (std::size_t j = 0; j < n; ++j) out += df[n + j] * dg[j] - df[j] * dg[n + j];
  return out;
}

Vec hamiltonian_vector(const Vec& theta) {
  if (theta.size() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "covector on T*R^n needs 2n entries");
  const std::size_t n = theta.size() / 2;
  Vec out(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = theta[n + j];
    out[n + j] = -theta[j];
  }
  return out;
}

std::string verdict_name(BracketReport::Verdict v) {
  switch (v) {
    case BracketReport::Verdict::Pass: return "pass";
    case BracketReport::Verdict::Fail: return "fail";
    case BracketReport::Verdict::HypothesisViolated: return "hypothesis-violated";
  }
  return "unknown";
}

BracketReport weak_involutivity_check(const ConicSubset& a, const ScalarField& f, const ScalarField& g,
                                      const InvolutivityOptions& options) {
  if (a.samples().empty()) throw Error(ErrorCode::InvalidArgument, "the conic subset has no samples");
  if (std::max(f.dimension(), g.dimension()) > a.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "field uses more variables than the ambient space has");
  }
  BracketReport report;
  report.tol = options.tol;
  report.hypothesis_tol = options.hypothesis_tol;
  report.samples = a.samples().size();
  if (options.floating) {
    auto bracket = poisson_bracket(f, g, a.dim());
    for (const auto& p : a.samples()) {
      auto x = to_doubles(p.x);
      auto xi = to_doubles(p.xi);
      report.hypothesis_max =
          std::max({report.hypothesis_max, std::abs(f.evaluate_double(x, xi)), std::abs(g.evaluate_double(x, xi))});
      report.bracket_max = std::max(report.bracket_max, std::abs(bracket.evaluate_double(x, xi)));
    }
  } else {
    const std::size_t n = a.dim();
    for (const auto& p : a.samples()) {
      auto [fv, df] = f.value_and_gradient(p.x, p.xi);
      auto [gv, dg] = g.value_and_gradient(p.x, p.xi);
      Rational b = 0;
      for (std::size_t j = 0; j < n; ++j) b += df[n + j] * dg[j] - df[j] * dg[n + j];
      report.hypothesis_max = std::max({report.hypothesis_max, std::abs(to_double(fv)), std::abs(to_double(gv))});
      report.bracket_max = std::max(report.bracket_max, std::abs(to_double(b)));
    }
  }
  if (report.hypothesis_max > report.hypothesis_tol) {
    report.verdict = BracketReport::Verdict::HypothesisViolated;
  } else if (report.bracket_max > report.tol) {
    report.verdict = BracketReport::Verdict::Fail;
  } else {
    report.verdict = BracketReport::Verdict::Pass;
  }
  return report;
}

}  // namespace microlocal
