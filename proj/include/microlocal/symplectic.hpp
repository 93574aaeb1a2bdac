#pragma once

// Poisson bracket and Hamiltonian isomorphism on T*R^n in canonical
// coordinates, and the sampled weak-involutivity harness.
//
// Sign convention:
//   {f, g} = sum_j (df/dxi_j dg/dx_j - df/dx_j dg/dxi_j),  so {x_1, xi_1} = -1,
//   H(sum a_j dx_j + b_j dxi_j) = sum b_j d/dx_j - a_j d/dxi_j,  so H(df) g = {f, g}.
// Every check below depends only on vanishing loci, which do not see the sign.

#include "microlocal/geometry.hpp"
#include "microlocal/scalar_field.hpp"

#include <string>
#include <vector>

namespace microlocal {

/// Symbolic bracket over n degrees of freedom (default: the larger of the
/// dimensions of f and g).
ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g, std::size_t n = 0);

/// Bracket value from exact gradients at one point.
Rational poisson_bracket_at(const ScalarField& f, const ScalarField& g, const CotangentPoint& p);

/// theta = (a_1..a_n, b_1..b_n) for sum a dx + b dxi; returns the tangent
/// vector in the same (x, xi) coordinate order.
Vec hamiltonian_vector(const Vec& theta);

struct BracketReport {
  enum class Verdict { Pass, Fail, HypothesisViolated };

  double hypothesis_max = 0.0;  // max |f|, |g| over the samples
  double bracket_max = 0.0;     // max |{f, g}| over the samples
  double tol = 1e-9;            // conclusion tolerance
  double hypothesis_tol = 1e-9;
  std::size_t samples = 0;
  Verdict verdict = Verdict::Pass;
};

std::string verdict_name(BracketReport::Verdict v);

struct InvolutivityOptions {
  double tol = 1e-9;
  double hypothesis_tol = 1e-9;
  /// Evaluate in doubles instead of exact rationals.
  bool floating = false;
};

/// Evaluates f, g and {f, g} on the samples of `a`. Throws InvalidArgument if
/// there are no samples and NonDifferentiable at min/max ties.
BracketReport weak_involutivity_check(const ConicSubset& a, const ScalarField& f, const ScalarField& g,
                                      const InvolutivityOptions& options = {});

struct StrongInvolutivityReport {
  ConicSubset ss0;                 // SS_0(k_Z), Z = (0, oo) in R
  bool ss0_matches_expected = false;   // equals {(x; 0) : x >= 0}
  bool oracle_agrees = false;          // cohomological oracle confirms it on a probe grid
  std::size_t sampled_directions = 0;  // directions of C_p(SS_0, SS_0), p = (0; 0)
  bool cp_in_kernel = false;           // every sampled direction has d(xi) = 0
  Vec hamiltonian;                     // H(-d xi)
  bool hamiltonian_outside = false;    // H(-d xi) is not in C_p(SS_0)
};

/// The truncated microsupport of k_(0,oo) is weakly but not strongly involutive.
StrongInvolutivityReport strong_involutivity_demo(std::uint64_t seed = 1);

}  // namespace microlocal
