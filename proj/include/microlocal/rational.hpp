#pragma once

// Exact rational scalars and dense rational vectors.

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace microlocal {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

/// num/den in canonical form (mpq_class's two-argument constructor does not
/// canonicalize).
Rational ratio(long num, long den);
Rational ratio(const mpz_class& num, const mpz_class& den);

/// Parses "p/q", "p", or a finite decimal such as "-0.125".
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers print without a denominator.
std::string to_string(const Rational& value);

double to_double(const Rational& value);
std::vector<double> to_doubles(std::span<const Rational> v);

Vec zeros(std::size_t n);
Vec unit_vector(std::size_t n, std::size_t i);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
Rational squared_norm(std::span<const Rational> a);
double norm(std::span<const Rational> a);

Vec add(std::span<const Rational> a, std::span<const Rational> b);
Vec sub(std::span<const Rational> a, std::span<const Rational> b);
Vec scale(std::span<const Rational> a, const Rational& s);
Vec negate(std::span<const Rational> a);
Vec concat(std::span<const Rational> a, std::span<const Rational> b);

bool is_zero(std::span<const Rational> a);

/// Positive rescaling so that the first nonzero entry has absolute value 1.
/// Zero vectors are returned unchanged.
Vec normalize_direction(std::span<const Rational> a);

/// Rational approximation of a double with a power-of-two denominator.
Rational approximate(double value, unsigned bits = 30);

/// Rational q with q^2 <= r, close to sqrt(r) from below.
Rational sqrt_lower_bound(const Rational& r, unsigned bits = 30);

std::string format_vector(std::span<const Rational> v);

}  // namespace microlocal
