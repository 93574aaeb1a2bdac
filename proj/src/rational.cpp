#include "microlocal/rational.hpp"

#include "microlocal/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace microlocal {

namespace {

bool valid_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rational ratio(long num, long den) { return ratio(mpz_class(num), mpz_class(den)); }

Rational ratio(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!valid_integer(num) || !valid_integer(den)) {
      throw Error(ErrorCode::Parse, "malformed rational '" + std::string(text) + "'");
    }
    mpz_class d = parse_integer(den);
    if (d == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
    Rational r(parse_integer(num), d);
    r.canonicalize();
    return r;
  }
  if (auto dot_pos = text.find('.'); dot_pos != std::string_view::npos) {
    auto whole = text.substr(0, dot_pos);
    auto frac = text.substr(dot_pos + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    std::string_view digits = whole;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
    if ((!digits.empty() && !valid_integer(digits)) || (!frac.empty() && !valid_integer(frac)) ||
        (digits.empty() && frac.empty()) || (!frac.empty() && (frac[0] == '-' || frac[0] == '+'))) {
      throw Error(ErrorCode::Parse, "malformed decimal '" + std::string(text) + "'");
    }
    mpz_class w = digits.empty() ? mpz_class(0) : parse_integer(digits);
    mpz_class f = frac.empty() ? mpz_class(0) : parse_integer(frac);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational r(w * den + f, den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }
  if (!valid_integer(text)) {
    throw Error(ErrorCode::Parse, "malformed rational '" + std::string(text) + "'");
  }
  return Rational(parse_integer(text));
}

std::string to_string(const Rational& value) { return value.get_str(); }

double to_double(const Rational& value) { return value.get_d(); }

std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

Vec zeros(std::size_t n) { return Vec(n, Rational(0)); }

Vec unit_vector(std::size_t n, std::size_t i) {
  Vec v = zeros(n);
  v[i] = 1;
  return v;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "dot product of vectors of different length");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  }
  return s;
}

Rational squared_norm(std::span<const Rational> a) { return dot(a, a); }

double norm(std::span<const Rational> a) { return std::sqrt(squared_norm(a).get_d()); }

Vec add(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector sum of different lengths");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector difference of different lengths");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(std::span<const Rational> a, const Rational& s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

Vec negate(std::span<const Rational> a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

Vec concat(std::span<const Rational> a, std::span<const Rational> b) {
  Vec r(a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

bool is_zero(std::span<const Rational> a) {
  for (const auto& x : a) {
    if (sgn(x) != 0) return false;
  }
  return true;
}

Vec normalize_direction(std::span<const Rational> a) {
  for (const auto& x : a) {
    if (sgn(x) != 0) return scale(a, Rational(1) / abs(x));
  }
  return Vec(a.begin(), a.end());
}

Rational approximate(double value, unsigned bits) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "cannot approximate a non-finite value");
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, bits);
  Rational r(mpz_class(std::round(std::ldexp(value, static_cast<int>(bits)))), den);
  r.canonicalize();
  return r;
}

Rational sqrt_lower_bound(const Rational& r, unsigned bits) {
  if (sgn(r) < 0) throw Error(ErrorCode::InvalidArgument, "square root of a negative rational");
  if (sgn(r) == 0) return 0;
  Rational q = approximate(std::sqrt(r.get_d()), bits);
  while (q * q > r) q -= Rational(1, 1u << 20) * q;
  return q;
}

std::string format_vector(std::span<const Rational> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i].get_str();
  }
  os << ')';
  return os.str();
}

}  // namespace microlocal
