#pragma once

#include <vector>

#include <gmpxx.h>

#include "diophlab/dyadic.hpp"

namespace diophlab {

/// Dense integer polynomial, constant term first. Trailing zeros are trimmed.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<mpz_class> coefficients);

  const std::vector<mpz_class>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const mpz_class& leading() const { return coeffs_.back(); }

  mpz_class content() const;
  /// Divides by the content and makes the leading coefficient positive.
  IntPoly primitive_part() const;
  IntPoly derivative() const;

  /// Sign of p(x), computed exactly.
  int sign_at(const mpq_class& x) const;
  int sign_at(const Dyadic& x) const;
  mpq_class evaluate(const mpq_class& x) const;

  friend bool operator==(const IntPoly&, const IntPoly&) = default;

 private:
  std::vector<mpz_class> coeffs_;
};

/// Primitive gcd over Q (leading coefficient positive).
IntPoly gcd(const IntPoly& a, const IntPoly& b);
/// p / gcd(p, p'), primitive.
IntPoly squarefree_part(const IntPoly& p);
/// Exact quotient over Q, scaled back to a primitive integer polynomial.
IntPoly exact_quotient(const IntPoly& a, const IntPoly& b);
/// All rational roots, via the rational root test.
std::vector<mpq_class> rational_roots(const IntPoly& p);
/// Number of distinct real roots of p in the half-open interval (lo, hi], via Sturm.
int count_real_roots(const IntPoly& p, const mpq_class& lo, const mpq_class& hi);

}  // namespace diophlab
