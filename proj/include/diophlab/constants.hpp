#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

#include "diophlab/real_context.hpp"

namespace diophlab {

/// Closed real interval with MPFR endpoints rounded outward.
class RealInterval {
 public:
  static constexpr mpfr_prec_t kPrecision = 400;

  RealInterval();
  explicit RealInterval(long v);
  RealInterval(const RealInterval& other);
  RealInterval& operator=(const RealInterval& other);
  ~RealInterval();

  static RealInterval from_mpq(const mpq_class& lo, const mpq_class& hi);
  static RealInterval from_mpq(const mpq_class& v) { return from_mpq(v, v); }
  /// Decimal string, enclosed outward.
  static RealInterval parse(const std::string& decimal);

  friend RealInterval operator+(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator-(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator*(const RealInterval& a, const RealInterval& b);
  /// Requires 0 outside b.
  friend RealInterval operator/(const RealInterval& a, const RealInterval& b);
  RealInterval operator-() const;
  RealInterval sqrt() const;
  RealInterval log() const;
  RealInterval exp() const;
  RealInterval abs() const;
  RealInterval pow(unsigned k) const;

  double lower_d() const;
  double upper_d() const;
  double mid_d() const;
  /// Upper bound on the width.
  double width_d() const;
  /// Upper bound on max |x| over the interval.
  double magnitude_d() const;
  bool contains_zero() const;
  bool certainly_below(const RealInterval& other) const;
  bool certainly_positive() const;
  /// Midpoint with `digits` significant digits.
  std::string decimal(int digits = 50) const;
  /// Width as a power of ten, e.g. "1e-118".
  std::string width_decimal() const;

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

struct ConstantSet {
  RealInterval lambda;
  RealInterval theta;
  RealInterval alpha;
  RealInterval beta;
  RealInterval gamma;
  RealInterval lambda2;
  RealInterval lambda3;
  RealInterval lambda3_alt;  // second closed form
  RealInterval lambda3_cofactor;  // gamma / lambda3
  RealInterval sqrt2_minus_1;
  RealInterval tau4;
  std::optional<RealInterval> c1;

  bool theta_at_least_one = false;
  std::vector<std::string> warnings;
};

/// P2(T) = 3T^4 - 4T^3 + 2T^2 + 2T - 1
RealInterval p2(const RealInterval& t);
RealInterval alpha_of(const RealInterval& lambda);
/// (1 - 2 lambda + alpha) + P2(lambda) / (lambda (lambda^2 - lambda + 1)), identically zero.
RealInterval p2_identity_residual(const RealInterval& lambda);
/// T^2 - (1 + 2 gamma) T + gamma
RealInterval golden_quadratic(const RealInterval& t, const RealInterval& gamma);

/// lambda in (0, 1]; the spec only feeds c1.
ConstantSet constants(const RealInterval& lambda, const RealSpec* spec = nullptr);
ConstantSet constants(const std::string& lambda_decimal, const RealSpec* spec = nullptr);
/// The default exponent lambda3, as a decimal string with 60 digits.
std::string lambda3_decimal();

}  // namespace diophlab
