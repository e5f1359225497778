#pragma once

#include <compare>
#include <string>

#include <gmpxx.h>

namespace diophlab {

/// Exact dyadic rational m * 2^e, kept with an odd mantissa (or m = 0, e = 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(mpz_class mantissa, long exponent);
  explicit Dyadic(long value) : Dyadic(mpz_class(value), 0) {}
  static Dyadic from_integer(const mpz_class& value) { return Dyadic(value, 0); }

  const mpz_class& mantissa() const { return mantissa_; }
  long exponent() const { return exponent_; }
  int sign() const { return sgn(mantissa_); }
  bool is_integer() const { return exponent_ >= 0; }

  Dyadic operator-() const { return Dyadic(-mantissa_, exponent_); }
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const mpz_class& k);

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  mpz_class floor() const;
  mpz_class ceil() const;
  /// Largest multiple of 2^exponent that is <= *this.
  Dyadic round_down(long exponent) const;
  /// Smallest multiple of 2^exponent that is >= *this.
  Dyadic round_up(long exponent) const;

  /// The integer m' with *this = m' * 2^exponent; requires exponent <= exponent().
  mpz_class scaled_mantissa(long exponent) const;

  mpq_class to_mpq() const;
  double to_double() const;
  /// Decimal rendering with `digits` significant digits, rounded toward -inf
  /// (direction < 0), +inf (direction > 0) or to nearest (direction == 0).
  std::string to_decimal(int digits = 30, int direction = 0) const;

  static Dyadic floor_of(const mpq_class& q, long exponent);
  static Dyadic ceil_of(const mpq_class& q, long exponent);
  /// Exact parse of "m*2^e" as produced by to_exact_string().
  static Dyadic parse_exact(const std::string& text);
  std::string to_exact_string() const;

 private:
  void normalize();

  mpz_class mantissa_{0};
  long exponent_ = 0;
};

Dyadic min(const Dyadic& a, const Dyadic& b);
Dyadic max(const Dyadic& a, const Dyadic& b);

/// Closed interval [lower, upper] with dyadic endpoints.
class Enclosure {
 public:
  Enclosure() = default;
  Enclosure(Dyadic lower, Dyadic upper);
  static Enclosure point(const Dyadic& value) { return {value, value}; }
  /// Outward dyadic rounding of the rational interval [lo, hi] to the grid 2^exponent.
  static Enclosure outward(const mpq_class& lo, const mpq_class& hi, long exponent);

  const Dyadic& lower() const { return lower_; }
  const Dyadic& upper() const { return upper_; }
  Dyadic width() const { return upper_ - lower_; }
  bool is_point() const { return lower_ == upper_; }

  bool contains(const Dyadic& x) const { return lower_ <= x && x <= upper_; }
  bool contains(const mpq_class& x) const;
  bool contains(const Enclosure& other) const {
    return lower_ <= other.lower_ && other.upper_ <= upper_;
  }
  bool intersects(const Enclosure& other) const {
    return !(upper_ < other.lower_ || other.upper_ < lower_);
  }
  /// -1 if entirely below `other`, +1 if entirely above, 0 if they overlap.
  int compare(const Enclosure& other) const;

  double midpoint() const;
  /// log2 of the width, or -inf for a point.
  double log2_width() const;

  Enclosure operator-() const { return {-upper_, -lower_}; }
  friend Enclosure operator+(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator-(const Enclosure& a, const Enclosure& b) { return a + (-b); }
  friend Enclosure operator*(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator*(const Enclosure& a, const mpz_class& k);

  Enclosure abs() const;
  Enclosure pow(unsigned k) const;
  Enclosure round_outward(long exponent) const;

 private:
  Dyadic lower_;
  Dyadic upper_;
};

Enclosure hull_max(const Enclosure& a, const Enclosure& b);

}  // namespace diophlab
