#include "diophlab/dyadic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <mpfr.h>

namespace diophlab {

Dyadic::Dyadic(mpz_class mantissa, long exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  normalize();
}

void Dyadic::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  mp_bitcnt_t zeros = mpz_scan1(mantissa_.get_mpz_t(), 0);
  if (zeros > 0) {
    mpz_fdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(), zeros);
    exponent_ += static_cast<long>(zeros);
  }
}

mpz_class Dyadic::scaled_mantissa(long exponent) const {
  if (mantissa_ == 0) return 0;
  if (exponent > exponent_) throw std::logic_error("scaled_mantissa: exponent too coarse");
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(),
               static_cast<mp_bitcnt_t>(exponent_ - exponent));
  return out;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.mantissa_ == 0) return b;
  if (b.mantissa_ == 0) return a;
  long e = std::min(a.exponent_, b.exponent_);
  return Dyadic(a.scaled_mantissa(e) + b.scaled_mantissa(e), e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

Dyadic operator*(const Dyadic& a, const mpz_class& k) {
  return Dyadic(a.mantissa_ * k, a.exponent_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  int sa = a.sign();
  int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  long e = std::min(a.exponent_, b.exponent_);
  int c = cmp(a.scaled_mantissa(e), b.scaled_mantissa(e));
  return c <=> 0;
}

mpz_class Dyadic::floor() const {
  if (exponent_ >= 0) return scaled_mantissa(0);
  mpz_class out;
  mpz_fdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent_));
  return out;
}

mpz_class Dyadic::ceil() const {
  if (exponent_ >= 0) return scaled_mantissa(0);
  mpz_class out;
  mpz_cdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent_));
  return out;
}

Dyadic Dyadic::round_down(long exponent) const {
  if (exponent_ >= exponent) return *this;
  mpz_class out;
  mpz_fdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(exponent - exponent_));
  return Dyadic(out, exponent);
}

Dyadic Dyadic::round_up(long exponent) const {
  if (exponent_ >= exponent) return *this;
  mpz_class out;
  mpz_cdiv_q_2exp(out.get_mpz_t(), mantissa_.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(exponent - exponent_));
  return Dyadic(out, exponent);
}

mpq_class Dyadic::to_mpq() const {
  mpq_class q(mantissa_);
  if (exponent_ >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent_));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent_));
  }
  return q;
}

double Dyadic::to_double() const {
  long exp = 0;
  double m = mpz_get_d_2exp(&exp, mantissa_.get_mpz_t());
  return std::ldexp(m, static_cast<int>(exp + exponent_));
}

std::string Dyadic::to_decimal(int digits, int direction) const {
  mpfr_rnd_t rnd = direction < 0 ? MPFR_RNDD : (direction > 0 ? MPFR_RNDU : MPFR_RNDN);
  mpfr_prec_t bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(mantissa_.get_mpz_t(), 2)) + 2;
  bits = std::max<mpfr_prec_t>(bits, static_cast<mpfr_prec_t>(digits * 4 + 8));
  mpfr_t v;
  mpfr_init2(v, bits);
  mpfr_set_z_2exp(v, mantissa_.get_mpz_t(), exponent_, rnd);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*R*e", digits - 1, rnd, v);
  std::string out(buf);
  mpfr_free_str(buf);
  mpfr_clear(v);
  return out;
}

Dyadic Dyadic::floor_of(const mpq_class& q, long exponent) {
  // floor(q * 2^-exponent) * 2^exponent
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  if (exponent <= 0) {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
  } else {
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
  }
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Dyadic(out, exponent);
}

Dyadic Dyadic::ceil_of(const mpq_class& q, long exponent) {
  return -floor_of(-q, exponent);
}

std::string Dyadic::to_exact_string() const {
  return mantissa_.get_str() + "*2^" + std::to_string(exponent_);
}

Dyadic Dyadic::parse_exact(const std::string& text) {
  auto star = text.find("*2^");
  if (star == std::string::npos) return Dyadic(mpz_class(text), 0);
  return Dyadic(mpz_class(text.substr(0, star)), std::stol(text.substr(star + 3)));
}

Dyadic min(const Dyadic& a, const Dyadic& b) { return a < b ? a : b; }
Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

Enclosure::Enclosure(Dyadic lower, Dyadic upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (upper_ < lower_) throw std::invalid_argument("Enclosure: lower > upper");
}

Enclosure Enclosure::outward(const mpq_class& lo, const mpq_class& hi, long exponent) {
  return {Dyadic::floor_of(lo, exponent), Dyadic::ceil_of(hi, exponent)};
}

bool Enclosure::contains(const mpq_class& x) const {
  return lower_.to_mpq() <= x && x <= upper_.to_mpq();
}

int Enclosure::compare(const Enclosure& other) const {
  if (upper_ < other.lower_) return -1;
  if (other.upper_ < lower_) return 1;
  return 0;
}

double Enclosure::midpoint() const {
  Dyadic sum = lower_ + upper_;
  return sum.to_double() / 2.0;
}

double Enclosure::log2_width() const {
  Dyadic w = width();
  if (w.sign() == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  double m = mpz_get_d_2exp(&exp, w.mantissa().get_mpz_t());
  return std::log2(m) + static_cast<double>(exp + w.exponent());
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return {a.lower_ + b.lower_, a.upper_ + b.upper_};
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  Dyadic p1 = a.lower_ * b.lower_;
  Dyadic p2 = a.lower_ * b.upper_;
  Dyadic p3 = a.upper_ * b.lower_;
  Dyadic p4 = a.upper_ * b.upper_;
  return {min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4))};
}

Enclosure operator*(const Enclosure& a, const mpz_class& k) {
  if (k >= 0) return {a.lower_ * k, a.upper_ * k};
  return {a.upper_ * k, a.lower_ * k};
}

Enclosure Enclosure::abs() const {
  if (lower_.sign() >= 0) return *this;
  if (upper_.sign() <= 0) return -*this;
  return {Dyadic(), max(-lower_, upper_)};
}

Enclosure Enclosure::pow(unsigned k) const {
  if (k == 0) return point(Dyadic(1));
  if (lower_.sign() < 0 && k % 2 == 0) return abs().pow(k);
  // x -> x^k is increasing here
  Dyadic lo = lower_;
  Dyadic hi = upper_;
  for (unsigned i = 1; i < k; ++i) {
    lo = lo * lower_;
    hi = hi * upper_;
  }
  return {lo, hi};
}

Enclosure Enclosure::round_outward(long exponent) const {
  return {lower_.round_down(exponent), upper_.round_up(exponent)};
}

Enclosure hull_max(const Enclosure& a, const Enclosure& b) {
  return {max(a.lower(), b.lower()), max(a.upper(), b.upper())};
}

}  // namespace diophlab
