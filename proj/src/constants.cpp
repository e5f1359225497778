#include "diophlab/constants.hpp"

#include <algorithm>
#include <stdexcept>

#include "diophlab/polynomial.hpp"

namespace diophlab {

namespace {

constexpr mpfr_prec_t P = RealInterval::kPrecision;

void set_min(mpfr_t out, mpfr_t a, mpfr_t b) { mpfr_min(out, a, b, MPFR_RNDD); }
void set_max(mpfr_t out, mpfr_t a, mpfr_t b) { mpfr_max(out, a, b, MPFR_RNDU); }

}  // namespace

RealInterval::RealInterval() {
  mpfr_init2(lo_, P);
  mpfr_init2(hi_, P);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

RealInterval::RealInterval(long v) : RealInterval() {
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

RealInterval::RealInterval(const RealInterval& other) : RealInterval() {
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

RealInterval& RealInterval::operator=(const RealInterval& other) {
  if (this != &other) {
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

RealInterval::~RealInterval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

RealInterval RealInterval::from_mpq(const mpq_class& lo, const mpq_class& hi) {
  RealInterval r;
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

RealInterval RealInterval::parse(const std::string& decimal) {
  RealInterval r;
  char* end = nullptr;
  mpfr_strtofr(r.lo_, decimal.c_str(), &end, 10, MPFR_RNDD);
  if (end == decimal.c_str() || *end != '\0') throw std::invalid_argument("not a decimal number: " + decimal);
  mpfr_strtofr(r.hi_, decimal.c_str(), &end, 10, MPFR_RNDU);
  return r;
}

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
  RealInterval r;
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

RealInterval RealInterval::operator-() const {
  RealInterval r;
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) { return a + (-b); }

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  RealInterval r;
  mpfr_t t;
  mpfr_init2(t, P);
  mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
  const mpfr_srcptr pairs[3][2] = {{a.lo_, b.hi_}, {a.hi_, b.lo_}, {a.hi_, b.hi_}};
  for (const auto& p : pairs) {
    mpfr_mul(t, p[0], p[1], MPFR_RNDD);
    set_min(r.lo_, r.lo_, t);
    mpfr_mul(t, p[0], p[1], MPFR_RNDU);
    set_max(r.hi_, r.hi_, t);
  }
  mpfr_clear(t);
  return r;
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
  if (b.contains_zero()) throw std::domain_error("interval division by an interval containing 0");
  RealInterval r;
  mpfr_t t;
  mpfr_init2(t, P);
  mpfr_div(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_div(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
  const mpfr_srcptr pairs[3][2] = {{a.lo_, b.hi_}, {a.hi_, b.lo_}, {a.hi_, b.hi_}};
  for (const auto& p : pairs) {
    mpfr_div(t, p[0], p[1], MPFR_RNDD);
    set_min(r.lo_, r.lo_, t);
    mpfr_div(t, p[0], p[1], MPFR_RNDU);
    set_max(r.hi_, r.hi_, t);
  }
  mpfr_clear(t);
  return r;
}

RealInterval RealInterval::sqrt() const {
  if (mpfr_sgn(hi_) < 0) throw std::domain_error("sqrt of a negative interval");
  RealInterval r;
  if (mpfr_sgn(lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealInterval RealInterval::log() const {
  if (mpfr_sgn(lo_) <= 0) throw std::domain_error("log of a non-positive interval");
  RealInterval r;
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealInterval RealInterval::exp() const {
  RealInterval r;
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealInterval RealInterval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  if (mpfr_sgn(hi_) <= 0) return -*this;
  RealInterval r;
  mpfr_set_zero(r.lo_, 1);
  mpfr_t t;
  mpfr_init2(t, P);
  mpfr_neg(t, lo_, MPFR_RNDU);
  mpfr_max(r.hi_, t, hi_, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

RealInterval RealInterval::pow(unsigned k) const {
  RealInterval r(1);
  for (unsigned i = 0; i < k; ++i) r = r * *this;
  return r;
}

double RealInterval::lower_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double RealInterval::upper_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double RealInterval::mid_d() const {
  mpfr_t t;
  mpfr_init2(t, P + 1);
  mpfr_add(t, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(t, t, 1, MPFR_RNDN);
  double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

double RealInterval::width_d() const {
  mpfr_t t;
  mpfr_init2(t, P);
  mpfr_sub(t, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(t, MPFR_RNDU);
  mpfr_clear(t);
  return d;
}

double RealInterval::magnitude_d() const { return abs().upper_d(); }

bool RealInterval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool RealInterval::certainly_below(const RealInterval& other) const {
  return mpfr_less_p(hi_, other.lo_) != 0;
}

bool RealInterval::certainly_positive() const { return mpfr_sgn(lo_) > 0; }

std::string RealInterval::decimal(int digits) const {
  mpfr_t t;
  mpfr_init2(t, P + 1);
  mpfr_add(t, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(t, t, 1, MPFR_RNDN);
  std::string out;
  if (mpfr_zero_p(t)) {
    out = "0";
  } else {
    mpfr_exp_t e = 0;
    char* s = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(digits), t, MPFR_RNDN);
    std::string m(s);
    mpfr_free_str(s);
    bool neg = !m.empty() && m[0] == '-';
    if (neg) m.erase(0, 1);
    if (e <= 0) {
      out = "0." + std::string(static_cast<std::size_t>(-e), '0') + m;
    } else if (static_cast<std::size_t>(e) >= m.size()) {
      out = m + std::string(static_cast<std::size_t>(e) - m.size(), '0');
    } else {
      out = m.substr(0, static_cast<std::size_t>(e)) + "." + m.substr(static_cast<std::size_t>(e));
    }
    if (neg) out = "-" + out;
  }
  mpfr_clear(t);
  return out;
}

std::string RealInterval::width_decimal() const {
  mpfr_t t;
  mpfr_init2(t, P);
  mpfr_sub(t, hi_, lo_, MPFR_RNDU);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.1RUe", t);
  std::string out(buf);
  mpfr_free_str(buf);
  mpfr_clear(t);
  return out;
}

RealInterval p2(const RealInterval& t) {
  return RealInterval(3) * t.pow(4) - RealInterval(4) * t.pow(3) + RealInterval(2) * t.pow(2) +
         RealInterval(2) * t - RealInterval(1);
}

RealInterval alpha_of(const RealInterval& l) {
  RealInterval num = -l.pow(4) + l.pow(3) + l.pow(2) - RealInterval(3) * l + RealInterval(1);
  return num / (l * (l.pow(2) - l + RealInterval(1)));
}

RealInterval p2_identity_residual(const RealInterval& l) {
  RealInterval lhs = RealInterval(1) - RealInterval(2) * l + alpha_of(l);
  return lhs + p2(l) / (l * (l.pow(2) - l + RealInterval(1)));
}

RealInterval golden_quadratic(const RealInterval& t, const RealInterval& gamma) {
  return t.pow(2) - (RealInterval(1) + RealInterval(2) * gamma) * t + gamma;
}

namespace {

RealInterval lambda2_interval() {
  // the unique positive root of P2, by exact bisection on [0, 1]
  const IntPoly poly({-1, 2, 2, -4, 3});
  mpq_class lo = 0, hi = 1;
  for (int k = 0; k < 300; ++k) {
    mpq_class mid = (lo + hi) / 2;
    int s = poly.sign_at(mid);
    if (s == 0) return RealInterval::from_mpq(mid);
    if (s < 0) lo = mid; else hi = mid;
  }
  return RealInterval::from_mpq(lo, hi);
}

}  // namespace

ConstantSet constants(const RealInterval& lambda, const RealSpec* spec) {
  if (!lambda.certainly_positive() || RealInterval(1).certainly_below(lambda)) {
    throw std::out_of_range("lambda must lie in (0, 1]");
  }
  ConstantSet c;
  const RealInterval one(1), two(2);
  c.lambda = lambda;
  c.theta = (one - lambda) / lambda;
  c.alpha = alpha_of(lambda);
  c.beta = (one - lambda) / (lambda.pow(2) - lambda + one);
  RealInterval sqrt5 = RealInterval(5).sqrt();
  c.gamma = (one + sqrt5) / two;
  c.lambda2 = lambda2_interval();
  c.lambda3 = (one + two * c.gamma - (one + RealInterval(4) * c.gamma.pow(2)).sqrt()) / two;
  c.lambda3_alt = (two + sqrt5 - (RealInterval(7) + two * sqrt5).sqrt()) / two;
  c.lambda3_cofactor = c.gamma / c.lambda3;
  c.sqrt2_minus_1 = two.sqrt() - one;
  c.tau4 = one / c.lambda3 + one;
  if (spec != nullptr) {
    Enclosure xi = xi_enclosure(*spec, 400);
    Enclosure a = xi.abs();
    mpq_class lo = std::max(mpq_class(1), a.lower().to_mpq());
    mpq_class hi = std::max(mpq_class(1), a.upper().to_mpq());
    RealInterval m = RealInterval::from_mpq(lo, hi);
    c.c1 = two * (RealInterval(3) * lambda * m.log()).exp();
  }
  c.theta_at_least_one = !c.theta.certainly_below(one);
  if (c.theta.certainly_below(one)) {
    c.warnings.emplace_back("theta >= 1 fails: lambda > 1/2 lies outside the regime lambda <= 1/2");
  }
  return c;
}

ConstantSet constants(const std::string& lambda_decimal, const RealSpec* spec) {
  return constants(RealInterval::parse(lambda_decimal), spec);
}

std::string lambda3_decimal() {
  return constants(RealInterval::parse("0.4")).lambda3.decimal(60);
}

}  // namespace diophlab
