#include "diophlab/real_context.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace diophlab {

namespace {

mpq_class pow2(long e) {
  mpq_class q = 1;
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

// floor(-log2(w)) for a positive rational w, up to one unit
long neg_log2(const mpq_class& w) {
  long num_bits = static_cast<long>(mpz_sizeinbase(w.get_num_mpz_t(), 2));
  long den_bits = static_cast<long>(mpz_sizeinbase(w.get_den_mpz_t(), 2));
  return den_bits - num_bits - 1;
}

mpz_class floor_scaled(const mpq_class& q, long shift) {
  // floor(q * 2^shift)
  return Dyadic::floor_of(q, -shift).scaled_mantissa(-shift);
}

mpz_class ceil_scaled(const mpq_class& q, long shift) {
  return Dyadic::ceil_of(q, -shift).scaled_mantissa(-shift);
}

// Grid cell of width 2^-shift containing the value known to lie in [a, b],
// where [a, b] spans at most one interior grid point. `side` decides on which
// side of a grid point g the value lies: -1 below, 0 equal, +1 above.
template <typename Side>
Enclosure cell_from_bracket(const mpq_class& a, const mpq_class& b, long shift, Side side) {
  const long e = -shift;
  mpz_class lo_idx = floor_scaled(a, shift);
  mpz_class hi_idx = ceil_scaled(b, shift);
  if (lo_idx == hi_idx) return Enclosure::point(Dyadic(lo_idx, e));
  if (hi_idx - lo_idx == 1) return {Dyadic(lo_idx, e), Dyadic(hi_idx, e)};
  mpz_class g = lo_idx + 1;
  int s = side(Dyadic(g, e));
  if (s == 0) return Enclosure::point(Dyadic(g, e));
  if (s > 0) return {Dyadic(g, e), Dyadic(g + 1, e)};
  return {Dyadic(g - 1, e), Dyadic(g, e)};
}

Enclosure algebraic_cell(const RealSpec& spec, long bits) {
  const IntPoly& p = spec.defining_polynomial();
  const IntPoly dp = p.derivative();
  mpq_class a = spec.bracket_lo();
  mpq_class b = spec.bracket_hi();
  const int sa = p.sign_at(a);
  const int sb = p.sign_at(b);
  const long target_bits = bits + 2;
  const mpq_class target = pow2(-target_bits);
  const mpq_class newton_threshold = pow2(-20);
  bool exact = false;
  while (!exact && b - a > target) {
    mpq_class w = b - a;
    if (w < newton_threshold) {
      mpq_class m = (a + b) / 2;
      mpq_class dpm = dp.evaluate(m);
      if (dpm != 0) {
        mpq_class x = m - p.evaluate(m) / dpm;
        long k = neg_log2(w);
        long next = std::min(2 * k - 4, target_bits + 1);
        if (next > k + 1) {
          mpq_class delta = pow2(-next);
          mpq_class center = Dyadic::floor_of(x, -(next + 2)).to_mpq();
          mpq_class l = center - delta;
          mpq_class r = center + delta;
          if (a < l && r < b && p.sign_at(l) == sa && p.sign_at(r) == sb) {
            a = l;
            b = r;
            continue;
          }
        }
      }
    }
    mpq_class m = (a + b) / 2;
    int s = p.sign_at(m);
    if (s == 0) {
      a = m;
      b = m;
      exact = true;
    } else if (s == sa) {
      a = m;
    } else {
      b = m;
    }
  }
  return cell_from_bracket(a, b, bits + 1, [&](const Dyadic& g) {
    int s = p.sign_at(g);
    if (s == 0) return 0;
    return s == sa ? 1 : -1;
  });
}

struct Convergent {
  mpz_class p;
  mpz_class q;
};

Enclosure continued_fraction_cell(const ContinuedFractionSpec& cf, long bits) {
  const long shift = bits + 1;
  mpz_class p_prev = 1, q_prev = 0;
  mpz_class p = cf.a0, q = 1;
  if (!cf.periodic) {
    for (std::size_t k = 1; k <= cf.quotients.size(); ++k) {
      const mpz_class& a = cf.quotient(k);
      mpz_class pn = a * p + p_prev;
      mpz_class qn = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    mpq_class v(p, q);
    v.canonicalize();
    return cell_from_bracket(v, v, shift, [&](const Dyadic& g) {
      return cmp(v, g.to_mpq());
    });
  }
  for (std::size_t k = 1;; ++k) {
    const mpz_class& a = cf.quotient(k);
    mpz_class pn = a * p + p_prev;
    mpz_class qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    mpq_class c1(p_prev, q_prev);
    mpq_class c2(p, q);
    c1.canonicalize();
    c2.canonicalize();
    mpq_class lo = std::min(c1, c2);
    mpq_class hi = std::max(c1, c2);
    mpz_class lo_idx = floor_scaled(lo, shift);
    mpz_class hi_idx = ceil_scaled(hi, shift);
    // xi is irrational, so strictly inside (lo, hi) and never on the grid
    if (hi_idx - lo_idx == 1) {
      return {Dyadic(lo_idx, -shift), Dyadic(hi_idx, -shift)};
    }
  }
}

long bit_length(const mpz_class& v) {
  return v == 0 ? 0 : static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

}  // namespace

void PrecisionContext::validate() const {
  if (initial_bits < 64) throw std::invalid_argument("precision: initial bits must be >= 64");
  if (escalation_factor < 2) throw std::invalid_argument("precision: escalation factor must be >= 2");
  if (cap_bits < initial_bits) throw std::invalid_argument("precision: cap must be >= initial bits");
}

PrecisionContext PrecisionContext::from_environment() {
  PrecisionContext ctx;
  if (const char* cap = std::getenv("DIOPHLAB_PRECISION_CAP"); cap != nullptr && *cap != '\0') {
    ctx.cap_bits = std::stol(cap);
  }
  return ctx;
}

const mpz_class& ContinuedFractionSpec::quotient(std::size_t k) const {
  if (k == 0) return a0;
  if (!periodic || k <= preperiod) return quotients.at(k - 1);
  std::size_t period = quotients.size() - preperiod;
  return quotients[preperiod + (k - 1 - preperiod) % period];
}

RealSpec RealSpec::algebraic(IntPoly poly, mpq_class lo, mpq_class hi, std::string label) {
  if (poly.degree() < 1) throw InvalidSpec("algebraic spec: polynomial must have degree >= 1");
  lo.canonicalize();
  hi.canonicalize();
  if (!(lo < hi)) throw InvalidSpec("algebraic spec: interval must satisfy lo < hi");
  IntPoly prim = poly.primitive_part();
  int slo = prim.sign_at(lo);
  int shi = prim.sign_at(hi);
  if (slo == 0 || shi == 0 || slo == shi) {
    throw InvalidSpec("algebraic spec: polynomial must change sign strictly across the interval");
  }
  if (count_real_roots(prim, lo, hi) != 1) {
    throw InvalidSpec("algebraic spec: interval must isolate exactly one real root");
  }
  RealSpec spec;
  spec.data_ = AlgebraicSpec{prim, lo, hi};
  spec.label_ = std::move(label);
  spec.defining_ = squarefree_part(prim);
  spec.bracket_lo_ = lo;
  spec.bracket_hi_ = hi;
  return spec;
}

RealSpec RealSpec::continued_fraction(mpz_class a0, std::vector<mpz_class> quotients,
                                      bool periodic, std::size_t preperiod, std::string label) {
  for (const auto& q : quotients) {
    if (q < 1) throw InvalidSpec("continued fraction: partial quotients must be >= 1");
  }
  if (periodic && preperiod >= quotients.size()) {
    throw InvalidSpec("continued fraction: periodic expansion needs a nonempty period");
  }
  RealSpec spec;
  ContinuedFractionSpec cf{std::move(a0), std::move(quotients), periodic, preperiod};
  if (!periodic) {
    mpz_class p_prev = 1, q_prev = 0, p = cf.a0, q = 1;
    for (std::size_t k = 1; k <= cf.quotients.size(); ++k) {
      mpz_class pn = cf.quotient(k) * p + p_prev;
      mpz_class qn = cf.quotient(k) * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    mpq_class v(p, q);
    v.canonicalize();
    spec.defining_ = IntPoly({-v.get_num(), v.get_den()});
    spec.bracket_lo_ = v - 1;
    spec.bracket_hi_ = v + 1;
  } else {
    // xi = M(eta) with M the Mobius map of the preperiod, eta = N(eta) for the period.
    mpz_class A = 1, B = 0, C = 0, D = 1;
    auto push = [](mpz_class& a, mpz_class& b, mpz_class& c, mpz_class& d, const mpz_class& x) {
      mpz_class na = a * x + b;
      mpz_class nc = c * x + d;
      b = a;
      d = c;
      a = na;
      c = nc;
    };
    push(A, B, C, D, cf.a0);
    for (std::size_t k = 0; k < cf.preperiod; ++k) push(A, B, C, D, cf.quotients[k]);
    mpz_class P = 1, P1 = 0, Q = 0, Q1 = 1;
    for (std::size_t k = cf.preperiod; k < cf.quotients.size(); ++k) push(P, P1, Q, Q1, cf.quotients[k]);
    // eta satisfies Q eta^2 + (Q1 - P) eta - P1 = 0 and eta = (D xi - B) / (A - C xi)
    mpz_class m = Q1 - P;
    mpz_class c2 = Q * D * D - m * C * D - P1 * C * C;
    mpz_class c1 = -2 * Q * B * D + m * (A * D + B * C) + 2 * P1 * A * C;
    mpz_class c0 = Q * B * B - m * A * B - P1 * A * A;
    spec.defining_ = IntPoly({c0, c1, c2}).primitive_part();
    mpz_class p_prev = 1, q_prev = 0, p = cf.a0, q = 1;
    for (std::size_t k = 1;; ++k) {
      mpz_class pn = cf.quotient(k) * p + p_prev;
      mpz_class qn = cf.quotient(k) * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
      mpq_class u(p_prev, q_prev);
      mpq_class v(p, q);
      u.canonicalize();
      v.canonicalize();
      mpq_class lo = std::min(u, v);
      mpq_class hi = std::max(u, v);
      int slo = spec.defining_.sign_at(lo);
      int shi = spec.defining_.sign_at(hi);
      if (slo != 0 && shi != 0 && slo != shi) {
        spec.bracket_lo_ = lo;
        spec.bracket_hi_ = hi;
        break;
      }
    }
  }
  spec.data_ = std::move(cf);
  spec.label_ = std::move(label);
  return spec;
}

SpecKind RealSpec::kind() const {
  return std::holds_alternative<AlgebraicSpec>(data_) ? SpecKind::algebraic
                                                      : SpecKind::continued_fraction;
}

bool RealSpec::vanishes_at_xi(const IntPoly& q) const {
  if (q.is_zero()) return true;
  if (q.degree() == 0) return false;
  IntPoly g = gcd(defining_, q);
  if (g.degree() <= 0) return false;
  return g.sign_at(bracket_lo_) * g.sign_at(bracket_hi_) < 0;
}

Enclosure xi_enclosure(const RealSpec& spec, long bits) {
  if (spec.kind() == SpecKind::algebraic) return algebraic_cell(spec, bits);
  return continued_fraction_cell(spec.as_continued_fraction(), bits);
}

PowerTable::PowerTable(const RealSpec& spec, int n, long bits) : bits_(bits) {
  if (n < 0) throw std::invalid_argument("PowerTable: n must be >= 0");
  Enclosure coarse = xi_enclosure(spec, 8);
  mpz_class lo_abs = abs(coarse.lower().floor());
  mpz_class hi_abs = abs(coarse.upper().ceil());
  mpz_class bound = std::max(lo_abs, hi_abs) + 1;
  long guard = 4 + n * bit_length(bound) + bit_length(n);
  const Dyadic limit(1, -bits);
  while (true) {
    Enclosure xi = xi_enclosure(spec, bits + guard);
    std::vector<Enclosure> powers;
    powers.reserve(static_cast<std::size_t>(n) + 1);
    bool ok = true;
    for (int i = 0; i <= n; ++i) {
      Enclosure p = xi.pow(static_cast<unsigned>(i)).round_outward(-(bits + 2));
      if (p.width() > limit) ok = false;
      powers.push_back(std::move(p));
    }
    if (ok) {
      powers_ = std::move(powers);
      return;
    }
    guard += 16;
  }
}

std::vector<Enclosure> evaluate_powers(const RealSpec& spec, int n, long bits,
                                       const PrecisionContext& ctx) {
  if (n < 1 || n > 8) throw std::invalid_argument("evaluate_powers: need 1 <= n <= 8");
  if (bits > ctx.cap_bits) {
    PowerTable best(spec, n, ctx.cap_bits);
    throw EscalationFailure("evaluate_powers: requested precision exceeds the cap",
                            ctx.cap_bits, best[static_cast<std::size_t>(n)].log2_width());
  }
  PowerTable table(spec, n, bits);
  return {table.powers().begin() + 1, table.powers().end()};
}

std::vector<Enclosure> evaluate_powers(const RealSpec& spec, int n, const PrecisionContext& ctx) {
  return evaluate_powers(spec, n, ctx.initial_bits, ctx);
}

PowerLadder::PowerLadder(const RealSpec& spec, int n, PrecisionContext ctx)
    : spec_(spec), n_(n), ctx_(ctx) {
  ctx_.validate();
}

long PowerLadder::bits_at(std::size_t level) const {
  long bits = ctx_.initial_bits;
  for (std::size_t i = 0; i < level; ++i) {
    if (bits > ctx_.cap_bits / ctx_.escalation_factor) return ctx_.cap_bits + 1;
    bits *= ctx_.escalation_factor;
  }
  return bits;
}

const PowerTable& PowerLadder::level(std::size_t level) {
  auto it = tables_.find(level);
  if (it != tables_.end()) return it->second;
  long bits = bits_at(level);
  if (bits > ctx_.cap_bits) {
    double achieved = -static_cast<double>(bits_at(level == 0 ? 0 : level - 1));
    throw EscalationFailure("precision cap of " + std::to_string(ctx_.cap_bits) +
                                " bits reached before a decision",
                            bits_at(level == 0 ? 0 : level - 1), achieved);
  }
  return tables_.emplace(level, PowerTable(spec_, n_, bits)).first->second;
}

XiForm XiForm::monomial_offset(const mpz_class& a, int k, const mpz_class& b) {
  XiForm f;
  f.coeffs.assign(static_cast<std::size_t>(std::max(k, 0)) + 1, mpz_class(0));
  f.coeffs[static_cast<std::size_t>(k)] += a;
  f.coeffs[0] -= b;
  return f;
}

XiForm XiForm::operator-() const {
  XiForm f = *this;
  for (auto& c : f.coeffs) c = -c;
  return f;
}

XiForm operator+(const XiForm& a, const XiForm& b) {
  XiForm f;
  f.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), mpz_class(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) f.coeffs[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) f.coeffs[i] += b.coeffs[i];
  return f;
}

Enclosure enclose(const XiForm& form, const PowerTable& table) {
  Enclosure acc = Enclosure::point(Dyadic());
  for (std::size_t j = 0; j < form.coeffs.size(); ++j) {
    if (form.coeffs[j] == 0) continue;
    if (j == 0) {
      acc = acc + Enclosure::point(Dyadic::from_integer(form.coeffs[0]));
    } else {
      acc = acc + table[j] * form.coeffs[j];
    }
  }
  return acc;
}

bool is_exactly_zero(const RealSpec& spec, const XiForm& form) {
  return spec.vanishes_at_xi(form.as_polynomial());
}

int sign(const XiForm& form, PowerLadder& ladder) {
  bool zero_checked = false;
  for (std::size_t level = 0;; ++level) {
    Enclosure e = enclose(form, ladder.level(level));
    if (e.lower().sign() > 0) return 1;
    if (e.upper().sign() < 0) return -1;
    if (!zero_checked) {
      if (is_exactly_zero(ladder.spec(), form)) return 0;
      zero_checked = true;
    }
  }
}

int compare_abs(const XiForm& a, const XiForm& b, PowerLadder& ladder) {
  bool tie_checked = false;
  for (std::size_t level = 0;; ++level) {
    const PowerTable& table = ladder.level(level);
    int c = enclose(a, table).abs().compare(enclose(b, table).abs());
    if (c != 0) return c;
    if (!tie_checked) {
      if (is_exactly_zero(ladder.spec(), a - b) || is_exactly_zero(ladder.spec(), a + b)) return 0;
      tie_checked = true;
    }
  }
}

mpz_class floor_exact(const XiForm& form, PowerLadder& ladder) {
  bool integers_checked = false;
  for (std::size_t level = 0;; ++level) {
    Enclosure e = enclose(form, ladder.level(level));
    mpz_class f = e.lower().floor();
    if (e.upper() < Dyadic::from_integer(f + 1)) return f;
    if (!integers_checked) {
      mpz_class top = e.upper().floor();
      if (top - f <= 2) {
        for (mpz_class m = f + 1; m <= top; ++m) {
          if (is_exactly_zero(ladder.spec(), form - XiForm::constant(m))) return m;
        }
      }
      integers_checked = true;
    }
  }
}

mpz_class ceil_exact(const XiForm& form, PowerLadder& ladder) {
  return -floor_exact(-form, ladder);
}

mpz_class nearest_integer_multiple(const mpz_class& x0, int i, PowerLadder& ladder) {
  if (x0 < 1) throw std::invalid_argument("nearest_integer_multiple: x0 must be >= 1");
  if (i < 1 || i > ladder.n()) throw std::invalid_argument("nearest_integer_multiple: bad power index");
  const Dyadic half(1, -1);
  bool ties_checked = false;
  for (std::size_t level = 0;; ++level) {
    Enclosure t = ladder.level(level)[static_cast<std::size_t>(i)] * x0;
    mpz_class h = (t.lower() + half).floor();
    Dyadic hd = Dyadic::from_integer(h);
    if (t.lower() > hd - half && t.upper() < hd + half) return h;
    if (!ties_checked) {
      // half-integers k + 1/2 inside the enclosure
      mpz_class first = (t.lower() - half).ceil();
      mpz_class last = (t.upper() - half).floor();
      if (last - first <= 2) {
        for (mpz_class k = first; k <= last; ++k) {
          XiForm f = XiForm::monomial_offset(2 * x0, i, 2 * k + 1);
          if (is_exactly_zero(ladder.spec(), f)) {
            throw SuspectedRationality("x0 * xi^" + std::to_string(i) + " is the half-integer " +
                                       k.get_str() + ".5 for x0 = " + x0.get_str());
          }
        }
      }
      ties_checked = true;
    }
  }
}

mpz_class nearest_integer_multiple(const RealSpec& spec, const mpz_class& x0, int i,
                                   const PrecisionContext& ctx) {
  PowerLadder ladder(spec, std::max(i, 1), ctx);
  return nearest_integer_multiple(x0, i, ladder);
}

DegreeReport degree_precheck(const RealSpec& spec) {
  DegreeReport report;
  IntPoly p;
  if (spec.kind() == SpecKind::algebraic) {
    p = spec.as_algebraic().poly;
  } else {
    p = spec.defining_polynomial();
    report.notes.emplace_back(spec.as_continued_fraction().periodic
                                  ? "periodic continued fraction: xi is a quadratic irrational"
                                  : "finite continued fraction: xi is rational");
  }
  report.degree = p.degree();
  report.squarefree = gcd(p, p.derivative()).degree() <= 0;
  report.no_rational_root = rational_roots(p).empty();
  report.degree_above_three = report.degree >= 4;
  report.irreducibility_certified = false;
  report.notes.emplace_back("irreducibility over Q is not certified; reducibility risk unverified");
  return report;
}

}  // namespace diophlab
