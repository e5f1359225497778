#include "diophlab/polynomial.hpp"

#include <stdexcept>

namespace diophlab {

namespace {

using QPoly = std::vector<mpq_class>;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly to_q(const IntPoly& p) {
  QPoly out;
  for (const auto& c : p.coefficients()) out.emplace_back(c);
  return out;
}

IntPoly from_q(const QPoly& p) {
  if (p.empty()) return IntPoly();
  mpz_class den = 1;
  for (const auto& c : p) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> out;
  for (const auto& c : p) {
    mpq_class scaled = c * den;
    out.push_back(scaled.get_num());
  }
  return IntPoly(std::move(out)).primitive_part();
}

// remainder of a modulo b over Q
QPoly remainder(QPoly a, const QPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    mpq_class factor = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= factor * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

}  // namespace

IntPoly::IntPoly(std::vector<mpz_class> coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

mpz_class IntPoly::content() const {
  mpz_class g = 0;
  for (const auto& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

IntPoly IntPoly::primitive_part() const {
  if (is_zero()) return *this;
  mpz_class g = content();
  if (leading() < 0) g = -g;
  std::vector<mpz_class> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c / g);
  return IntPoly(std::move(out));
}

IntPoly IntPoly::derivative() const {
  std::vector<mpz_class> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<long>(i));
  return IntPoly(std::move(out));
}

int IntPoly::sign_at(const mpq_class& x) const {
  // den^d * p(num/den) = sum c_j num^j den^(d-j)
  if (is_zero()) return 0;
  const mpz_class& num = x.get_num();
  const mpz_class& den = x.get_den();
  mpz_class acc = 0;
  mpz_class den_pow = 1;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    acc = acc * num + coeffs_[k] * den_pow;
    den_pow *= den;
  }
  return sgn(acc);
}

int IntPoly::sign_at(const Dyadic& x) const {
  if (is_zero()) return 0;
  if (x.exponent() >= 0) return sign_at(mpq_class(x.floor()));
  const mpz_class& m = x.mantissa();
  const auto shift = static_cast<mp_bitcnt_t>(-x.exponent());
  mpz_class acc = 0;
  mp_bitcnt_t den_shift = 0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    mpz_class term;
    mpz_mul_2exp(term.get_mpz_t(), coeffs_[k].get_mpz_t(), den_shift);
    acc = acc * m + term;
    den_shift += shift;
  }
  return sgn(acc);
}

mpq_class IntPoly::evaluate(const mpq_class& x) const {
  mpq_class acc = 0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * x + mpq_class(coeffs_[k]);
  return acc;
}

IntPoly gcd(const IntPoly& a, const IntPoly& b) {
  QPoly x = to_q(a);
  QPoly y = to_q(b);
  trim(x);
  trim(y);
  if (x.empty()) return from_q(y);
  while (!y.empty()) {
    QPoly r = remainder(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return from_q(x);
}

IntPoly exact_quotient(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("exact_quotient: division by zero polynomial");
  QPoly rem = to_q(a);
  QPoly div = to_q(b);
  trim(rem);
  if (rem.size() < div.size()) return IntPoly();
  QPoly quot(rem.size() - div.size() + 1);
  while (rem.size() >= div.size()) {
    mpq_class factor = rem.back() / div.back();
    std::size_t shift = rem.size() - div.size();
    quot[shift] = factor;
    for (std::size_t i = 0; i < div.size(); ++i) rem[shift + i] -= factor * div[i];
    rem.pop_back();
    trim(rem);
  }
  if (!rem.empty()) throw std::invalid_argument("exact_quotient: nonzero remainder");
  return from_q(quot);
}

IntPoly squarefree_part(const IntPoly& p) {
  if (p.degree() <= 0) return p.primitive_part();
  IntPoly g = gcd(p, p.derivative());
  if (g.degree() <= 0) return p.primitive_part();
  return exact_quotient(p, g);
}

std::vector<mpq_class> rational_roots(const IntPoly& p) {
  std::vector<mpq_class> roots;
  if (p.degree() <= 0) return roots;
  // strip factors of x
  std::size_t low = 0;
  const auto& c = p.coefficients();
  while (c[low] == 0) ++low;
  if (low > 0) roots.emplace_back(0);
  mpz_class a0 = abs(c[low]);
  mpz_class an = abs(c.back());
  auto divisors = [](const mpz_class& n) {
    std::vector<mpz_class> out;
    // trial division; inputs here are small hand-entered coefficients
    for (mpz_class d = 1; d * d <= n; ++d) {
      if (n % d == 0) {
        out.push_back(d);
        if (d * d != n) out.push_back(n / d);
      }
    }
    return out;
  };
  for (const auto& num : divisors(a0)) {
    for (const auto& den : divisors(an)) {
      for (int s : {1, -1}) {
        mpq_class q(num * s, den);
        q.canonicalize();
        if (p.evaluate(q) == 0) {
          bool seen = false;
          for (const auto& r : roots) seen = seen || r == q;
          if (!seen) roots.push_back(q);
        }
      }
    }
  }
  return roots;
}

int count_real_roots(const IntPoly& p, const mpq_class& lo, const mpq_class& hi) {
  IntPoly sf = squarefree_part(p);
  if (sf.degree() <= 0) return 0;
  std::vector<QPoly> chain;
  chain.push_back(to_q(sf));
  chain.push_back(to_q(sf.derivative()));
  while (true) {
    QPoly r = remainder(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  auto variations = [&](const mpq_class& x) {
    int count = 0;
    int last = 0;
    for (const auto& q : chain) {
      mpq_class v = 0;
      for (std::size_t k = q.size(); k-- > 0;) v = v * x + q[k];
      int s = sgn(v);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  return variations(lo) - variations(hi);
}

}  // namespace diophlab
