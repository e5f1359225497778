#include "doctest.h"

#include <cmath>

#include <mpfr.h>

#include "diophlab/real_context.hpp"

using namespace diophlab;

namespace {

RealSpec fourth_root(long a) {
  return RealSpec::algebraic(IntPoly({-a, 0, 0, 0, 1}), 1, 2, "root");
}

RealSpec sqrt2() { return RealSpec::algebraic(IntPoly({-2, 0, 1}), 1, 2, "sqrt2"); }

// a^(k/4) rounded down and up with MPFR, independently of the library
std::pair<mpq_class, mpq_class> mpfr_bracket(long a, long k, long bits) {
  mpfr_t lo, hi;
  mpfr_inits2(bits, lo, hi, (mpfr_ptr)nullptr);
  mpfr_set_si(lo, a, MPFR_RNDD);
  mpfr_set_si(hi, a, MPFR_RNDU);
  mpfr_rootn_ui(lo, lo, 4, MPFR_RNDD);
  mpfr_rootn_ui(hi, hi, 4, MPFR_RNDU);
  mpfr_pow_ui(lo, lo, static_cast<unsigned long>(k), MPFR_RNDD);
  mpfr_pow_ui(hi, hi, static_cast<unsigned long>(k), MPFR_RNDU);
  mpq_class ql, qh;
  mpfr_get_q(ql.get_mpq_t(), lo);
  mpfr_get_q(qh.get_mpq_t(), hi);
  mpfr_clears(lo, hi, (mpfr_ptr)nullptr);
  return {ql, qh};
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(RealSpec::algebraic(IntPoly({5}), 0, 1), InvalidSpec);
  CHECK_THROWS_AS(RealSpec::algebraic(IntPoly({-2, 0, 1}), 2, 3), InvalidSpec);
  CHECK_THROWS_AS(RealSpec::algebraic(IntPoly({-2, 0, 1}), -2, 2), InvalidSpec);
  CHECK_THROWS_AS(RealSpec::algebraic(IntPoly({-2, 0, 1}), 2, 1), InvalidSpec);
  CHECK_THROWS_AS(RealSpec::continued_fraction(1, {mpz_class(0)}, false), InvalidSpec);
  CHECK_THROWS_AS(RealSpec::continued_fraction(1, {}, true), InvalidSpec);
  CHECK_NOTHROW(RealSpec::algebraic(IntPoly({-4, 0, 2}), 1, 2));
}

TEST_CASE("powers of sqrt2") {
  PrecisionContext ctx;
  auto p = evaluate_powers(sqrt2(), 2, 64, ctx);
  REQUIRE(p.size() == 2);
  CHECK(p[1].contains(mpq_class(2)));
  CHECK(p[1].width() <= Dyadic(1, -60));
  CHECK(p[0].contains(Dyadic(1, 0)) == false);
}

TEST_CASE("golden ratio from a truncated continued fraction") {
  std::vector<mpz_class> ones(40, mpz_class(1));
  RealSpec golden = RealSpec::continued_fraction(1, ones, false);
  PrecisionContext ctx;
  auto p = evaluate_powers(golden, 1, 64, ctx);
  // (1+sqrt5)/2 is within F_41^-2 of the truncation
  CHECK(std::abs(p[0].midpoint() - (1 + std::sqrt(5.0)) / 2) < 1e-15);
  CHECK(p[0].width() <= Dyadic(1, -64));

  RealSpec periodic = RealSpec::continued_fraction(1, {mpz_class(1)}, true);
  CHECK(periodic.defining_polynomial() == IntPoly({-1, -1, 1}));
  Enclosure e = xi_enclosure(periodic, 200);
  mpq_class lo = e.lower().to_mpq();
  mpq_class hi = e.upper().to_mpq();
  CHECK(lo * lo - lo - 1 < 0);
  CHECK(hi * hi - hi - 1 > 0);
}

TEST_CASE("periodic continued fraction with preperiod") {
  // sqrt(7) = [2; 1, 1, 1, 4, ...]
  RealSpec s = RealSpec::continued_fraction(
      2, {mpz_class(1), mpz_class(1), mpz_class(1), mpz_class(4)}, true, 0);
  CHECK(s.defining_polynomial() == IntPoly({-7, 0, 1}));
  // [1; 2, 1, 1, 1, ...] = 1 + 1/(2 + 1/golden)
  RealSpec t = RealSpec::continued_fraction(1, {mpz_class(2), mpz_class(1)}, true, 1);
  Enclosure e = xi_enclosure(t, 100);
  double golden = (1 + std::sqrt(5.0)) / 2;
  double expected = 1 + 1 / (2 + 1 / golden);
  CHECK(std::abs(e.midpoint() - expected) < 1e-14);
  CHECK(t.defining_polynomial().degree() == 2);
}

TEST_CASE("powers of 2^(1/4) against MPFR") {
  RealSpec s = fourth_root(2);
  for (long bits : {64L, 200L, 1000L}) {
    PowerTable t(s, 3, bits);
    for (long k = 1; k <= 3; ++k) {
      auto [lo, hi] = mpfr_bracket(2, k, bits + 64);
      const Enclosure& e = t[static_cast<std::size_t>(k)];
      CHECK(e.lower().to_mpq() <= lo);
      CHECK(hi <= e.upper().to_mpq());
      CHECK(e.width() <= Dyadic(1, -bits));
    }
  }
}

TEST_CASE("enclosure soundness and nesting") {
  RealSpec s = RealSpec::algebraic(IntPoly({-1, -1, 0, 0, 1}), 1, 2);
  Enclosure prev = xi_enclosure(s, 64);
  for (long bits = 65; bits < 400; bits += 37) {
    Enclosure e = xi_enclosure(s, bits);
    CHECK(prev.contains(e));
    int a = s.defining_polynomial().sign_at(e.lower());
    int b = s.defining_polynomial().sign_at(e.upper());
    CHECK(a * b < 0);
    prev = e;
  }
  PowerTable t(s, 3, 128);
  for (std::size_t i = 1; i < 3; ++i) CHECK(t[i + 1].intersects(t[i] * t[1]));
}

TEST_CASE("rational xi on the grid") {
  RealSpec half = RealSpec::algebraic(IntPoly({-1, 2}), 0, 1);
  Enclosure e = xi_enclosure(half, 10);
  CHECK(e.is_point());
  CHECK(e.lower() == Dyadic(1, -1));
}

TEST_CASE("nearest integer multiples") {
  PrecisionContext ctx;
  CHECK(nearest_integer_multiple(sqrt2(), 5, 1, ctx) == 7);
  CHECK(nearest_integer_multiple(sqrt2(), 1, 2, ctx) == 2);
  CHECK(nearest_integer_multiple(fourth_root(2), 12, 3, ctx) == 20);
  PowerLadder ladder(fourth_root(2), 3, ctx);
  mpz_class first = nearest_integer_multiple(987654321, 3, ladder);
  PrecisionContext fine;
  fine.initial_bits = 4096;
  fine.cap_bits = 8192;
  CHECK(nearest_integer_multiple(fourth_root(2), 987654321, 3, fine) == first);
}

TEST_CASE("exact ties raise suspected rationality") {
  PrecisionContext ctx;
  ctx.cap_bits = 1024;
  RealSpec half = RealSpec::algebraic(IntPoly({-3, 2}), 1, 2);
  CHECK_THROWS_AS(nearest_integer_multiple(half, 1, 1, ctx), SuspectedRationality);
  CHECK(nearest_integer_multiple(half, 2, 1, ctx) == 3);
  RealSpec r = RealSpec::algebraic(IntPoly({-2, 0, 4}), 0, 1);  // 1/sqrt2, xi^2 = 1/2
  CHECK_THROWS_AS(nearest_integer_multiple(r, 1, 2, ctx), SuspectedRationality);
}

TEST_CASE("exact sign and comparison") {
  PrecisionContext ctx;
  RealSpec s = sqrt2();
  PowerLadder ladder(s, 2, ctx);
  CHECK(sign(XiForm::monomial_offset(1, 2, 2), ladder) == 0);
  CHECK(sign(XiForm::monomial_offset(5, 1, 7), ladder) == 1);
  CHECK(sign(XiForm::monomial_offset(12, 1, 17), ladder) == -1);
  // |sqrt2 - 1| vs |1 - sqrt2|
  XiForm a = XiForm::monomial_offset(1, 1, 1);
  CHECK(compare_abs(a, -a, ladder) == 0);
  CHECK(compare_abs(a, XiForm::monomial_offset(5, 1, 7), ladder) == 1);
  CHECK(floor_exact(XiForm::monomial_offset(3, 2, 0), ladder) == 6);
  CHECK(ceil_exact(XiForm::monomial_offset(3, 2, 0), ladder) == 6);
  CHECK(floor_exact(XiForm::monomial_offset(10, 1, 0), ladder) == 14);
  CHECK(ceil_exact(XiForm::monomial_offset(10, 1, 0), ladder) == 15);
}

TEST_CASE("escalation failure at a tiny cap") {
  PrecisionContext ctx;
  ctx.cap_bits = 128;
  PowerLadder ladder(sqrt2(), 2, ctx);
  CHECK_THROWS_AS(ladder.level(1), EscalationFailure);
  CHECK_THROWS_AS(evaluate_powers(sqrt2(), 2, 256, ctx), EscalationFailure);
  PrecisionContext bad;
  bad.initial_bits = 32;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("degree precheck") {
  DegreeReport a = degree_precheck(fourth_root(2));
  CHECK(a.checks_passed());
  CHECK_FALSE(a.irreducibility_certified);
  DegreeReport b = degree_precheck(sqrt2());
  CHECK_FALSE(b.degree_above_three);
  CHECK_FALSE(b.checks_passed());
  // x^4 - 4 = (x^2 - 2)(x^2 + 2): passes the partial screen though reducible
  DegreeReport c = degree_precheck(RealSpec::algebraic(IntPoly({-4, 0, 0, 0, 1}), 1, 2));
  CHECK(c.squarefree);
  CHECK(c.no_rational_root);
  CHECK(c.degree_above_three);
  CHECK_FALSE(c.irreducibility_certified);
  DegreeReport d = degree_precheck(RealSpec::algebraic(IntPoly({2, -3, 1}), mpq_class(3, 2), 3));
  CHECK_FALSE(d.no_rational_root);
}
