#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "diophlab/constants.hpp"

using namespace diophlab;

namespace {

// Published decimals are truncations: 0.424158... is quoted as 0.4241.
std::string truncated(const RealInterval& v, int places) {
  std::string d = v.decimal(40);
  return d.substr(0, d.find('.') + 1 + static_cast<std::size_t>(places));
}

}  // namespace

TEST_CASE("published constants match the stated decimals") {
  ConstantSet cs = constants(lambda3_decimal());
  CHECK(truncated(cs.lambda3, 4) == "0.4245");
  CHECK(truncated(cs.lambda2, 4) == "0.4241");
  CHECK(truncated(cs.sqrt2_minus_1, 4) == "0.4142");
  CHECK(truncated(cs.tau4, 4) == "3.3556");
  CHECK(truncated(cs.lambda3_cofactor, 3) == "3.811");
  CHECK(truncated(cs.gamma, 4) == "1.6180");
  CHECK((cs.tau4 - (RealInterval(1) / cs.lambda3 + RealInterval(1))).magnitude_d() < 1e-45);
  CHECK(cs.sqrt2_minus_1.certainly_below(cs.lambda2));
  CHECK(cs.lambda2.certainly_below(cs.lambda3));
}

TEST_CASE("both closed forms of lambda3 agree far beyond 45 digits") {
  ConstantSet cs = constants(lambda3_decimal());
  RealInterval diff = (cs.lambda3 - cs.lambda3_alt).abs();
  CHECK(diff.upper_d() < 1e-45);
  CHECK(cs.lambda3.width_d() < 1e-100);
  // 50 significant digits printed from either form coincide
  CHECK(cs.lambda3.decimal(50) == cs.lambda3_alt.decimal(50));
  CHECK(cs.lambda3.decimal(50).rfind("0.4245069034188409096444633261757859054950411137835", 0) == 0);
}

TEST_CASE("lambda3 and gamma/lambda3 are the roots of T^2 - (1+2 gamma) T + gamma") {
  ConstantSet cs = constants(lambda3_decimal());
  CHECK(golden_quadratic(cs.lambda3, cs.gamma).magnitude_d() < 1e-45);
  CHECK(golden_quadratic(cs.lambda3_cofactor, cs.gamma).magnitude_d() < 1e-45);
  RealInterval one(1), two(2);
  CHECK(((cs.lambda3 + cs.lambda3_cofactor) - (one + two * cs.gamma)).magnitude_d() < 1e-45);
  CHECK((cs.lambda3 * cs.lambda3_cofactor - cs.gamma).magnitude_d() < 1e-45);
  // theta - 1/theta = 1/gamma at lambda3
  RealInterval th = cs.theta;
  CHECK((th - one / th - one / cs.gamma).magnitude_d() < 1e-45);
}

TEST_CASE("lambda2 is the positive root of P2") {
  ConstantSet cs = constants(lambda3_decimal());
  CHECK(p2(cs.lambda2).magnitude_d() < 1e-45);
  CHECK(cs.lambda2.width_d() < 1e-45);
  CHECK(p2(RealInterval(0)).certainly_below(RealInterval(0)));
}

TEST_CASE("the alpha identity holds at random exponents") {
  std::mt19937_64 rng(20240607);
  std::uniform_int_distribution<long> num(340001, 499999);
  for (int k = 0; k < 100; ++k) {
    RealInterval lam = RealInterval::from_mpq(mpq_class(num(rng), 1000000));
    CHECK(p2_identity_residual(lam).magnitude_d() < 1e-40);
  }
  RealInterval at = RealInterval::parse("0.43");
  CHECK(p2_identity_residual(at).magnitude_d() < 1e-40);
}

TEST_CASE("theta, alpha and beta at specific exponents") {
  ConstantSet half = constants("0.5");
  CHECK(half.theta.mid_d() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(half.theta_at_least_one);
  CHECK(half.warnings.empty());
  CHECK(half.beta.mid_d() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  ConstantSet one = constants("1.0");
  CHECK(one.theta.magnitude_d() < 1e-100);
  CHECK_FALSE(one.theta_at_least_one);
  REQUIRE(one.warnings.size() == 1);
  CHECK(one.warnings[0].find("theta >= 1 fails") != std::string::npos);

  ConstantSet c = constants("0.43");
  CHECK(c.theta.mid_d() == doctest::Approx(0.57 / 0.43).epsilon(1e-14));
  double l = 0.43;
  double alpha = (-std::pow(l, 4) + std::pow(l, 3) + l * l - 3 * l + 1) / (l * (l * l - l + 1));
  CHECK(c.alpha.mid_d() == doctest::Approx(alpha).epsilon(1e-13));

  CHECK_THROWS_AS(constants("0"), std::out_of_range);
  CHECK_THROWS_AS(constants("1.5"), std::out_of_range);
  CHECK_THROWS_AS(constants("-0.2"), std::out_of_range);
}

TEST_CASE("c1 uses the size of xi") {
  RealSpec s = RealSpec::algebraic(IntPoly({-2, 0, 0, 0, 1}), 1, 2);
  ConstantSet cs = constants("0.5", &s);
  REQUIRE(cs.c1.has_value());
  CHECK(cs.c1->mid_d() == doctest::Approx(2 * std::pow(std::pow(2.0, 0.25), 1.5)).epsilon(1e-14));
  RealSpec small = RealSpec::algebraic(IntPoly({-1, 0, 2}), 0, 1);
  CHECK(constants("0.5", &small).c1->mid_d() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(constants("0.5").c1.has_value());
}
