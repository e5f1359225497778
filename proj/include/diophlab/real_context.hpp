#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "diophlab/dyadic.hpp"
#include "diophlab/polynomial.hpp"

namespace diophlab {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The precision cap was reached before the requested decision or width.
class EscalationFailure : public std::runtime_error {
 public:
  EscalationFailure(const std::string& what, long achieved_bits, double achieved_log2_width)
      : std::runtime_error(what), achieved_bits_(achieved_bits),
        achieved_log2_width_(achieved_log2_width) {}
  long achieved_bits() const { return achieved_bits_; }
  double achieved_log2_width() const { return achieved_log2_width_; }

 private:
  long achieved_bits_;
  double achieved_log2_width_;
};

/// A nearest-integer decision hit an exact half-integer: x0 * xi^i is rational.
class SuspectedRationality : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrecisionContext {
  long initial_bits = 128;
  long escalation_factor = 2;
  long cap_bits = 1L << 20;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
  /// Default context, with the cap overridden by DIOPHLAB_PRECISION_CAP when set.
  static PrecisionContext from_environment();
};

struct AlgebraicSpec {
  IntPoly poly;  // primitive, leading coefficient positive
  mpq_class lo;
  mpq_class hi;
};

/// xi = [a0; q_1, q_2, ...]. When periodic, q_{preperiod..} repeats forever;
/// otherwise the expansion is finite and xi is rational.
struct ContinuedFractionSpec {
  mpz_class a0;
  std::vector<mpz_class> quotients;
  bool periodic = false;
  std::size_t preperiod = 0;

  /// Partial quotient number k (k >= 1); requires k within range for finite expansions.
  const mpz_class& quotient(std::size_t k) const;
  /// Number of quotients after a0; 0 means unbounded (periodic).
  std::size_t finite_length() const { return periodic ? 0 : quotients.size(); }
};

enum class SpecKind { algebraic, continued_fraction };

class RealSpec {
 public:
  static RealSpec algebraic(IntPoly poly, mpq_class lo, mpq_class hi, std::string label = "");
  static RealSpec continued_fraction(mpz_class a0, std::vector<mpz_class> quotients,
                                     bool periodic, std::size_t preperiod = 0,
                                     std::string label = "");

  SpecKind kind() const;
  const std::string& label() const { return label_; }
  const AlgebraicSpec& as_algebraic() const { return std::get<AlgebraicSpec>(data_); }
  const ContinuedFractionSpec& as_continued_fraction() const {
    return std::get<ContinuedFractionSpec>(data_);
  }

  /// Squarefree integer polynomial vanishing at xi, with an interval
  /// [bracket_lo, bracket_hi] on which it changes sign and has xi as its only root.
  /// For continued fractions this is derived (linear or quadratic).
  const IntPoly& defining_polynomial() const { return defining_; }
  const mpq_class& bracket_lo() const { return bracket_lo_; }
  const mpq_class& bracket_hi() const { return bracket_hi_; }

  /// Exact test of Q(xi) = 0.
  bool vanishes_at_xi(const IntPoly& q) const;

 private:
  RealSpec() = default;
  std::variant<AlgebraicSpec, ContinuedFractionSpec> data_;
  std::string label_;
  IntPoly defining_;
  mpq_class bracket_lo_;
  mpq_class bracket_hi_;
};

/// Certified enclosure of xi: the grid cell of width 2^-(bits+1) containing it
/// (a point when xi lies on the grid). Nested across increasing bits.
Enclosure xi_enclosure(const RealSpec& spec, long bits);

/// Enclosures of xi^0 .. xi^n, each of width at most 2^-bits.
class PowerTable {
 public:
  PowerTable(const RealSpec& spec, int n, long bits);
  long bits() const { return bits_; }
  int n() const { return static_cast<int>(powers_.size()) - 1; }
  const Enclosure& operator[](std::size_t i) const { return powers_.at(i); }
  const std::vector<Enclosure>& powers() const { return powers_; }

 private:
  long bits_;
  std::vector<Enclosure> powers_;
};

/// Enclosures of xi^1 .. xi^n at the context's initial precision.
std::vector<Enclosure> evaluate_powers(const RealSpec& spec, int n, const PrecisionContext& ctx);
std::vector<Enclosure> evaluate_powers(const RealSpec& spec, int n, long bits,
                                       const PrecisionContext& ctx);

/// Escalating sequence of power tables for one xi, built lazily.
/// Not thread-safe; create one per computation.
class PowerLadder {
 public:
  PowerLadder(const RealSpec& spec, int n, PrecisionContext ctx);
  const RealSpec& spec() const { return spec_; }
  int n() const { return n_; }
  const PrecisionContext& context() const { return ctx_; }
  /// Table at initial_bits * factor^level; throws EscalationFailure past the cap.
  const PowerTable& level(std::size_t level);
  const PowerTable& base() { return level(0); }
  long bits_at(std::size_t level) const;

 private:
  RealSpec spec_;
  int n_;
  PrecisionContext ctx_;
  std::map<std::size_t, PowerTable> tables_;
};

/// Integer combination sum_j c_j xi^j of powers of xi.
struct XiForm {
  std::vector<mpz_class> coeffs;

  static XiForm constant(const mpz_class& c) { return XiForm{{c}}; }
  /// a * xi^k - b
  static XiForm monomial_offset(const mpz_class& a, int k, const mpz_class& b);
  XiForm operator-() const;
  friend XiForm operator+(const XiForm& a, const XiForm& b);
  friend XiForm operator-(const XiForm& a, const XiForm& b) { return a + (-b); }
  IntPoly as_polynomial() const { return IntPoly(coeffs); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

Enclosure enclose(const XiForm& form, const PowerTable& table);
bool is_exactly_zero(const RealSpec& spec, const XiForm& form);
/// Exact sign of the form's value.
int sign(const XiForm& form, PowerLadder& ladder);
/// Exact comparison of |a| and |b|: -1, 0 or +1.
int compare_abs(const XiForm& a, const XiForm& b, PowerLadder& ladder);
mpz_class floor_exact(const XiForm& form, PowerLadder& ladder);
mpz_class ceil_exact(const XiForm& form, PowerLadder& ladder);

/// The integer nearest to x0 * xi^i. Throws SuspectedRationality on an exact tie,
/// EscalationFailure if the cap is reached first.
mpz_class nearest_integer_multiple(const RealSpec& spec, const mpz_class& x0, int i,
                                   const PrecisionContext& ctx);
mpz_class nearest_integer_multiple(const mpz_class& x0, int i, PowerLadder& ladder);

struct DegreeReport {
  int degree = 0;
  bool squarefree = false;
  bool no_rational_root = false;
  bool degree_above_three = false;
  bool irreducibility_certified = false;  // never certified
  std::vector<std::string> notes;

  bool checks_passed() const { return squarefree && no_rational_root && degree_above_three; }
};

/// Partial screen of [Q(xi):Q] > 3: squarefree, no rational root, degree >= 4.
DegreeReport degree_precheck(const RealSpec& spec);

}  // namespace diophlab
