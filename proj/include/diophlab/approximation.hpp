#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "diophlab/real_context.hpp"

namespace diophlab {

/// Integer point (x_0, ..., x_n).
struct ApproxVector {
  std::vector<mpz_class> coords;

  ApproxVector() = default;
  explicit ApproxVector(std::vector<mpz_class> c) : coords(std::move(c)) {}
  ApproxVector(std::initializer_list<long> c);

  int n() const { return static_cast<int>(coords.size()) - 1; }
  std::size_t size() const { return coords.size(); }
  const mpz_class& operator[](std::size_t i) const { return coords[i]; }
  bool is_zero() const;
  bool is_primitive() const;
  std::string to_string() const;

  friend bool operator==(const ApproxVector&, const ApproxVector&) = default;
  /// Lexicographic order on coordinates.
  friend bool operator<(const ApproxVector& a, const ApproxVector& b);
};

mpz_class sup_norm(const ApproxVector& x);
mpz_class content(const ApproxVector& x);
/// (x_0..x_{n-1}, x_1..x_n)
std::pair<ApproxVector, ApproxVector> truncations(const ApproxVector& x);
/// Divides by the gcd; the first nonzero coordinate becomes positive.
ApproxVector make_primitive(const ApproxVector& x);
/// Flips the sign so the first nonzero coordinate is positive.
ApproxVector sign_normalized(const ApproxVector& x);

/// L(x) = |x0 xi^k - x_k| for the coordinate k realizing the maximum.
struct LWitness {
  mpz_class x0;
  int k = 1;
  mpz_class xk;
  XiForm form() const { return XiForm::monomial_offset(x0, k, xk); }
};

/// Enclosure of L(x) from one power table; exact when x_0 = 0.
Enclosure l_enclosure(const ApproxVector& x, const PowerTable& table);
Enclosure l_value(const ApproxVector& x, const RealSpec& spec, const PrecisionContext& ctx);
LWitness l_witness(const ApproxVector& x, PowerLadder& ladder);
/// Exact comparison of L(a) and L(b): -1, 0 or +1.
int compare_l(const ApproxVector& a, const ApproxVector& b, PowerLadder& ladder);
int compare_l(const LWitness& a, const LWitness& b, PowerLadder& ladder);

/// (x0, round(x0 xi), ..., round(x0 xi^n)).
ApproxVector best_candidate(const mpz_class& x0, const RealSpec& spec, int n,
                            const PrecisionContext& ctx);
ApproxVector best_candidate(const mpz_class& x0, PowerLadder& ladder);

struct MinimalPointRecord {
  std::size_t index = 0;  // 1-based
  ApproxVector x;
  mpz_class X;
  Enclosure L;
  LWitness witness;
};

struct MinimalPointSequence {
  MinimalPointSequence(RealSpec s, int n_, mpz_class xmax)
      : spec(std::move(s)), n(n_), X_max(std::move(xmax)) {}

  RealSpec spec;
  int n;
  mpz_class X_max;
  std::vector<MinimalPointRecord> records;
  std::string tie_rule;
  long precision_bits = 0;  // finest table used for the stored L enclosures

  /// The first `count` records, as a sequence with the same settings.
  MinimalPointSequence prefix(std::size_t count) const;
  /// Records with X_i <= bound.
  MinimalPointSequence truncated(const mpz_class& bound) const;
};

extern const char* const kTieRule;

MinimalPointSequence minimal_points(const RealSpec& spec, int n, const mpz_class& X_max,
                                    const PrecisionContext& ctx);

/// Largest bound accepted by the brute-force oracle for this n.
long brute_force_limit(int n);
MinimalPointSequence brute_force_minimal_points(const RealSpec& spec, int n, long X_bound,
                                                const PrecisionContext& ctx);

struct ExponentEstimate {
  std::size_t i = 0;
  double uniform_hat = 0;
  std::optional<double> ordinary_hat;  // absent when X_i = 1
  double tail_inf = 0;                 // min of uniform_hat_j over j >= i
};

struct ExponentSummary {
  std::vector<ExponentEstimate> rows;
  double min = 0;
  double max = 0;
  double last = 0;
};

/// Needs at least two records.
ExponentSummary exponent_estimates(const MinimalPointSequence& seq);

}  // namespace diophlab
