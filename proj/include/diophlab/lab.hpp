#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "diophlab/approximation.hpp"
#include "diophlab/constants.hpp"
#include "diophlab/subspace.hpp"

namespace diophlab {

/// A minimal-point sequence violates a structural property that always holds.
class DataCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// C = (C^-, C^+) in Z^2.
struct CPoint {
  mpz_class minus;
  mpz_class plus;
  bool is_zero() const { return minus == 0 && plus == 0; }
  mpz_class norm() const;
  friend bool operator==(const CPoint&, const CPoint&) = default;
};

mpz_class det3(const IntVector& a, const IntVector& b, const IntVector& c);
/// (det(x^-, x^+, y^-), det(x^-, x^+, y^+)); x, y in Z^4.
CPoint compute_C(const ApproxVector& x, const ApproxVector& y);
/// |C^- xi - C^+| as an enclosure.
Enclosure l_of_C(const CPoint& c, const PowerTable& table);
/// det(w,x,y) z - det(w,x,z) y + det(w,y,z) x - det(x,y,z) w
IntVector det_identity_residual(const IntVector& w, const IntVector& x, const IntVector& y,
                                const IntVector& z);

struct PointyReport {
  ApproxVector y;  // C^+ x^- - C^- x^+
  double norm_y = 0;
  double norm_x = 0;
  double norm_C = 0;
  double L_x = 0;
  double L_C = 0;
  double L_y = 0;
  double c2_needed = 0;  // smallest c2 making both bounds hold
  bool degenerate_branch = false;  // y = 0 with C, x nonzero and primitive
  bool norm_identity = false;      // ||x|| = ||C||^n, exact
  double l_ratio = 0;              // L(x) / (||C||^(n-1) L(C)) in the degenerate branch
};

PointyReport verify_pointy(const CPoint& C, const ApproxVector& x, const RealSpec& spec,
                           const PrecisionContext& ctx);

struct ExactCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RatioRow {
  std::vector<std::size_t> indices;
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
};

struct RatioReport {
  std::string lemma;      // report id
  std::string part;       // inequality within the statement
  std::string statement;  // the inequality in plain text, LHS << RHS
  std::vector<RatioRow> rows;
  bool two_sided = false;
  double max_ratio = 0;
  double min_ratio = 0;
  std::size_t applicable_count = 0;
  std::size_t trimmed_count = 0;  // rows excluded at the ends of the run
  std::string verdict;
  std::optional<double> half_run_max_ratio;
  bool drift_flag = false;
};

struct GateReport {
  bool applicable = false;
  std::string reason;
  double max_tail_estimate = 0;  // over rows with X_{i+1} > threshold
  double last_estimate = 0;
  double tail_inf = 0;
  std::size_t tail_count = 0;
  std::map<std::string, std::size_t> above_ceiling;  // ceiling name -> count of estimates above it
  bool within_slack = true;                          // all tail estimates <= lambda3 + slack
  std::size_t c_norm_checked = 0;
  bool c_norm_floor_holds = true;
  std::vector<RatioRow> c_norm_rows;  // ||C_{i,i+1}|| vs X_{i+1}^(1 - 2 lambda_hat)
  std::string verdict;
};

struct LabOptions {
  std::optional<std::string> lambda;  // decimal; defaults to lambda3
  std::size_t trim_front = 2;         // rows must only use indices in [trim_front+1, m-trim_back]
  std::size_t trim_back = 2;
  long c_sweep_bound = 2000;
  long subspace_box = 8;
  double drift_factor = 10;
};

struct LabRun {
  explicit LabRun(MinimalPointSequence s) : seq(std::move(s)) {}

  MinimalPointSequence seq;
  std::size_t m() const { return seq.records.size(); }
  const ApproxVector& x(std::size_t i) const { return seq.records.at(i - 1).x; }
  double X(std::size_t i) const { return seq.records.at(i - 1).X.get_d(); }
  double L(std::size_t i) const { return seq.records.at(i - 1).L.midpoint(); }

  std::map<std::size_t, RationalSubspace> W;  // i >= 2
  std::optional<std::size_t> i0;
  std::vector<std::size_t> dependent;  // indices with x^- and x^+ dependent
  std::map<std::size_t, RationalSubspace> V;
  std::vector<std::size_t> I;
  std::vector<std::size_t> J;
  std::map<std::size_t, RationalSubspace> plane_sums;  // W_i + W_{i+1}, i in I
  std::vector<ExactCheck> checks;

  std::optional<std::size_t> successor_in_I(std::size_t i) const;
  bool all_exact_checks_pass() const;
};

std::map<std::size_t, RationalSubspace> build_W(const MinimalPointSequence& seq,
                                                std::vector<ExactCheck>* checks = nullptr);
struct VBuild {
  std::optional<std::size_t> i0;
  std::vector<std::size_t> dependent;
  std::map<std::size_t, RationalSubspace> V;
};
VBuild build_V(const MinimalPointSequence& seq);
struct IndexSets {
  std::vector<std::size_t> I;
  std::vector<std::size_t> J;
  std::map<std::size_t, RationalSubspace> plane_sums;
};
IndexSets index_sets(const MinimalPointSequence& seq, const std::map<std::size_t, RationalSubspace>& W);

/// Builds every derived object and runs the exact sub-claims. Needs n = 3.
LabRun build_lab_run(const MinimalPointSequence& seq);
/// Recomputes the sequence from its spec and compares record by record.
ExactCheck replay_check(const MinimalPointSequence& seq, const PrecisionContext& ctx);
/// Random determinant identities, C(x, x) = 0 and bilinearity of C in its second argument.
std::vector<ExactCheck> identity_suite(std::uint64_t seed, std::size_t quadruples = 10000,
                                       std::size_t self_pairs = 1000);

/// Report ids in a fixed order.
const std::vector<std::string>& lemma_ids();
/// Accepts a report id or a numbered alias such as "lemma3.1" or "prop5.2".
std::string resolve_lemma_id(const std::string& name);
/// One report per inequality part. Throws std::invalid_argument for unknown ids.
std::vector<RatioReport> verify_lemma_ratios(const LabRun& run, const std::string& lemma_id,
                                             const LabOptions& options = {});
/// Recomputes the reports on the records with X <= X_max / 2 and fills the drift fields.
void attach_drift(std::vector<RatioReport>& reports, const LabRun& run,
                  const std::string& lemma_id, const LabOptions& options);

GateReport theorem_gate(const MinimalPointSequence& seq, const ConstantSet& constants,
                        const LabRun* run = nullptr, double slack = 0.05,
                        double threshold = 1000.0);

}  // namespace diophlab
