#include "diophlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

namespace diophlab {

namespace {

IntVector as_int(const ApproxVector& x) { return x.coords; }

mpz_class sup_of(const IntVector& v) {
  mpz_class m = 0;
  for (const auto& c : v) {
    mpz_class a = abs(c);
    if (a > m) m = a;
  }
  return m;
}

bool is_zero_vector(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const mpz_class& c) { return c == 0; });
}

// |value of form| as a double, escalating until the relative width is small.
double abs_value(const XiForm& form, PowerLadder& ladder) {
  Enclosure e;
  for (std::size_t level = 0;; ++level) {
    try {
      e = enclose(form, ladder.level(level));
    } catch (const EscalationFailure&) {
      return std::fabs(e.midpoint());
    }
    double mid = std::fabs(e.midpoint());
    double w = e.width().to_double();
    if (e.contains(Dyadic{}) && is_exactly_zero(ladder.spec(), form)) return 0.0;
    if (w <= 1e-9 * mid) return mid;
  }
}

double L_of_C(const CPoint& c, PowerLadder& ladder) {
  return abs_value(XiForm::monomial_offset(c.minus, 1, c.plus), ladder);
}

// Accumulates one named exact check over many indices.
class CheckTally {
 public:
  explicit CheckTally(std::string name) : name_(std::move(name)) {}
  void record(bool ok, const std::string& where) {
    ++count_;
    if (!ok) failures_.push_back(where);
  }
  ExactCheck result() const {
    ExactCheck c{name_, failures_.empty(), ""};
    std::ostringstream os;
    if (failures_.empty()) {
      os << count_ << " cases";
    } else {
      os << failures_.size() << " of " << count_ << " cases fail:";
      for (std::size_t k = 0; k < failures_.size() && k < 8; ++k) os << ' ' << failures_[k];
      if (failures_.size() > 8) os << " ...";
    }
    c.detail = os.str();
    return c;
  }

 private:
  std::string name_;
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
};

std::string idx(std::size_t i) { return "i=" + std::to_string(i); }
std::string idx(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

// x_j = a x_i + b x_{i+1} in integers, if possible.
std::optional<std::pair<mpz_class, mpz_class>> coordinates_in_pair(const IntVector& u,
                                                                   const IntVector& v,
                                                                   const IntVector& w) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      mpz_class d = u[k] * v[l] - u[l] * v[k];
      if (d == 0) continue;
      mpz_class an = w[k] * v[l] - w[l] * v[k];
      mpz_class bn = u[k] * w[l] - u[l] * w[k];
      if (an % d != 0 || bn % d != 0) return std::nullopt;
      mpz_class a = an / d, b = bn / d;
      for (std::size_t t = 0; t < n; ++t)
        if (a * u[t] + b * v[t] != w[t]) return std::nullopt;
      return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

}  // namespace

mpz_class CPoint::norm() const {
  mpz_class a = abs(minus), b = abs(plus);
  return a > b ? a : b;
}

mpz_class det3(const IntVector& a, const IntVector& b, const IntVector& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

CPoint compute_C(const ApproxVector& x, const ApproxVector& y) {
  if (x.size() != 4 || y.size() != 4) throw std::invalid_argument("compute_C: points of Z^4 expected");
  auto [xm, xp] = truncations(x);
  auto [ym, yp] = truncations(y);
  return {det3(xm.coords, xp.coords, ym.coords), det3(xm.coords, xp.coords, yp.coords)};
}

Enclosure l_of_C(const CPoint& c, const PowerTable& table) {
  return enclose(XiForm::monomial_offset(c.minus, 1, c.plus), table).abs();
}

IntVector det_identity_residual(const IntVector& w, const IntVector& x, const IntVector& y,
                                const IntVector& z) {
  if (w.size() != 3 || x.size() != 3 || y.size() != 3 || z.size() != 3)
    throw std::invalid_argument("det_identity_residual: points of Z^3 expected");
  mpz_class a = det3(w, x, y), b = det3(w, x, z), c = det3(w, y, z), d = det3(x, y, z);
  IntVector r(3);
  for (int k = 0; k < 3; ++k) r[k] = a * z[k] - b * y[k] + c * x[k] - d * w[k];
  return r;
}

PointyReport verify_pointy(const CPoint& C, const ApproxVector& x, const RealSpec& spec,
                           const PrecisionContext& ctx) {
  const int n = x.n();
  if (n < 1 || n > 3) throw std::invalid_argument("verify_pointy: n must be 1, 2 or 3");
  auto [xm, xp] = truncations(x);
  std::vector<mpz_class> y(xm.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = C.plus * xm[k] - C.minus * xp[k];

  PointyReport r;
  r.y = ApproxVector(y);
  r.norm_y = sup_of(y).get_d();
  r.norm_x = sup_norm(x).get_d();
  r.norm_C = C.norm().get_d();
  r.L_x = l_value(x, spec, ctx).midpoint();
  PowerLadder ladder(spec, std::max(n, 1), ctx);
  r.L_C = L_of_C(C, ladder);
  r.L_y = r.y.size() >= 2 && !r.y.is_zero() ? l_value(r.y, spec, ctx).midpoint() : 0.0;

  double denom = r.norm_C * r.L_x;
  if (denom > 0) {
    double need1 = (r.norm_y - r.norm_x * r.L_C) / denom;
    double need2 = r.L_y / denom;
    r.c2_needed = std::max({0.0, need1, need2});
  }

  mpz_class g;
  mpz_gcd(g.get_mpz_t(), C.minus.get_mpz_t(), C.plus.get_mpz_t());
  bool c_primitive = !C.is_zero() && g == 1;
  if (r.y.is_zero() && c_primitive && !x.is_zero() && x.is_primitive()) {
    r.degenerate_branch = true;
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), C.norm().get_mpz_t(), static_cast<unsigned long>(n));
    r.norm_identity = sup_norm(x) == p;
    double scale = std::pow(r.norm_C, n - 1) * r.L_C;
    r.l_ratio = scale > 0 ? r.L_x / scale : std::numeric_limits<double>::infinity();
  }
  return r;
}

std::map<std::size_t, RationalSubspace> build_W(const MinimalPointSequence& seq,
                                                std::vector<ExactCheck>* checks) {
  std::map<std::size_t, RationalSubspace> W;
  CheckTally basis("w-basis");
  for (std::size_t i = 2; i <= seq.records.size(); ++i) {
    IntMatrix gens{as_int(seq.records[i - 2].x), as_int(seq.records[i - 1].x)};
    RationalSubspace s = saturate(gens, 4);
    if (s.dim() != 2)
      throw DataCorruption("w-dimension: W_" + std::to_string(i) + " has dimension " +
                           std::to_string(s.dim()));
    basis.record(is_lattice_basis_of_span(gens, 4), idx(i));
    W.emplace(i, std::move(s));
  }
  if (checks) {
    checks->push_back({"w-dimension", true, std::to_string(W.size()) + " planes of dimension 2"});
    checks->push_back(basis.result());
  }
  return W;
}

VBuild build_V(const MinimalPointSequence& seq) {
  VBuild out;
  const std::size_t m = seq.records.size();
  for (std::size_t i = 1; i <= m; ++i) {
    auto [xm, xp] = truncations(seq.records[i - 1].x);
    if (rank({xm.coords, xp.coords}, xm.size()) < 2) out.dependent.push_back(i);
  }
  std::size_t start = out.dependent.empty() ? 1 : out.dependent.back() + 1;
  if (start <= m) out.i0 = start;
  if (out.i0) {
    for (std::size_t i = *out.i0; i <= m; ++i) {
      auto [xm, xp] = truncations(seq.records[i - 1].x);
      out.V.emplace(i, saturate({xm.coords, xp.coords}, static_cast<int>(xm.size())));
    }
  }
  return out;
}

IndexSets index_sets(const MinimalPointSequence& seq,
                     const std::map<std::size_t, RationalSubspace>& W) {
  IndexSets out;
  const std::size_t m = seq.records.size();
  for (std::size_t i = 2; i + 1 <= m; ++i) {
    if (!(W.at(i) == W.at(i + 1))) {
      out.I.push_back(i);
      out.plane_sums.emplace(i, sum(W.at(i), W.at(i + 1)));
    }
  }
  for (std::size_t k = 0; k + 1 < out.I.size(); ++k) {
    std::size_t i = out.I[k], j = out.I[k + 1];
    if (!(out.plane_sums.at(i) == out.plane_sums.at(j))) out.J.push_back(i);
  }
  return out;
}

std::optional<std::size_t> LabRun::successor_in_I(std::size_t i) const {
  auto it = std::upper_bound(I.begin(), I.end(), i);
  if (it == I.end()) return std::nullopt;
  return *it;
}

bool LabRun::all_exact_checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ExactCheck& c) { return c.passed; });
}

LabRun build_lab_run(const MinimalPointSequence& seq) {
  if (seq.n != 3) throw std::invalid_argument("lab runs need n = 3");
  LabRun run(seq);
  const std::size_t m = run.m();
  auto& checks = run.checks;

  CheckTally prim("records-primitive"), mono("records-monotone");
  PowerLadder ladder(seq.spec, 3, PrecisionContext::from_environment());
  for (std::size_t i = 1; i <= m; ++i) {
    prim.record(run.x(i).is_primitive(), idx(i));
    if (i >= 2) {
      const auto& a = seq.records[i - 2];
      const auto& b = seq.records[i - 1];
      int cmp = b.L.compare(a.L);
      if (cmp == 0) cmp = compare_l(b.witness, a.witness, ladder);
      mono.record(a.X < b.X && cmp < 0, idx(i));
    }
  }
  checks.push_back(prim.result());
  checks.push_back(mono.result());

  run.W = build_W(seq, &checks);
  VBuild vb = build_V(seq);
  run.i0 = vb.i0;
  run.dependent = vb.dependent;
  run.V = std::move(vb.V);
  IndexSets is = index_sets(seq, run.W);
  run.I = std::move(is.I);
  run.J = std::move(is.J);
  run.plane_sums = std::move(is.plane_sums);

  CheckTally inter("w-intersection"), ichar("i-characterization"), jsub("j-subset"),
      consec("consecutive-i-plane"), pairsum("pair-sum-intersection");
  for (std::size_t i = 2; i + 1 <= m; ++i) {
    bool in_I = std::binary_search(run.I.begin(), run.I.end(), i);
    bool rank3 = rank({as_int(run.x(i - 1)), as_int(run.x(i)), as_int(run.x(i + 1))}, 4) == 3;
    ichar.record(in_I == rank3, idx(i));
    if (in_I) {
      RationalSubspace cap = intersect(run.W.at(i), run.W.at(i + 1));
      inter.record(cap == saturate({as_int(run.x(i))}, 4) && cap.height_sup() == sup_norm(run.x(i)),
                   idx(i));
    }
  }
  for (std::size_t i : run.J) jsub.record(std::binary_search(run.I.begin(), run.I.end(), i), idx(i));
  for (std::size_t k = 0; k + 1 < run.I.size(); ++k) {
    std::size_t i = run.I[k], j = run.I[k + 1];
    consec.record(run.W.at(i + 1) == run.W.at(j), idx(i, j));
    if (std::binary_search(run.J.begin(), run.J.end(), i)) {
      const auto& si = run.plane_sums.at(i);
      const auto& sj = run.plane_sums.at(j);
      pairsum.record(sum(si, sj).dim() == 4 && intersect(si, sj) == run.W.at(i + 1), idx(i, j));
    }
  }
  checks.push_back(inter.result());
  checks.push_back(ichar.result());
  checks.push_back(jsub.result());
  checks.push_back(consec.result());
  checks.push_back(pairsum.result());

  CheckTally veq("v-equality"), cself("c-self-zero"), detid("det-identity"), cnorm("c-norm-floor");
  for (std::size_t i = 1; i <= m; ++i) cself.record(compute_C(run.x(i), run.x(i)).is_zero(), idx(i));
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) {
      CPoint cij = compute_C(run.x(i), run.x(j));
      CPoint cji = compute_C(run.x(j), run.x(i));
      if (run.i0 && i >= *run.i0) {
        bool same = run.V.at(i) == run.V.at(j);
        veq.record(same == cij.is_zero() && same == cji.is_zero(), idx(i, j));
      }
      auto [xim, xip] = truncations(run.x(i));
      auto [xjm, xjp] = truncations(run.x(j));
      bool ok = is_zero_vector(det_identity_residual(xim.coords, xip.coords, xjm.coords, xjp.coords));
      for (int k = 0; k < 3 && ok; ++k) {
        ok = cij.plus * xjm[k] - cij.minus * xjp[k] == cji.minus * xip[k] - cji.plus * xim[k];
      }
      detid.record(ok, idx(i, j));
    }
  }
  if (run.i0) {
    for (std::size_t i = *run.i0; i + 1 <= m; ++i) {
      if (run.V.at(i) == run.V.at(i + 1)) continue;
      cnorm.record(compute_C(run.x(i), run.x(i + 1)).norm() >= 1, idx(i));
    }
  }
  checks.push_back(veq.result());
  checks.push_back(cself.result());
  checks.push_back(detid.result());
  checks.push_back(cnorm.result());

  CheckTally prop("c-proportionality");
  for (std::size_t k = 0; k + 1 < run.I.size(); ++k) {
    std::size_t i = run.I[k], j = run.I[k + 1];
    auto ab = coordinates_in_pair(as_int(run.x(i)), as_int(run.x(i + 1)), as_int(run.x(j)));
    bool ok = ab.has_value() && ab->second != 0;
    if (ok) {
      CPoint cij = compute_C(run.x(i), run.x(j));
      CPoint c1 = compute_C(run.x(i), run.x(i + 1));
      const mpz_class& b = ab->second;
      ok = cij.minus == b * c1.minus && cij.plus == b * c1.plus &&
           cij.minus * c1.plus - cij.plus * c1.minus == 0;
    }
    prop.record(ok, idx(i, j));
  }
  checks.push_back(prop.result());

  CheckTally vrep("v-repeat-complement");
  if (run.i0) {
    for (std::size_t i = *run.i0 + 1; i + 1 <= m; ++i) {
      if (run.V.at(i - 1) == run.V.at(i) || !(run.V.at(i) == run.V.at(i + 1))) continue;
      IntMatrix normal = orthogonal_complement(run.V.at(i)).basis();
      const IntVector& pqr = normal.at(0);
      IntMatrix gens{{pqr[0], pqr[1], pqr[2], 0}, {0, pqr[0], pqr[1], pqr[2]}};
      vrep.record(orthogonal_complement(run.W.at(i + 1)) == saturate(gens, 4), idx(i));
    }
  }
  checks.push_back(vrep.result());

  CheckTally chain("chain-intersection");
  for (std::size_t k = 0; k + 1 < run.I.size(); ++k) {
    std::size_t i = run.I[k], j = run.I[k + 1];
    if (!std::binary_search(run.J.begin(), run.J.end(), i)) continue;
    for (std::size_t t = 0; t < k; ++t) {
      std::size_t g = run.I[t];
      if (!(run.plane_sums.at(g) == run.plane_sums.at(i))) continue;
      chain.record(intersect(run.plane_sums.at(g), run.plane_sums.at(j)) == run.W.at(j), idx(g, j));
    }
  }
  checks.push_back(chain.result());
  return run;
}

ExactCheck replay_check(const MinimalPointSequence& seq, const PrecisionContext& ctx) {
  MinimalPointSequence fresh = minimal_points(seq.spec, seq.n, seq.X_max, ctx);
  ExactCheck c{"records-replay", true, ""};
  std::size_t common = std::min(fresh.records.size(), seq.records.size());
  for (std::size_t k = 0; k < common; ++k) {
    if (!(fresh.records[k].x == seq.records[k].x)) {
      c.passed = false;
      c.detail = "record " + std::to_string(k + 1) + " differs from a fresh sweep: stored " +
                 seq.records[k].x.to_string() + ", computed " + fresh.records[k].x.to_string();
      return c;
    }
  }
  if (fresh.records.size() != seq.records.size()) {
    c.passed = false;
    c.detail = "record count " + std::to_string(seq.records.size()) + " differs from a fresh sweep (" +
               std::to_string(fresh.records.size()) + ")";
    return c;
  }
  c.detail = std::to_string(common) + " records reproduced";
  return c;
}

std::vector<ExactCheck> identity_suite(std::uint64_t seed, std::size_t quadruples,
                                       std::size_t self_pairs) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coord(-100, 100);
  auto vec = [&](std::size_t n) {
    IntVector v(n);
    for (auto& c : v) c = coord(rng);
    return v;
  };
  CheckTally det("det-identity-random"), self("c-self-zero-random"), bil("c-bilinearity");
  for (std::size_t k = 0; k < quadruples; ++k) {
    det.record(is_zero_vector(det_identity_residual(vec(3), vec(3), vec(3), vec(3))),
               "#" + std::to_string(k));
  }
  for (std::size_t k = 0; k < self_pairs; ++k) {
    ApproxVector x(vec(4)), y(vec(4)), z(vec(4));
    self.record(compute_C(x, x).is_zero(), "#" + std::to_string(k));
    long a = coord(rng), b = coord(rng);
    std::vector<mpz_class> comb(4);
    for (int t = 0; t < 4; ++t) comb[t] = a * y[t] + b * z[t];
    CPoint lhs = compute_C(x, ApproxVector(comb));
    CPoint cy = compute_C(x, y), cz = compute_C(x, z);
    bil.record(lhs.minus == a * cy.minus + b * cz.minus && lhs.plus == a * cy.plus + b * cz.plus,
               "#" + std::to_string(k));
  }
  return {det.result(), self.result(), bil.result()};
}

// ---------------------------------------------------------------------------
// Ratio reports

namespace {

struct Exponents {
  double lambda, theta, alpha;
};

Exponents exponents_for(const LabOptions& options) {
  ConstantSet cs = constants(options.lambda ? *options.lambda : lambda3_decimal());
  return {cs.lambda.mid_d(), cs.theta.mid_d(), cs.alpha.mid_d()};
}

class ReportBuilder {
 public:
  ReportBuilder(const LabRun& run, const LabOptions& opt, std::string id)
      : run_(run), opt_(opt), id_(std::move(id)) {}

  RatioReport& part(const std::string& name, const std::string& statement, bool two_sided = false) {
    RatioReport r;
    r.lemma = id_;
    r.part = name;
    r.statement = statement;
    r.two_sided = two_sided;
    reports_.push_back(r);
    return reports_.back();
  }

  // Adds a row, dropping it when an index falls in the trimmed ends.
  void row(RatioReport& r, std::vector<std::size_t> indices, double lhs, double rhs,
           bool trim = true) {
    if (trim) {
      std::size_t lo = opt_.trim_front + 1;
      std::size_t hi = run_.m() > opt_.trim_back ? run_.m() - opt_.trim_back : 0;
      for (std::size_t i : indices) {
        if (i < lo || i > hi) {
          ++r.trimmed_count;
          return;
        }
      }
    }
    r.rows.push_back({std::move(indices), lhs, rhs, lhs / rhs});
  }

  std::vector<RatioReport> finish() {
    for (auto& r : reports_) {
      r.applicable_count = r.rows.size();
      if (r.rows.empty()) {
        r.verdict = "no applicable index";
        continue;
      }
      r.max_ratio = r.rows.front().ratio;
      r.min_ratio = r.rows.front().ratio;
      for (const auto& row : r.rows) {
        r.max_ratio = std::max(r.max_ratio, row.ratio);
        r.min_ratio = std::min(r.min_ratio, row.ratio);
      }
      std::ostringstream os;
      os.precision(4);
      if (r.two_sided) {
        os << "ratio window [" << r.min_ratio << ", " << r.max_ratio << "] over "
           << r.applicable_count << " rows, spread " << (r.min_ratio > 0 ? r.max_ratio / r.min_ratio : INFINITY);
      } else {
        os << "fitted constant " << r.max_ratio << " over " << r.applicable_count << " rows";
      }
      if (!std::isfinite(r.max_ratio)) os << "; non-finite ratio";
      r.verdict = os.str();
    }
    return {std::make_move_iterator(reports_.begin()), std::make_move_iterator(reports_.end())};
  }

 private:
  const LabRun& run_;
  const LabOptions& opt_;
  std::string id_;
  std::deque<RatioReport> reports_;  // stable references across part()
};

bool in(const std::vector<std::size_t>& v, std::size_t i) {
  return std::binary_search(v.begin(), v.end(), i);
}

double H(const RationalSubspace& s) { return s.height(HeightNorm::sup); }

// Consecutive pairs i < j of I.
std::vector<std::pair<std::size_t, std::size_t>> consecutive_pairs(const LabRun& run) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k + 1 < run.I.size(); ++k) out.emplace_back(run.I[k], run.I[k + 1]);
  return out;
}

}  // namespace

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids = {
      "c-lower-bound",   "subspace-l-floor", "plane-height",      "consecutive-plane-sum",
      "plane-pair",      "c-point-size",     "c-proportionality", "v-change-growth",
      "v-repeat",        "pair-height-chain", "j-triple",         "c-pair-determinant",
      "final-chain"};
  return ids;
}

std::string resolve_lemma_id(const std::string& name) {
  // Alternate names accepted on the command line.
  static const std::map<std::string, std::string> aliases = {
      {"lemma2.2", "c-lower-bound"},      {"lemma2.4", "subspace-l-floor"},
      {"lemma3.1", "plane-height"},       {"lemma3.2", "consecutive-plane-sum"},
      {"lemma3.3", "plane-pair"},         {"lemma4.1", "c-point-size"},
      {"lemma4.2", "c-proportionality"},  {"lemma5.1", "v-change-growth"},
      {"prop5.2", "v-repeat"},            {"cor5.3", "pair-height-chain"},
      {"lemma6.1", "j-triple"},           {"prop6.2", "c-pair-determinant"},
      {"theorem", "final-chain"}};
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  if (std::find(lemma_ids().begin(), lemma_ids().end(), key) != lemma_ids().end()) return key;
  auto it = aliases.find(key);
  if (it == aliases.end()) throw std::invalid_argument("unknown lemma id: " + name);
  return it->second;
}

std::vector<RatioReport> verify_lemma_ratios(const LabRun& run, const std::string& lemma_id,
                                             const LabOptions& options) {
  const std::string id = resolve_lemma_id(lemma_id);
  const Exponents ex = exponents_for(options);
  const double lam = ex.lambda, th = ex.theta;
  const std::size_t m = run.m();
  ReportBuilder b(run, options, id);
  PowerLadder ladder(run.seq.spec, 1, PrecisionContext::from_environment());

  if (id == "c-lower-bound") {
    auto& r = b.part("main", "||C||^(-1/lambda) << L(C), C = (a, round(a xi)) primitive");
    for (long a = 1; a <= options.c_sweep_bound; ++a) {
      CPoint c{a, nearest_integer_multiple(mpz_class(a), 1, ladder)};
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), c.minus.get_mpz_t(), c.plus.get_mpz_t());
      if (g != 1) continue;
      double lc = L_of_C(c, ladder);
      b.row(r, {static_cast<std::size_t>(a)}, std::pow(c.norm().get_d(), -1.0 / lam), lc, false);
    }
  } else if (id == "subspace-l-floor") {
    auto& r = b.part("main", "1 << min L(x) over nonzero integer x in W_i + W_(i+1) (box and records)");
    PowerTable table(run.seq.spec, 3, 128);
    const long B = options.subspace_box;
    for (std::size_t i : run.I) {
      const RationalSubspace& U = run.plane_sums.at(i);
      IntVector nu = orthogonal_complement(U).basis().at(0);
      int k = 3;
      while (nu[k] == 0) --k;
      double best = std::numeric_limits<double>::infinity();
      std::vector<long> free(3);
      for (free[0] = -B; free[0] <= B; ++free[0])
        for (free[1] = -B; free[1] <= B; ++free[1])
          for (free[2] = -B; free[2] <= B; ++free[2]) {
            std::vector<mpz_class> x(4);
            mpz_class acc = 0;
            for (int t = 0, f = 0; t < 4; ++t) {
              if (t == k) continue;
              x[t] = free[f++];
              acc += nu[t] * x[t];
            }
            if (acc % nu[k] != 0) continue;
            x[k] = -acc / nu[k];
            if (abs(x[k]) > B) continue;
            ApproxVector v(x);
            if (v.is_zero()) continue;
            best = std::min(best, l_enclosure(v, table).midpoint());
          }
      for (std::size_t t = 1; t <= m; ++t)
        if (U.contains(as_int(run.x(t)))) best = std::min(best, run.L(t));
      b.row(r, {i}, 1.0, best);
    }
  } else if (id == "plane-height") {
    auto& a = b.part("asymp", "H(W_i) ~ X_i L_(i-1)", true);
    auto& c = b.part("upper", "H(W_i) << X_i^(1-lambda)");
    for (std::size_t i = 2; i <= m; ++i) {
      double h = H(run.W.at(i));
      b.row(a, {i - 1, i}, h, run.X(i) * run.L(i - 1));
      b.row(c, {i}, h, std::pow(run.X(i), 1 - lam));
    }
  } else if (id == "consecutive-plane-sum") {
    auto& a = b.part("first", "H(W_i + W_(i+1)) << X_i^-1 H(W_i) H(W_(i+1)), i in I");
    auto& c = b.part("second", "X_i^-1 H(W_i) H(W_(i+1)) << H(W_i)^(-1/theta) H(W_(i+1)), i in I");
    for (std::size_t i : run.I) {
      double hi = H(run.W.at(i)), hn = H(run.W.at(i + 1));
      double mid = hi * hn / run.X(i);
      b.row(a, {i, i + 1}, H(run.plane_sums.at(i)), mid);
      b.row(c, {i, i + 1}, mid, std::pow(hi, -1 / th) * hn);
    }
  } else if (id == "plane-pair") {
    auto& a = b.part("general", "X_i X_j << H(W_i) H(W_j) H(W_(j+1))");
    auto& c = b.part("heights", "H(W_i) H(W_j) << H(W_(j+1))^theta");
    auto& d = b.part("norms", "X_i X_j << X_(j+1)^theta");
    for (auto [i, j] : consecutive_pairs(run)) {
      if (!in(run.J, i)) continue;
      double hi = H(run.W.at(i)), hj = H(run.W.at(j)), hj1 = H(run.W.at(j + 1));
      b.row(a, {i, j, j + 1}, run.X(i) * run.X(j), hi * hj * hj1);
      b.row(c, {i, j, j + 1}, hi * hj, std::pow(hj1, th));
      b.row(d, {i, j, j + 1}, run.X(i) * run.X(j), std::pow(run.X(j + 1), th));
    }
  } else if (id == "c-point-size") {
    auto& a = b.part("norm", "||C_(i,j)|| << X_j L_i^2 + X_i L_i L_j");
    auto& c = b.part("L", "L(C_(i,j)) << X_i L_i L_j");
    for (std::size_t i = 1; i <= m; ++i)
      for (std::size_t j = i + 1; j <= m; ++j) {
        CPoint cij = compute_C(run.x(i), run.x(j));
        if (cij.is_zero()) continue;
        double li = run.L(i), lj = run.L(j);
        b.row(a, {i, j}, cij.norm().get_d(), run.X(j) * li * li + run.X(i) * li * lj);
        b.row(c, {i, j}, L_of_C(cij, ladder), run.X(i) * li * lj);
      }
  } else if (id == "c-proportionality") {
    auto& a = b.part("multiplier", "|b| ~ X_j / X_(i+1), C_(i,j) = b C_(i,i+1)", true);
    auto& c = b.part("L", "L(C_(i,i+1)) << X_i X_j^-lambda X_(j+1)^-lambda");
    for (auto [i, j] : consecutive_pairs(run)) {
      auto ab = coordinates_in_pair(as_int(run.x(i)), as_int(run.x(i + 1)), as_int(run.x(j)));
      if (ab && ab->second != 0)
        b.row(a, {i, i + 1, j}, std::fabs(ab->second.get_d()), run.X(j) / run.X(i + 1));
      CPoint c1 = compute_C(run.x(i), run.x(i + 1));
      if (c1.is_zero()) continue;
      b.row(c, {i, j, j + 1}, L_of_C(c1, ladder),
            run.X(i) * std::pow(run.X(j), -lam) * std::pow(run.X(j + 1), -lam));
    }
  } else if (id == "v-change-growth") {
    auto& a = b.part("first", "H(W_(i+1)) << X_(i+1)^(1-lambda), V_(i-1) != V_i");
    auto& c = b.part("second", "X_(i+1)^(1-lambda) << H(W_i)^theta, V_(i-1) != V_i");
    auto& d = b.part("third", "H(W_i)^theta << X_i^(theta(1-lambda)), V_(i-1) != V_i");
    if (run.i0) {
      for (std::size_t i = *run.i0 + 1; i + 1 <= m; ++i) {
        if (run.V.at(i - 1) == run.V.at(i)) continue;
        double hw = H(run.W.at(i)), hw1 = H(run.W.at(i + 1));
        double x1 = std::pow(run.X(i + 1), 1 - lam);
        b.row(a, {i, i + 1}, hw1, x1);
        b.row(c, {i, i + 1}, x1, std::pow(hw, th));
        b.row(d, {i - 1, i}, std::pow(hw, th), std::pow(run.X(i), th * (1 - lam)));
      }
    }
  } else if (id == "v-repeat") {
    auto& a = b.part("main", "H(W_(i+1)) ~ H(V_i)^2, V_(i-1) != V_i = V_(i+1)", true);
    if (run.i0) {
      for (std::size_t i = *run.i0 + 1; i + 1 <= m; ++i) {
        if (run.V.at(i - 1) == run.V.at(i) || !(run.V.at(i) == run.V.at(i + 1))) continue;
        double hv = H(run.V.at(i));
        b.row(a, {i - 1, i, i + 1}, H(run.W.at(i + 1)), hv * hv);
      }
    }
  } else if (id == "pair-height-chain") {
    const double t2 = th * th - 1;
    auto& a1 = b.part("ij-first", "H(W_i) << X_i^(1-lambda)");
    auto& a2 = b.part("ij-second", "X_i^(1-lambda) << H(W_j)^(theta^2-1)");
    auto& a3 = b.part("ij-third", "H(W_j)^(theta^2-1) << X_j^((theta^2-1)(1-lambda))");
    auto& c1 = b.part("jj1-first", "H(W_j) << X_j^(1-lambda)");
    auto& c2 = b.part("jj1-second", "X_j^(1-lambda) << H(W_(j+1))^(theta(1-lambda))");
    auto& c3 = b.part("jj1-third", "H(W_(j+1))^(theta(1-lambda)) << X_(j+1)^(theta(1-lambda)^2)");
    for (auto [i, j] : consecutive_pairs(run)) {
      if (!in(run.J, i)) continue;
      double hi = H(run.W.at(i)), hj = H(run.W.at(j)), hj1 = H(run.W.at(j + 1));
      std::vector<std::size_t> ix{i, j, j + 1};
      b.row(a1, ix, hi, std::pow(run.X(i), 1 - lam));
      b.row(a2, ix, std::pow(run.X(i), 1 - lam), std::pow(hj, t2));
      b.row(a3, ix, std::pow(hj, t2), std::pow(run.X(j), t2 * (1 - lam)));
      b.row(c1, ix, hj, std::pow(run.X(j), 1 - lam));
      b.row(c2, ix, std::pow(run.X(j), 1 - lam), std::pow(hj1, th * (1 - lam)));
      b.row(c3, ix, std::pow(hj1, th * (1 - lam)), std::pow(run.X(j + 1), th * (1 - lam) * (1 - lam)));
    }
  } else if (id == "j-triple") {
    auto& a = b.part("main", "L(C_(i,i+1)) << X_(j+1)^alpha, h < i < j consecutive in I, h, i in J");
    for (std::size_t k = 0; k + 2 < run.I.size(); ++k) {
      std::size_t h = run.I[k], i = run.I[k + 1], j = run.I[k + 2];
      if (!in(run.J, h) || !in(run.J, i)) continue;
      CPoint c1 = compute_C(run.x(i), run.x(i + 1));
      if (c1.is_zero()) continue;
      b.row(a, {h, i, i + 1, j, j + 1}, L_of_C(c1, ladder), std::pow(run.X(j + 1), ex.alpha));
    }
  } else if (id == "c-pair-determinant") {
    const double e = 1 - 2 * lam + ex.alpha;
    auto& a = b.part("middle",
                     "|det(C_(i,i+1), C_(j,j+1))| << ||C_(i,i+1)|| L(C_(j,j+1)) + ||C_(j,j+1)|| L(C_(i,i+1))");
    auto& c = b.part("final", "|det(C_(i,i+1), C_(j,j+1))| << X_(k+1)^(1-2lambda+alpha) + X_(j+1)^(1-2lambda+alpha)");
    for (std::size_t t = 0; t + 3 < run.I.size(); ++t) {
      std::size_t h = run.I[t], i = run.I[t + 1], j = run.I[t + 2], k = run.I[t + 3];
      if (!in(run.J, h) || !in(run.J, i) || !in(run.J, j)) continue;
      CPoint ci = compute_C(run.x(i), run.x(i + 1)), cj = compute_C(run.x(j), run.x(j + 1));
      double det = std::fabs(mpz_class(ci.minus * cj.plus - ci.plus * cj.minus).get_d());
      std::vector<std::size_t> ix{h, i, j, j + 1, k, k + 1};
      b.row(a, ix, det, ci.norm().get_d() * L_of_C(cj, ladder) + cj.norm().get_d() * L_of_C(ci, ladder));
      b.row(c, ix, det, std::pow(run.X(k + 1), e) + std::pow(run.X(j + 1), e));
    }
  } else if (id == "final-chain") {
    const double t2 = th * th;
    auto& p2 = b.part("intersection-height", "H(W_j) << H(W_g + W_(g+1)) H(W_j + W_(j+1))");
    auto& p3a = b.part("g-sum", "H(W_g + W_(g+1)) << H(W_(g+1))^(1-1/theta^2)");
    auto& p3b = b.part("j-sum", "H(W_j + W_(j+1)) << H(W_j)^(theta-1/theta)");
    auto& p4 = b.part("g-plane", "H(W_(g+1)) << X_i^(1-lambda)");
    auto& p5 = b.part("i-norm", "X_i^(1-lambda) << H(W_j)^(theta^2-1)");
    auto& p6 = b.part("closing", "H(W_j) << H(W_j)^((1-1/theta^2)(theta^2-1)+(theta-1/theta))");
    const double close = (1 - 1 / t2) * (t2 - 1) + (th - 1 / th);
    for (auto [i, j] : consecutive_pairs(run)) {
      if (!in(run.J, i)) continue;
      for (std::size_t g : run.I) {
        if (g >= i) break;
        if (!(run.plane_sums.at(g) == run.plane_sums.at(i))) continue;
        std::vector<std::size_t> ix{g, g + 1, i, j, j + 1};
        double hj = H(run.W.at(j)), hg1 = H(run.W.at(g + 1));
        double sg = H(run.plane_sums.at(g)), sj = H(run.plane_sums.at(j));
        b.row(p2, ix, hj, sg * sj);
        b.row(p3a, ix, sg, std::pow(hg1, 1 - 1 / t2));
        b.row(p3b, ix, sj, std::pow(hj, th - 1 / th));
        b.row(p4, ix, hg1, std::pow(run.X(i), 1 - lam));
        b.row(p5, ix, std::pow(run.X(i), 1 - lam), std::pow(hj, t2 - 1));
        b.row(p6, ix, hj, std::pow(hj, close));
      }
    }
  }
  return b.finish();
}

void attach_drift(std::vector<RatioReport>& reports, const LabRun& run, const std::string& lemma_id,
                  const LabOptions& options) {
  LabOptions half_opt = options;
  std::vector<RatioReport> half;
  if (resolve_lemma_id(lemma_id) == "c-lower-bound") {
    half_opt.c_sweep_bound = std::max(1L, options.c_sweep_bound / 2);
    half = verify_lemma_ratios(run, lemma_id, half_opt);
  } else {
    MinimalPointSequence hs = run.seq.truncated(mpz_class(run.seq.X_max / 2));
    if (hs.records.size() < 4) return;
    LabRun hr = build_lab_run(hs);
    half = verify_lemma_ratios(hr, lemma_id, half_opt);
  }
  for (auto& r : reports) {
    for (const auto& h : half) {
      if (h.part != r.part || h.applicable_count == 0) continue;
      r.half_run_max_ratio = h.max_ratio;
      r.drift_flag = r.applicable_count > 0 && h.max_ratio > 0 &&
                     r.max_ratio > options.drift_factor * h.max_ratio;
    }
  }
}

GateReport theorem_gate(const MinimalPointSequence& seq, const ConstantSet& constants,
                        const LabRun* run, double slack, double threshold) {
  GateReport g;
  DegreeReport deg = degree_precheck(seq.spec);
  if (!deg.checks_passed()) {
    g.reason = "hypothesis [Q(xi):Q] > 3 violated, gate not applicable";
    g.verdict = g.reason;
    return g;
  }
  if (seq.n != 3) {
    g.reason = "the gate concerns n = 3, gate not applicable";
    g.verdict = g.reason;
    return g;
  }
  if (seq.records.size() < 2) {
    g.reason = "fewer than two records, gate not applicable";
    g.verdict = g.reason;
    return g;
  }
  g.applicable = true;
  std::optional<LabRun> own;
  if (!run) {
    own.emplace(build_lab_run(seq));
    run = &*own;
  }

  const double l3 = constants.lambda3.mid_d();
  const std::vector<std::pair<std::string, double>> ceilings = {
      {"1/2", 0.5},
      {"sqrt2-1", constants.sqrt2_minus_1.mid_d()},
      {"lambda2", constants.lambda2.mid_d()},
      {"lambda3", l3}};
  for (const auto& c : ceilings) g.above_ceiling[c.first] = 0;

  ExponentSummary ex = exponent_estimates(seq);
  g.last_estimate = ex.last;
  g.tail_inf = ex.rows.back().tail_inf;
  std::map<std::size_t, double> hat;
  for (const auto& e : ex.rows) {
    hat[e.i] = e.uniform_hat;
    if (run->X(e.i + 1) <= threshold) continue;
    ++g.tail_count;
    g.max_tail_estimate = g.tail_count == 1 ? e.uniform_hat : std::max(g.max_tail_estimate, e.uniform_hat);
    for (const auto& c : ceilings)
      if (e.uniform_hat > c.second) ++g.above_ceiling[c.first];
    if (e.uniform_hat > l3 + slack) g.within_slack = false;
  }

  if (run->i0) {
    for (std::size_t i = *run->i0; i + 1 <= run->m(); ++i) {
      if (run->V.at(i) == run->V.at(i + 1)) continue;
      mpz_class norm = compute_C(run->x(i), run->x(i + 1)).norm();
      ++g.c_norm_checked;
      if (norm < 1) g.c_norm_floor_holds = false;
      double rhs = std::pow(run->X(i + 1), 1 - 2 * hat.at(i));
      g.c_norm_rows.push_back({{i, i + 1}, norm.get_d(), rhs, norm.get_d() / rhs});
    }
  }

  std::ostringstream os;
  os.precision(4);
  if (g.tail_count == 0) {
    os << "no estimate with X_(i+1) > " << threshold << "; ";
  } else {
    os << g.tail_count << " tail estimates, max " << g.max_tail_estimate << " against lambda3 = " << l3
       << (g.within_slack ? " (within" : " (exceeds") << " slack " << slack << "); ";
  }
  os << "||C_(i,i+1)|| >= 1 " << (g.c_norm_floor_holds ? "holds" : "FAILS") << " at " << g.c_norm_checked
     << " indices; ";
  if (g.within_slack && g.c_norm_floor_holds)
    os << "no desk-scale observation contradicts lambda <= lambda3";
  else
    os << "observation in tension with lambda <= lambda3 at this scale";
  g.verdict = os.str();
  return g;
}

}  // namespace diophlab
