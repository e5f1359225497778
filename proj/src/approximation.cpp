#include "diophlab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diophlab {

const char* const kTieRule =
    "equal L: the smaller norm wins; equal norm and L: the lexicographically smallest "
    "sign-normalized vector wins";

ApproxVector::ApproxVector(std::initializer_list<long> c) {
  for (long v : c) coords.emplace_back(v);
}

bool ApproxVector::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const mpz_class& c) { return c == 0; });
}

bool ApproxVector::is_primitive() const { return !is_zero() && content(*this) == 1; }

std::string ApproxVector::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i > 0) out += ",";
    out += coords[i].get_str();
  }
  return out + ")";
}

bool operator<(const ApproxVector& a, const ApproxVector& b) {
  return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(),
                                      b.coords.end());
}

mpz_class sup_norm(const ApproxVector& x) {
  mpz_class m = 0;
  for (const auto& c : x.coords) {
    if (abs(c) > m) m = abs(c);
  }
  return m;
}

mpz_class content(const ApproxVector& x) {
  mpz_class g = 0;
  for (const auto& c : x.coords) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

std::pair<ApproxVector, ApproxVector> truncations(const ApproxVector& x) {
  if (x.size() < 2) throw std::invalid_argument("truncations: need n >= 1");
  ApproxVector minus(std::vector<mpz_class>(x.coords.begin(), x.coords.end() - 1));
  ApproxVector plus(std::vector<mpz_class>(x.coords.begin() + 1, x.coords.end()));
  return {minus, plus};
}

ApproxVector sign_normalized(const ApproxVector& x) {
  for (const auto& c : x.coords) {
    if (c == 0) continue;
    if (c > 0) return x;
    ApproxVector out = x;
    for (auto& v : out.coords) v = -v;
    return out;
  }
  return x;
}

ApproxVector make_primitive(const ApproxVector& x) {
  if (x.is_zero()) throw std::invalid_argument("make_primitive: zero vector");
  mpz_class g = content(x);
  ApproxVector out = x;
  for (auto& c : out.coords) c /= g;
  return sign_normalized(out);
}

Enclosure l_enclosure(const ApproxVector& x, const PowerTable& table) {
  if (x.n() < 1 || x.n() > table.n()) throw std::invalid_argument("l_enclosure: bad dimension");
  if (x[0] == 0) {
    mpz_class m = 0;
    for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, mpz_class(abs(x[i])));
    return Enclosure::point(Dyadic::from_integer(m));
  }
  Enclosure acc;
  for (std::size_t i = 1; i < x.size(); ++i) {
    Enclosure e = (table[i] * x[0] - Enclosure::point(Dyadic::from_integer(x[i]))).abs();
    acc = i == 1 ? e : hull_max(acc, e);
  }
  return acc;
}

Enclosure l_value(const ApproxVector& x, const RealSpec& spec, const PrecisionContext& ctx) {
  if (x.is_zero()) throw std::invalid_argument("l_value: zero vector");
  if (x[0] == 0) return l_enclosure(x, PowerTable(spec, x.n(), 64));
  PowerTable table(spec, x.n(), ctx.initial_bits);
  return l_enclosure(x, table);
}

LWitness l_witness(const ApproxVector& x, PowerLadder& ladder) {
  auto make = [&](int k) { return LWitness{x[0], k, x[static_cast<std::size_t>(k)]}; };
  LWitness best = make(1);
  for (int k = 2; k <= x.n(); ++k) {
    LWitness w = make(k);
    if (compare_abs(w.form(), best.form(), ladder) > 0) best = w;
  }
  return best;
}

int compare_l(const LWitness& a, const LWitness& b, PowerLadder& ladder) {
  return compare_abs(a.form(), b.form(), ladder);
}

int compare_l(const ApproxVector& a, const ApproxVector& b, PowerLadder& ladder) {
  const PowerTable& base = ladder.base();
  int c = l_enclosure(a, base).compare(l_enclosure(b, base));
  if (c != 0) return c;
  return compare_l(l_witness(a, ladder), l_witness(b, ladder), ladder);
}

ApproxVector best_candidate(const mpz_class& x0, PowerLadder& ladder) {
  std::vector<mpz_class> c{x0};
  for (int i = 1; i <= ladder.n(); ++i) c.push_back(nearest_integer_multiple(x0, i, ladder));
  return ApproxVector(std::move(c));
}

ApproxVector best_candidate(const mpz_class& x0, const RealSpec& spec, int n,
                            const PrecisionContext& ctx) {
  PowerLadder ladder(spec, n, ctx);
  return best_candidate(x0, ladder);
}

MinimalPointSequence MinimalPointSequence::prefix(std::size_t count) const {
  MinimalPointSequence out(spec, n, X_max);
  out.tie_rule = tie_rule;
  out.precision_bits = precision_bits;
  count = std::min(count, records.size());
  out.records.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(count));
  if (count > 0) out.X_max = records[count - 1].X;
  return out;
}

MinimalPointSequence MinimalPointSequence::truncated(const mpz_class& bound) const {
  std::size_t count = 0;
  while (count < records.size() && records[count].X <= bound) ++count;
  MinimalPointSequence out = prefix(count);
  out.X_max = bound;
  return out;
}

namespace {

struct Candidate {
  ApproxVector x;
  Enclosure L;
};

// Exact comparison with the enclosure as a fast path.
int compare_candidates(const Candidate& a, const Candidate& b, PowerLadder& ladder) {
  int c = a.L.compare(b.L);
  if (c != 0) return c;
  if (a.L.is_point() && b.L.is_point()) return a.L.lower() < b.L.lower() ? -1 : (a.L.lower() == b.L.lower() ? 0 : 1);
  return compare_l(l_witness(a.x, ladder), l_witness(b.x, ladder), ladder);
}

class RecordScan {
 public:
  explicit RecordScan(PowerLadder& ladder) : ladder_(ladder) {}

  bool improves(const Candidate& c) {
    return !current_ || compare_candidates(c, *current_, ladder_) < 0;
  }

  void accept(const Candidate& c) {
    if (!c.x.is_primitive()) throw std::logic_error("record scan: non-primitive record " + c.x.to_string());
    MinimalPointRecord r;
    r.index = records_.size() + 1;
    r.x = c.x;
    r.X = sup_norm(c.x);
    r.L = c.L;
    records_.push_back(std::move(r));
    current_ = c;
  }

  std::vector<MinimalPointRecord>& records() { return records_; }

 private:
  PowerLadder& ladder_;
  std::optional<Candidate> current_;
  std::vector<MinimalPointRecord> records_;
};

// Certifies strict decrease of consecutive L enclosures and fills witnesses.
long finalize(std::vector<MinimalPointRecord>& records, PowerLadder& ladder) {
  std::size_t top = 0;
  std::vector<std::size_t> levels(records.size(), 0);
  for (std::size_t i = 1; i < records.size(); ++i) {
    while (records[i - 1].L.compare(records[i].L) != 1) {
      std::size_t level = std::max(levels[i - 1], levels[i]) + 1;
      const PowerTable& t = ladder.level(level);
      records[i - 1].L = l_enclosure(records[i - 1].x, t);
      records[i].L = l_enclosure(records[i].x, t);
      levels[i - 1] = levels[i] = level;
      top = std::max(top, level);
    }
  }
  for (auto& r : records) r.witness = l_witness(r.x, ladder);
  return ladder.bits_at(top);
}

// Lexicographically smallest vector with first coordinate x0, coordinates in
// [-N, N], and L at most |w|.
ApproxVector canonical_with_bound(const mpz_class& x0, const mpz_class& N, const LWitness& w,
                                  PowerLadder& ladder) {
  XiForm e = w.form();
  if (sign(e, ladder) < 0) e = -e;
  std::vector<mpz_class> c{x0};
  for (int j = 1; j <= ladder.n(); ++j) {
    XiForm lower = XiForm::monomial_offset(x0, j, 0) - e;
    c.push_back(std::max(mpz_class(-N), ceil_exact(lower, ladder)));
  }
  return ApproxVector(std::move(c));
}

}  // namespace

MinimalPointSequence minimal_points(const RealSpec& spec, int n, const mpz_class& X_max,
                                    const PrecisionContext& ctx) {
  if (n < 1 || n > 8) throw std::invalid_argument("minimal_points: need 1 <= n <= 8");
  if (X_max < 1) throw std::invalid_argument("minimal_points: X_max must be >= 1");
  PowerLadder ladder(spec, n, ctx);
  const PowerTable& base = ladder.base();
  RecordScan scan(ladder);

  // Every rounded candidate has L < 1/2, so below the norm of the first one the
  // records may have larger L and need clamped candidates.
  const mpz_class first_norm = sup_norm(best_candidate(1, ladder));
  for (mpz_class N = 1; N < first_norm && N <= X_max; ++N) {
    std::vector<Candidate> group;
    if (N == 1) {
      ApproxVector unit(std::vector<mpz_class>(static_cast<std::size_t>(n) + 1, mpz_class(0)));
      unit.coords.back() = 1;
      group.push_back({unit, l_enclosure(unit, base)});
    }
    for (mpz_class x0 = 1; x0 <= N; ++x0) {
      ApproxVector v = best_candidate(x0, ladder);
      for (std::size_t i = 1; i < v.size(); ++i) v.coords[i] = std::clamp(v.coords[i], mpz_class(-N), N);
      group.push_back({v, l_enclosure(v, base)});
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < group.size(); ++k) {
      if (compare_candidates(group[k], group[best], ladder) < 0) best = k;
    }
    if (!scan.improves(group[best])) continue;
    // smallest x0 reaching the minimum gives the lexicographically smallest vector
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (compare_candidates(group[k], group[best], ladder) != 0) continue;
      Candidate c = group[k];
      if (c.x[0] != 0) {
        c.x = canonical_with_bound(c.x[0], N, l_witness(c.x, ladder), ladder);
        c.L = l_enclosure(c.x, base);
      }
      if (sup_norm(c.x) != N) throw std::logic_error("minimal_points: record norm mismatch");
      scan.accept(c);
      break;
    }
  }

  std::vector<Candidate> group;
  mpz_class group_norm = 0;
  auto flush = [&]() {
    if (group.empty()) return;
    std::size_t best = 0;
    for (std::size_t k = 1; k < group.size(); ++k) {
      int c = compare_candidates(group[k], group[best], ladder);
      if (c < 0 || (c == 0 && group[k].x < group[best].x)) best = k;
    }
    if (scan.improves(group[best])) scan.accept(group[best]);
    group.clear();
  };
  for (mpz_class x0 = 1;; ++x0) {
    ApproxVector v = best_candidate(x0, ladder);
    mpz_class norm = sup_norm(v);
    if (norm > X_max) break;
    if (norm != group_norm) {
      flush();
      group_norm = norm;
    }
    if (!v.is_primitive()) continue;
    Enclosure L = l_enclosure(v, base);
    group.push_back({std::move(v), std::move(L)});
  }
  flush();

  MinimalPointSequence seq(spec, n, X_max);
  seq.records = std::move(scan.records());
  seq.tie_rule = kTieRule;
  seq.precision_bits = finalize(seq.records, ladder);
  return seq;
}

namespace {

using i128 = __int128;

i128 to_i128(const mpz_class& v) {
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 125) throw std::overflow_error("to_i128: value too large");
  mpz_class a = abs(v);
  mpz_class hi = a >> 64;
  mpz_class lo = a - (hi << 64);
  i128 out = (static_cast<i128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
             static_cast<i128>(mpz_get_ui(lo.get_mpz_t()));
  return v < 0 ? -out : out;
}

struct FixedInterval {
  i128 lo;
  i128 hi;
};

}  // namespace

long brute_force_limit(int n) {
  const double budget = 1.1e8;
  long x = 1;
  while (std::pow(2.0 * (x + 1) + 1, n) * (x + 2) <= budget) ++x;
  return x;
}

MinimalPointSequence brute_force_minimal_points(const RealSpec& spec, int n, long X_bound,
                                                const PrecisionContext& ctx) {
  if (n < 1 || n > 8) throw std::invalid_argument("brute force: need 1 <= n <= 8");
  if (X_bound < 1) throw std::invalid_argument("brute force: bound must be >= 1");
  if (X_bound > brute_force_limit(n)) {
    throw std::invalid_argument("brute force: bound " + std::to_string(X_bound) +
                                " exceeds the enumeration guard " + std::to_string(brute_force_limit(n)));
  }
  PowerLadder ladder(spec, n, ctx);
  const PowerTable& base = ladder.base();
  const std::size_t dim = static_cast<std::size_t>(n) + 1;

  // fixed-point scale 2^F
  mpz_class magnitude = 1;
  for (int i = 1; i <= n; ++i) {
    const Enclosure& t = base[static_cast<std::size_t>(i)];
    magnitude = std::max(magnitude, mpz_class(abs(t.lower().floor()) + abs(t.upper().ceil())));
  }
  magnitude = (magnitude + 1) * (X_bound + 1);
  long F = std::min<long>(64, 120 - static_cast<long>(mpz_sizeinbase(magnitude.get_mpz_t(), 2)));
  if (F < 24) throw std::invalid_argument("brute force: |xi| too large for the fixed-point scan");
  auto scaled_floor = [&](const Dyadic& d) { return to_i128(d.round_down(-F).scaled_mantissa(-F)); };
  auto scaled_ceil = [&](const Dyadic& d) { return to_i128(d.round_up(-F).scaled_mantissa(-F)); };
  const i128 one = static_cast<i128>(1) << F;

  struct Best {
    bool set = false;
    std::vector<long> x;
    FixedInterval L{0, 0};
    std::vector<FixedInterval> err;
  };
  std::vector<Best> best(static_cast<std::size_t>(X_bound) + 1);

  auto to_vector = [](const std::vector<long>& x) {
    std::vector<mpz_class> c;
    for (long v : x) c.emplace_back(v);
    return ApproxVector(std::move(c));
  };
  // equal L when both vectors share x0 and a dominating coordinate value
  auto dominated_tie = [&](const std::vector<long>& a, const std::vector<FixedInterval>& ea,
                           const std::vector<long>& b, const std::vector<FixedInterval>& eb) {
    if (a[0] != b[0]) return false;
    for (std::size_t k = 1; k < dim; ++k) {
      if (a[k] != b[k]) continue;
      bool dom = true;
      for (std::size_t j = 1; j < dim && dom; ++j) {
        if (j == k) continue;
        dom = ea[k - 1].lo > ea[j - 1].hi && eb[k - 1].lo > eb[j - 1].hi;
      }
      if (dom) return true;
    }
    return false;
  };

  std::vector<FixedInterval> t(static_cast<std::size_t>(n));
  std::vector<long> x(dim);
  std::vector<FixedInterval> err(static_cast<std::size_t>(n));
  for (long x0 = 0; x0 <= X_bound; ++x0) {
    for (int i = 1; i <= n; ++i) {
      Enclosure e = base[static_cast<std::size_t>(i)] * mpz_class(x0);
      t[static_cast<std::size_t>(i - 1)] = {scaled_floor(e.lower()), scaled_ceil(e.upper())};
    }
    x[0] = x0;
    for (std::size_t k = 1; k < dim; ++k) x[k] = -X_bound;
    while (true) {
      bool valid = true;
      if (x0 == 0) {
        // first nonzero coordinate positive
        std::size_t k = 1;
        while (k < dim && x[k] == 0) ++k;
        valid = k < dim && x[k] > 0;
      }
      if (valid) {
        long norm = x0;
        i128 Llo = 0, Lhi = 0;
        for (std::size_t k = 1; k < dim; ++k) {
          norm = std::max(norm, std::labs(x[k]));
          i128 shift = static_cast<i128>(x[k]) * one;
          i128 lo = t[k - 1].lo - shift;
          i128 hi = t[k - 1].hi - shift;
          FixedInterval a;
          if (lo >= 0) {
            a = {lo, hi};
          } else if (hi <= 0) {
            a = {-hi, -lo};
          } else {
            a = {0, std::max(-lo, hi)};
          }
          err[k - 1] = a;
          Llo = std::max(Llo, a.lo);
          Lhi = std::max(Lhi, a.hi);
        }
        Best& b = best[static_cast<std::size_t>(norm)];
        bool take = false;
        if (!b.set || Lhi < b.L.lo) {
          take = true;
        } else if (Llo > b.L.hi) {
          take = false;
        } else if (Llo == Lhi && b.L.lo == b.L.hi) {
          take = false;  // equal exact values; the earlier vector is lexicographically smaller
        } else if (dominated_tie(x, err, b.x, b.err)) {
          take = false;
        } else {
          take = compare_l(to_vector(x), to_vector(b.x), ladder) < 0;
        }
        if (take) {
          b.set = true;
          b.x = x;
          b.L = {Llo, Lhi};
          b.err = err;
        }
      }
      // next vector in lexicographic order
      std::size_t k = dim - 1;
      while (k >= 1 && x[k] == X_bound) {
        x[k] = -X_bound;
        --k;
      }
      if (k == 0) break;
      ++x[k];
    }
  }

  RecordScan scan(ladder);
  for (long N = 1; N <= X_bound; ++N) {
    const Best& b = best[static_cast<std::size_t>(N)];
    if (!b.set) continue;
    ApproxVector v = to_vector(b.x);
    Candidate c{v, l_enclosure(v, base)};
    if (scan.improves(c)) scan.accept(c);
  }
  MinimalPointSequence seq(spec, n, mpz_class(X_bound));
  seq.records = std::move(scan.records());
  seq.tie_rule = kTieRule;
  seq.precision_bits = finalize(seq.records, ladder);
  return seq;
}

ExponentSummary exponent_estimates(const MinimalPointSequence& seq) {
  if (seq.records.size() < 2) throw std::invalid_argument("exponent_estimates: need at least two records");
  ExponentSummary out;
  const auto& r = seq.records;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    double log_inv_l = -std::log(r[i].L.midpoint());
    ExponentEstimate e;
    e.i = r[i].index;
    e.uniform_hat = log_inv_l / std::log(r[i + 1].X.get_d());
    if (r[i].X > 1) e.ordinary_hat = log_inv_l / std::log(r[i].X.get_d());
    out.rows.push_back(e);
  }
  double tail = std::numeric_limits<double>::infinity();
  for (std::size_t k = out.rows.size(); k-- > 0;) {
    tail = std::min(tail, out.rows[k].uniform_hat);
    out.rows[k].tail_inf = tail;
  }
  out.min = out.rows.front().uniform_hat;
  out.max = out.rows.front().uniform_hat;
  for (const auto& e : out.rows) {
    out.min = std::min(out.min, e.uniform_hat);
    out.max = std::max(out.max, e.uniform_hat);
  }
  out.last = out.rows.back().uniform_hat;
  return out;
}

}  // namespace diophlab
