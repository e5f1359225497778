#include "diophlab/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diophlab {

namespace {


// Unimodular row reduction to echelon form using pivots in columns [0, pivot_cols).
// Returns the number of pivots; rows below are zero in those columns.
std::size_t echelon(IntMatrix& m, std::size_t pivot_cols, bool reduce_above) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_cols && r < m.size(); ++c) {
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      mpz_class a = m[r][c], b = m[i][c], g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      mpz_class u = -b / g, v = a / g;
      for (std::size_t k = 0; k < m[r].size(); ++k) {
        mpz_class top = s * m[r][k] + t * m[i][k];
        mpz_class bottom = u * m[r][k] + v * m[i][k];
        m[r][k] = std::move(top);
        m[i][k] = std::move(bottom);
      }
    }
    if (m[r][c] == 0) continue;
    if (m[r][c] < 0) {
      for (auto& x : m[r]) x = -x;
    }
    if (reduce_above) {
      for (std::size_t i = 0; i < r; ++i) {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][c].get_mpz_t(), m[r][c].get_mpz_t());
        if (q == 0) continue;
        for (std::size_t k = 0; k < m[i].size(); ++k) m[i][k] -= q * m[r][k];
      }
    }
    ++r;
  }
  return r;
}

void check_width(const IntMatrix& rows, std::size_t n) {
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("subspace: vector length does not match n");
  }
}

}  // namespace

IntVector to_int_vector(std::initializer_list<long> v) {
  IntVector out;
  for (long x : v) out.emplace_back(x);
  return out;
}

IntMatrix hermite_normal_form(IntMatrix rows, std::size_t n) {
  check_width(rows, n);
  std::size_t r = echelon(rows, n, true);
  rows.resize(r);
  return rows;
}

IntMatrix integer_kernel(const IntMatrix& rows, std::size_t n) {
  check_width(rows, n);
  // [A^T | I]: rows of the transform whose A^T part vanishes span the kernel
  const std::size_t m = rows.size();
  IntMatrix aug(n, IntVector(m + n, mpz_class(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) aug[i][j] = rows[j][i];
    aug[i][m + i] = 1;
  }
  std::size_t r = echelon(aug, m, false);
  IntMatrix kernel;
  for (std::size_t i = r; i < n; ++i) kernel.emplace_back(aug[i].begin() + static_cast<std::ptrdiff_t>(m), aug[i].end());
  return hermite_normal_form(std::move(kernel), n);
}

mpz_class determinant(IntMatrix a) {
  const std::size_t k = a.size();
  if (k == 0) return 1;
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t c = 0; c + 1 < k; ++c) {
    if (a[c][c] == 0) {
      std::size_t swap = c + 1;
      while (swap < k && a[swap][c] == 0) ++swap;
      if (swap == k) return 0;
      std::swap(a[c], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < k; ++i) {
      for (std::size_t j = c + 1; j < k; ++j) {
        a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[c][c];
  }
  return sign * a[k - 1][k - 1];
}

std::size_t rank(const IntMatrix& rows, std::size_t n) {
  return hermite_normal_form(rows, n).size();
}

long binomial(int n, int p) {
  if (p < 0 || p > n) return 0;
  long out = 1;
  for (int i = 1; i <= p; ++i) out = out * (n - p + i) / i;
  return out;
}

std::vector<std::vector<int>> index_subsets(int n, int p) {
  std::vector<std::vector<int>> out;
  if (p < 0 || p > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - p + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

GrassmannVector wedge(const IntMatrix& basis, int n) {
  check_width(basis, static_cast<std::size_t>(n));
  const int p = static_cast<int>(basis.size());
  if (p > n) throw std::invalid_argument("wedge: more vectors than the dimension");
  GrassmannVector g{n, p, {}};
  for (const auto& cols : index_subsets(n, p)) {
    IntMatrix minor(static_cast<std::size_t>(p), IntVector(static_cast<std::size_t>(p)));
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        minor[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])];
      }
    }
    g.entries.push_back(determinant(std::move(minor)));
  }
  return g;
}

mpz_class GrassmannVector::content() const {
  mpz_class g = 0;
  for (const auto& e : entries) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
  return g;
}

GrassmannVector GrassmannVector::primitive() const {
  GrassmannVector out = *this;
  mpz_class g = content();
  if (g == 0) return out;
  for (const auto& e : entries) {
    if (e != 0) {
      if (e < 0) g = -g;
      break;
    }
  }
  for (auto& e : out.entries) e /= g;
  return out;
}

mpz_class GrassmannVector::coordinate(const std::vector<int>& indices) const {
  std::vector<int> sorted = indices;
  int sign = 1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = 0; j + 1 < sorted.size() - i; ++j) {
      if (sorted[j] == sorted[j + 1]) return 0;
      if (sorted[j] > sorted[j + 1]) {
        std::swap(sorted[j], sorted[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
    if (sorted[j] == sorted[j + 1]) return 0;
  }
  // rank of the subset in lexicographic order
  std::size_t pos = 0;
  int prev = -1;
  for (int i = 0; i < p; ++i) {
    for (int v = prev + 1; v < sorted[static_cast<std::size_t>(i)]; ++v) pos += static_cast<std::size_t>(binomial(n - v - 1, p - i - 1));
    prev = sorted[static_cast<std::size_t>(i)];
  }
  return sign * entries.at(pos);
}

bool GrassmannVector::satisfies_plucker() const {
  if (p <= 1 || p >= n - 1) return true;
  for (const auto& I : index_subsets(n, p - 1)) {
    for (const auto& J : index_subsets(n, p + 1)) {
      mpz_class total = 0;
      for (std::size_t k = 0; k < J.size(); ++k) {
        std::vector<int> left = I;
        left.push_back(J[k]);
        std::vector<int> right;
        for (std::size_t t = 0; t < J.size(); ++t) {
          if (t != k) right.push_back(J[t]);
        }
        mpz_class term = coordinate(left) * coordinate(right);
        if (k % 2 == 0) total += term; else total -= term;
      }
      if (total != 0) return false;
    }
  }
  return true;
}

RationalSubspace::RationalSubspace(int n, IntMatrix hnf_basis)
    : n_(n), p_(static_cast<int>(hnf_basis.size())), basis_(std::move(hnf_basis)) {
  GrassmannVector w = wedge(basis_, n_);
  if (w.content() != 1) throw std::logic_error("RationalSubspace: basis is not saturated");
  height_sup_ = 0;
  height_euclid_sq_ = 0;
  for (const auto& e : w.entries) {
    if (abs(e) > height_sup_) height_sup_ = abs(e);
    height_euclid_sq_ += e * e;
  }
  grassmann_ = w.primitive();
}

RationalSubspace RationalSubspace::zero(int n) { return RationalSubspace(n, {}); }

RationalSubspace RationalSubspace::full(int n) {
  IntMatrix id(static_cast<std::size_t>(n), IntVector(static_cast<std::size_t>(n), mpz_class(0)));
  for (std::size_t i = 0; i < id.size(); ++i) id[i][i] = 1;
  return RationalSubspace(n, std::move(id));
}

double RationalSubspace::height(HeightNorm norm) const {
  if (norm == HeightNorm::sup) return height_sup_.get_d();
  return std::sqrt(height_euclid_sq_.get_d());
}

bool RationalSubspace::contains(const IntVector& v) const {
  IntMatrix rows = basis_;
  rows.push_back(v);
  return rank(rows, static_cast<std::size_t>(n_)) == static_cast<std::size_t>(p_);
}

RationalSubspace saturate(const IntMatrix& vectors, int n) {
  check_width(vectors, static_cast<std::size_t>(n));
  IntMatrix k = integer_kernel(vectors, static_cast<std::size_t>(n));
  return RationalSubspace(n, integer_kernel(k, static_cast<std::size_t>(n)));
}

RationalSubspace orthogonal_complement(const RationalSubspace& s) {
  return saturate(integer_kernel(s.basis(), static_cast<std::size_t>(s.ambient())), s.ambient());
}

RationalSubspace sum(const RationalSubspace& s, const RationalSubspace& t) {
  if (s.ambient() != t.ambient()) throw std::invalid_argument("sum: ambient dimensions differ");
  IntMatrix rows = s.basis();
  rows.insert(rows.end(), t.basis().begin(), t.basis().end());
  return saturate(rows, s.ambient());
}

RationalSubspace intersect(const RationalSubspace& s, const RationalSubspace& t) {
  if (s.ambient() != t.ambient()) throw std::invalid_argument("intersect: ambient dimensions differ");
  return orthogonal_complement(sum(orthogonal_complement(s), orthogonal_complement(t)));
}

double HeightRatio::value(HeightNorm norm) const {
  if (norm == HeightNorm::sup) return sup.get_d();
  return std::sqrt(euclid_squared.get_d());
}

HeightRatio height_product_ratio(const RationalSubspace& s, const RationalSubspace& t) {
  RationalSubspace meet = intersect(s, t);
  RationalSubspace join = sum(s, t);
  HeightRatio r;
  r.sup = mpq_class(meet.height_sup() * join.height_sup(), s.height_sup() * t.height_sup());
  r.sup.canonicalize();
  r.euclid_squared = mpq_class(meet.height_euclid_squared() * join.height_euclid_squared(),
                               s.height_euclid_squared() * t.height_euclid_squared());
  r.euclid_squared.canonicalize();
  return r;
}

bool duality_holds(const RationalSubspace& s) {
  RationalSubspace perp = orthogonal_complement(s);
  const int n = s.ambient();
  const auto subsets = index_subsets(n, perp.dim());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    std::vector<int> rest;
    for (int v = 0; v < n; ++v) {
      if (!std::binary_search(subsets[k].begin(), subsets[k].end(), v)) rest.push_back(v);
    }
    if (abs(perp.grassmann().entries[k]) != abs(s.grassmann().coordinate(rest))) return false;
  }
  return s.height_sup() == perp.height_sup() &&
         s.height_euclid_squared() == perp.height_euclid_squared();
}

bool is_lattice_basis_of_span(const IntMatrix& vectors, int n) {
  IntMatrix h = hermite_normal_form(vectors, static_cast<std::size_t>(n));
  if (h.size() != vectors.size()) return false;
  return h == saturate(vectors, n).basis();
}

}  // namespace diophlab
