#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace diophlab {

using IntVector = std::vector<mpz_class>;
using IntMatrix = std::vector<IntVector>;  // list of rows

IntVector to_int_vector(std::initializer_list<long> v);

/// Row Hermite normal form: positive pivots, entries above each pivot reduced
/// into [0, pivot), zero rows dropped.
IntMatrix hermite_normal_form(IntMatrix rows, std::size_t n);
/// Saturated basis (in HNF) of {v in Z^n : r . v = 0 for every row r}.
IntMatrix integer_kernel(const IntMatrix& rows, std::size_t n);
/// Exact determinant of a square matrix (fraction-free elimination).
mpz_class determinant(IntMatrix m);
std::size_t rank(const IntMatrix& rows, std::size_t n);

/// Lexicographically ordered p-subsets of {0, ..., n-1}.
std::vector<std::vector<int>> index_subsets(int n, int p);
long binomial(int n, int p);

struct GrassmannVector {
  int n = 0;
  int p = 0;
  IntVector entries;  // p x p minors in lexicographic column order

  mpz_class content() const;
  /// Signed coordinate for an arbitrary index sequence (0 on repeats).
  mpz_class coordinate(const std::vector<int>& indices) const;
  /// Quadratic Pluecker relations.
  bool satisfies_plucker() const;
  /// Divided by the content, first nonzero entry positive.
  GrassmannVector primitive() const;
  friend bool operator==(const GrassmannVector&, const GrassmannVector&) = default;
};

GrassmannVector wedge(const IntMatrix& basis, int n);

enum class HeightNorm { sup, euclid };

class RationalSubspace {
 public:
  static RationalSubspace zero(int n);
  static RationalSubspace full(int n);

  int ambient() const { return n_; }
  int dim() const { return p_; }
  const IntMatrix& basis() const { return basis_; }
  const GrassmannVector& grassmann() const { return grassmann_; }
  const mpz_class& height_sup() const { return height_sup_; }
  const mpz_class& height_euclid_squared() const { return height_euclid_sq_; }
  double height(HeightNorm norm = HeightNorm::sup) const;
  bool contains(const IntVector& v) const;

  friend bool operator==(const RationalSubspace& a, const RationalSubspace& b) {
    return a.n_ == b.n_ && a.basis_ == b.basis_;
  }

 private:
  friend RationalSubspace saturate(const IntMatrix& vectors, int n);
  RationalSubspace(int n, IntMatrix hnf_basis);

  int n_ = 0;
  int p_ = 0;
  IntMatrix basis_;
  GrassmannVector grassmann_;
  mpz_class height_sup_;
  mpz_class height_euclid_sq_;
};

/// Subspace spanned by the vectors, with a basis of all its integer points.
RationalSubspace saturate(const IntMatrix& vectors, int n);
RationalSubspace orthogonal_complement(const RationalSubspace& s);
RationalSubspace sum(const RationalSubspace& s, const RationalSubspace& t);
RationalSubspace intersect(const RationalSubspace& s, const RationalSubspace& t);

/// H(S n T) H(S + T) / (H(S) H(T)): exact for the sup norm; the Euclidean
/// ratio is known exactly through its square.
struct HeightRatio {
  mpq_class sup;
  mpq_class euclid_squared;
  double value(HeightNorm norm) const;
};
HeightRatio height_product_ratio(const RationalSubspace& s, const RationalSubspace& t);

/// |grassmann(S^perp)_J| = |grassmann(S)_{complement of J}| for every J.
bool duality_holds(const RationalSubspace& s);

/// The lattice generated by the vectors equals the integer points of their span.
bool is_lattice_basis_of_span(const IntMatrix& vectors, int n);

}  // namespace diophlab
