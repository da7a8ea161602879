#ifndef CRFEM_LINALG_HPP
#define CRFEM_LINALG_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "crfem/field.hpp"
#include "crfem/rational.hpp"

namespace crfem {

/// Minimal dense row-major matrix.
template <class S>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, FieldOps<S>::zero()) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldOps<S>::one();
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<S> data_;
};

/// Runs fn(i) for i in [0, n) on up to CR_FEM_THREADS workers (defaults to the
/// hardware count). Falls back to a serial loop for small n.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);
unsigned worker_count();

// ---------------------------------------------------------------------------
// exact rational elimination
// ---------------------------------------------------------------------------

/// Fraction-free Bareiss determinant. Also usable as an independent oracle for
/// the CRT determinant path. O(n^3) big-integer operations.
Rational det_bareiss(Matrix<Rational> a);

/// Leading principal minors det(A[0..i, 0..i]), i = 0..n-1 (Bareiss pivots).
std::vector<Rational> leading_principal_minors(Matrix<Rational> a);

/// Rank by rational Gaussian elimination (pivot = smallest bit size).
std::size_t rank_exact(Matrix<Rational> a);

/// A nonzero rational kernel vector of a singular square matrix.
std::vector<Rational> kernel_vector(Matrix<Rational> a);

/// Solves a x = b by rational Gaussian elimination (small systems).
std::vector<Rational> solve_exact_small(Matrix<Rational> a,
                                        std::vector<Rational> b);

// ---------------------------------------------------------------------------
// prime-field elimination
// ---------------------------------------------------------------------------

bool is_prime_u64(std::uint64_t n);
/// Uniform random prime in [2^61, 2^62).
std::uint64_t random_prime_62(std::mt19937_64& rng);

/// Rank over Z/pZ; consumes the matrix. The modulus must be set on Fp.
std::size_t rank_mod(Matrix<Fp>& a);

/// Rank with the one-sided modular fast path: if the rank mod a random prime
/// reaches max_possible, that value is exact (nonsingular mod p implies
/// nonsingular over Q). Otherwise falls back to rational elimination.
std::size_t rank_with_modular_fast_path(const Matrix<Rational>& a,
                                        std::size_t max_possible,
                                        std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// multi-prime CRT solver for square rational systems
// ---------------------------------------------------------------------------

/// Exact determinant and multi-RHS solves for a square rational matrix via
/// per-prime LU plus Chinese remaindering against a Hadamard bound. All
/// results are exact rationals.
class ExactSolver {
 public:
  explicit ExactSolver(const Matrix<Rational>& a);

  const Rational& det() const { return det_; }
  bool singular() const { return det_ == 0; }

  /// Solves a x = rhs[j] for every column; throws if singular.
  std::vector<std::vector<Rational>> solve(
      const std::vector<std::vector<Rational>>& rhs) const;

  Matrix<Rational> inverse() const;

 private:
  std::size_t n_;
  Matrix<Integer> az_;            // denominator-cleared integer matrix
  std::vector<Integer> row_scale_;  // az row i = row_scale_[i] * a row i
  Integer det_az_;                // det of az_
  Rational det_;                  // det of a
  double det_bound_log2_;         // Hadamard bound for az_
  std::vector<double> col_log2_;  // per-column norm bound contributions
};

}  // namespace crfem

#endif
