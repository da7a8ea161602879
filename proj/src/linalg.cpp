#include "crfem/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace crfem {

unsigned worker_count() {
  if (const char* env = std::getenv("CR_FEM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1u;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// rational elimination
// ---------------------------------------------------------------------------

namespace {

// Clears denominators row by row; returns the integer matrix and the factor
// each row was multiplied by.
std::pair<Matrix<Integer>, std::vector<Integer>> clear_denominators(
    const Matrix<Rational>& a) {
  Matrix<Integer> az(a.rows(), a.cols());
  std::vector<Integer> scale(a.rows(), Integer(1));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Integer l(1);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Integer den = a(i, j).get_den();
      Integer g;
      mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
      l = l / g * den;
    }
    scale[i] = l;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      Rational v = a(i, j) * Rational(l);
      v.canonicalize();
      if (v.get_den() != 1)
        throw std::logic_error("row denominator clearing failed");
      az(i, j) = v.get_num();
    }
  }
  return {std::move(az), std::move(scale)};
}

Integer det_bareiss_int(Matrix<Integer> m) {
  const std::size_t n = m.rows();
  if (n == 0) return Integer(1);
  Integer prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return Integer(0);
      for (std::size_t j = k; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  Integer d = m(n - 1, n - 1);
  if (sign < 0) d = -d;
  return d;
}

// Size measure used for pivot selection in rational elimination.
std::size_t entry_bits(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) +
         mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

}  // namespace

Rational det_bareiss(Matrix<Rational> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det of non-square");
  auto [az, scale] = clear_denominators(a);
  Integer d = det_bareiss_int(std::move(az));
  Integer s(1);
  for (const auto& f : scale) s *= f;
  return rat(d, s);
}

std::vector<Rational> leading_principal_minors(Matrix<Rational> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("minors of non-square");
  std::vector<Rational> out;
  out.reserve(a.rows());
  for (std::size_t m = 1; m <= a.rows(); ++m) {
    Matrix<Rational> sub(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sub(i, j) = a(i, j);
    out.push_back(det_bareiss(std::move(sub)));
  }
  return out;
}

std::size_t rank_exact(Matrix<Rational> a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    // pick the smallest nonzero entry in this column to limit growth
    std::size_t best = rows;
    std::size_t best_bits = 0;
    for (std::size_t i = row; i < rows; ++i) {
      if (a(i, col) == 0) continue;
      std::size_t b = entry_bits(a(i, col));
      if (best == rows || b < best_bits) {
        best = i;
        best_bits = b;
      }
    }
    if (best == rows) continue;
    if (best != row)
      for (std::size_t j = col; j < cols; ++j) std::swap(a(row, j), a(best, j));
    for (std::size_t i = row + 1; i < rows; ++i) {
      if (a(i, col) == 0) continue;
      Rational f = a(i, col) / a(row, col);
      a(i, col) = 0;
      for (std::size_t j = col + 1; j < cols; ++j) {
        if (a(row, j) == 0) continue;
        Rational t = a(i, j) - f * a(row, j);
        t.canonicalize();
        a(i, j) = std::move(t);
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

std::vector<Rational> kernel_vector(Matrix<Rational> a) {
  const std::size_t n = a.cols();
  const std::size_t rows = a.rows();
  // forward elimination, remembering pivot columns
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < rows; ++col) {
    std::size_t best = rows;
    for (std::size_t i = row; i < rows; ++i)
      if (a(i, col) != 0) {
        best = i;
        break;
      }
    if (best == rows) continue;
    if (best != row)
      for (std::size_t j = col; j < n; ++j) std::swap(a(row, j), a(best, j));
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rational f = a(i, col) / a(row, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(row, j);
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() == n)
    throw std::runtime_error("kernel_vector: matrix has full column rank");
  // first free column drives the kernel vector
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  std::vector<Rational> x(n, Rational(0));
  x[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r) {
    std::size_t c = pivot_col[r];
    x[c] = -a(r, free_col) / a(r, c);
  }
  return x;
}

std::vector<Rational> solve_exact_small(Matrix<Rational> a,
                                        std::vector<Rational> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("solve_exact_small: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    for (std::size_t i = col; i < n; ++i)
      if (a(i, col) != 0) {
        best = i;
        break;
      }
    if (best == n) throw std::runtime_error("solve_exact_small: singular");
    if (best != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      std::swap(b[col], b[best]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      Rational f = a(i, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a(i, i);
  return x;
}

// ---------------------------------------------------------------------------
// prime-field machinery
// ---------------------------------------------------------------------------

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) %
                                    m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1u) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1u;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1u) == 0) {
    d >>= 1u;
    ++s;
  }
  // deterministic witness set for n < 3.3e24
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::uint64_t random_prime_62(std::mt19937_64& rng) {
  const std::uint64_t lo = 1ull << 61;
  const std::uint64_t hi = 1ull << 62;
  std::uniform_int_distribution<std::uint64_t> dist(lo, hi - 1);
  for (;;) {
    std::uint64_t c = dist(rng) | 1ull;
    if (is_prime_u64(c)) return c;
  }
}

std::size_t rank_mod(Matrix<Fp>& a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t rank = 0, row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = rows;
    for (std::size_t i = row; i < rows; ++i)
      if (!a(i, col).is_zero()) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    if (piv != row)
      for (std::size_t j = col; j < cols; ++j) std::swap(a(row, j), a(piv, j));
    Fp inv = a(row, col).inv();
    for (std::size_t i = row + 1; i < rows; ++i) {
      if (a(i, col).is_zero()) continue;
      Fp f = a(i, col) * inv;
      a(i, col) = Fp();
      for (std::size_t j = col + 1; j < cols; ++j)
        a(i, j) -= f * a(row, j);
    }
    ++row;
    ++rank;
  }
  return rank;
}

std::size_t rank_with_modular_fast_path(const Matrix<Rational>& a,
                                        std::size_t max_possible,
                                        std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::uint64_t p = random_prime_62(rng);
    Fp::set_modulus(p);
    try {
      Matrix<Fp> m(a.rows(), a.cols());
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
          m(i, j) = Fp::from_rational(a(i, j));
      std::size_t r = rank_mod(m);
      if (r >= max_possible) return r;
    } catch (const FpDivisionByZero&) {
      continue;  // prime divides some denominator; try another
    }
  }
  return rank_exact(a);
}

// ---------------------------------------------------------------------------
// ExactSolver
// ---------------------------------------------------------------------------

namespace {

struct FpLU {
  std::size_t n = 0;
  std::uint64_t p = 0;
  std::vector<std::uint64_t> lu;  // row-major, L below diagonal, U on/above
  std::vector<std::size_t> perm;
  std::uint64_t det = 0;  // 0 means singular mod p
};

std::uint64_t reduce_mod(const Integer& z, std::uint64_t p) {
  return mpz_fdiv_ui(z.get_mpz_t(), p);
}

FpLU lu_factor_mod(const Matrix<Integer>& az, std::uint64_t p) {
  const std::size_t n = az.rows();
  FpLU f;
  f.n = n;
  f.p = p;
  f.lu.resize(n * n);
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.perm[i] = i;
    for (std::size_t j = 0; j < n; ++j) f.lu[i * n + j] = reduce_mod(az(i, j), p);
  }
  std::uint64_t det = 1;
  auto at = [&](std::size_t i, std::size_t j) -> std::uint64_t& {
    return f.lu[i * n + j];
  };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t i = k; i < n; ++i)
      if (at(i, k) != 0) {
        piv = i;
        break;
      }
    if (piv == n) {
      f.det = 0;
      return f;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      det = p - det;
      if (det == p) det = 0;
    }
    const std::uint64_t pivot = at(k, k);
    det = mulmod(det, pivot, p);
    const std::uint64_t inv = powmod(pivot, p - 2, p);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (at(i, k) == 0) continue;
      const std::uint64_t factor = mulmod(at(i, k), inv, p);
      at(i, k) = factor;  // store L
      for (std::size_t j = k + 1; j < n; ++j) {
        std::uint64_t sub = mulmod(factor, at(k, j), p);
        std::uint64_t v = at(i, j);
        at(i, j) = v >= sub ? v - sub : v + p - sub;
      }
    }
  }
  f.det = det;
  return f;
}

std::vector<std::uint64_t> lu_solve_mod(const FpLU& f,
                                        const std::vector<std::uint64_t>& b) {
  const std::size_t n = f.n;
  const std::uint64_t p = f.p;
  std::vector<std::uint64_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[f.perm[i]];
  // forward: L y' = y (unit diagonal)
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t acc = y[i];
    for (std::size_t j = 0; j < i; ++j) {
      std::uint64_t sub = mulmod(f.lu[i * n + j], y[j], p);
      acc = acc >= sub ? acc - sub : acc + p - sub;
    }
    y[i] = acc;
  }
  // backward: U x = y'
  for (std::size_t ii = n; ii-- > 0;) {
    std::uint64_t acc = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) {
      std::uint64_t sub = mulmod(f.lu[ii * n + j], y[j], p);
      acc = acc >= sub ? acc - sub : acc + p - sub;
    }
    y[ii] = mulmod(acc, powmod(f.lu[ii * n + ii], p - 2, p), p);
  }
  return y;
}

// Garner-style incremental CRT over a shared prime list. residues[i][e] is the
// e-th entry's residue mod primes[i]. Returns symmetric lifts.
std::vector<Integer> crt_lift(const std::vector<std::uint64_t>& primes,
                              const std::vector<std::vector<std::uint64_t>>& residues,
                              std::size_t entries) {
  std::vector<Integer> x(entries, Integer(0));
  Integer big_p(1);
  for (std::size_t pi = 0; pi < primes.size(); ++pi) {
    const std::uint64_t p = primes[pi];
    const std::uint64_t pmod = mpz_fdiv_ui(big_p.get_mpz_t(), p);
    const std::uint64_t pinv = powmod(pmod, p - 2, p);
    for (std::size_t e = 0; e < entries; ++e) {
      const std::uint64_t xr = mpz_fdiv_ui(x[e].get_mpz_t(), p);
      std::uint64_t delta = residues[pi][e] >= xr
                                ? residues[pi][e] - xr
                                : residues[pi][e] + p - xr;
      delta = mulmod(delta, pinv, p);
      x[e] += big_p * Integer(static_cast<unsigned long>(delta));
    }
    big_p *= Integer(static_cast<unsigned long>(p));
  }
  Integer half = big_p / 2;
  for (auto& v : x)
    if (v > half) v -= big_p;
  return x;
}

std::vector<std::uint64_t> deterministic_primes(std::size_t count,
                                                std::uint64_t salt) {
  std::mt19937_64 rng(0x9E3779B97F4A7C15ull ^ salt);
  std::vector<std::uint64_t> primes;
  primes.reserve(count);
  while (primes.size() < count) {
    std::uint64_t p = random_prime_62(rng);
    if (std::find(primes.begin(), primes.end(), p) == primes.end())
      primes.push_back(p);
  }
  return primes;
}

double vector_log2_bound(const std::vector<Integer>& v) {
  double maxbits = 0;
  for (const auto& z : v) maxbits = std::max(maxbits, log2_bound(z));
  return maxbits + 0.5 * std::log2(static_cast<double>(v.size()) + 1.0) + 1.0;
}

}  // namespace

ExactSolver::ExactSolver(const Matrix<Rational>& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("ExactSolver: matrix must be square");
  n_ = a.rows();
  auto [az, scale] = clear_denominators(a);
  az_ = std::move(az);
  row_scale_ = std::move(scale);

  col_log2_.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double maxbits = 0;
    for (std::size_t i = 0; i < n_; ++i)
      maxbits = std::max(maxbits, log2_bound(az_(i, j)));
    col_log2_[j] = maxbits + 0.5 * std::log2(static_cast<double>(n_) + 1.0) + 1.0;
  }
  det_bound_log2_ = 0;
  for (double c : col_log2_) det_bound_log2_ += c;

  const std::size_t count =
      static_cast<std::size_t>(det_bound_log2_ / 61.0) + 2;
  auto primes = deterministic_primes(count, n_);
  std::vector<std::vector<std::uint64_t>> residues(
      primes.size(), std::vector<std::uint64_t>(1));
  parallel_for(primes.size(), [&](std::size_t pi) {
    FpLU f = lu_factor_mod(az_, primes[pi]);
    residues[pi][0] = f.det;
  });
  det_az_ = crt_lift(primes, residues, 1)[0];
  Integer s(1);
  for (const auto& f : row_scale_) s *= f;
  det_ = rat(det_az_, s);
}

std::vector<std::vector<Rational>> ExactSolver::solve(
    const std::vector<std::vector<Rational>>& rhs) const {
  if (singular()) throw std::runtime_error("ExactSolver: singular matrix");
  const std::size_t m = rhs.size();
  // scale each rhs to integers compatible with the cleared matrix
  std::vector<std::vector<Integer>> bz(m, std::vector<Integer>(n_));
  std::vector<Integer> bfac(m, Integer(1));
  double rhs_bound = 0;
  for (std::size_t c = 0; c < m; ++c) {
    if (rhs[c].size() != n_)
      throw std::invalid_argument("ExactSolver::solve: rhs length mismatch");
    std::vector<Rational> scaled(n_);
    Integer l(1);
    for (std::size_t i = 0; i < n_; ++i) {
      scaled[i] = rhs[c][i] * Rational(row_scale_[i]);
      scaled[i].canonicalize();
      Integer den = scaled[i].get_den();
      Integer g;
      mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
      l = l / g * den;
    }
    bfac[c] = l;
    for (std::size_t i = 0; i < n_; ++i) {
      Rational v = scaled[i] * Rational(l);
      v.canonicalize();
      bz[c][i] = v.get_num();
    }
    rhs_bound = std::max(rhs_bound, vector_log2_bound(bz[c]));
  }
  double min_col = col_log2_[0];
  for (double c : col_log2_) min_col = std::min(min_col, c);
  const double num_bound = det_bound_log2_ - min_col + rhs_bound;
  const std::size_t count = static_cast<std::size_t>(
                                std::max(num_bound, det_bound_log2_) / 61.0) +
                            2;
  auto primes = deterministic_primes(count, n_ * 1315423911ull + m);

  const std::size_t entries = m * n_;
  std::vector<std::vector<std::uint64_t>> residues(
      primes.size(), std::vector<std::uint64_t>(entries, 0));
  std::vector<char> good(primes.size(), 0);
  parallel_for(primes.size(), [&](std::size_t pi) {
    const std::uint64_t p = primes[pi];
    FpLU f = lu_factor_mod(az_, p);
    if (f.det == 0) return;  // unlucky prime, dropped below
    good[pi] = 1;
    const std::uint64_t detp = f.det;
    std::vector<std::uint64_t> b(n_);
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t i = 0; i < n_; ++i) b[i] = reduce_mod(bz[c][i], p);
      auto x = lu_solve_mod(f, b);
      for (std::size_t i = 0; i < n_; ++i)
        residues[pi][c * n_ + i] = mulmod(x[i], detp, p);
    }
  });
  std::vector<std::uint64_t> kept_primes;
  std::vector<std::vector<std::uint64_t>> kept_res;
  for (std::size_t pi = 0; pi < primes.size(); ++pi) {
    if (!good[pi]) continue;
    kept_primes.push_back(primes[pi]);
    kept_res.push_back(std::move(residues[pi]));
  }
  // top up if unlucky primes reduced coverage below the bound
  double have = 61.0 * static_cast<double>(kept_primes.size());
  std::uint64_t extra_salt = 0xD1B54A32D192ED03ull;
  while (have < std::max(num_bound, det_bound_log2_) + 64.0) {
    auto more = deterministic_primes(kept_primes.size() + 4, extra_salt++);
    for (auto p : more) {
      if (std::find(kept_primes.begin(), kept_primes.end(), p) !=
          kept_primes.end())
        continue;
      FpLU f = lu_factor_mod(az_, p);
      if (f.det == 0) continue;
      std::vector<std::uint64_t> res(entries, 0);
      std::vector<std::uint64_t> b(n_);
      for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n_; ++i) b[i] = reduce_mod(bz[c][i], p);
        auto x = lu_solve_mod(f, b);
        for (std::size_t i = 0; i < n_; ++i)
          res[c * n_ + i] = mulmod(x[i], f.det, p);
      }
      kept_primes.push_back(p);
      kept_res.push_back(std::move(res));
      have += 61.0;
      if (have >= std::max(num_bound, det_bound_log2_) + 64.0) break;
    }
  }
  auto nums = crt_lift(kept_primes, kept_res, entries);
  std::vector<std::vector<Rational>> out(m, std::vector<Rational>(n_));
  for (std::size_t c = 0; c < m; ++c) {
    Integer denom = det_az_ * bfac[c];
    for (std::size_t i = 0; i < n_; ++i) out[c][i] = rat(nums[c * n_ + i], denom);
  }
  return out;
}

Matrix<Rational> ExactSolver::inverse() const {
  std::vector<std::vector<Rational>> rhs(n_, std::vector<Rational>(n_, Rational(0)));
  for (std::size_t i = 0; i < n_; ++i) rhs[i][i] = 1;
  auto cols = solve(rhs);
  Matrix<Rational> inv(n_, n_);
  for (std::size_t c = 0; c < n_; ++c)
    for (std::size_t i = 0; i < n_; ++i) inv(i, c) = cols[c][i];
  return inv;
}

}  // namespace crfem
