#ifndef CRFEM_RATIONAL_HPP
#define CRFEM_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crfem {

/// Exact rational scalar used throughout the library. Floating point appears
/// only in the finite-difference cross checks of the test suite.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational rat(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p/q" or "p" (base 10).
inline Rational rational_from_string(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("cannot parse rational: '" + s + "'");
  if (q.get_den() == 0)
    throw std::invalid_argument("zero denominator in rational: '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Integer factorial_int(unsigned n) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

inline Rational rational_pow(const Rational& base, unsigned e) {
  Rational out(1);
  Rational b = base;
  while (e) {
    if (e & 1u) out *= b;
    b *= b;
    e >>= 1u;
  }
  return out;
}

/// Upper bound on log2|z|; returns 0 for z == 0.
inline double log2_bound(const Integer& z) {
  if (z == 0) return 0.0;
  return static_cast<double>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

using Vector = std::vector<Rational>;  // rational coordinate vector

inline Rational dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace crfem

#endif
