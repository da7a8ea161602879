#ifndef CRFEM_FIELD_HPP
#define CRFEM_FIELD_HPP

#include <cstdint>
#include <stdexcept>

#include "crfem/rational.hpp"

namespace crfem {

/// Raised when a rational cannot be reduced modulo the current prime (its
/// denominator vanishes) or a zero is inverted. Callers retry with a fresh
/// prime.
struct FpDivisionByZero : std::runtime_error {
  FpDivisionByZero() : std::runtime_error("division by zero in prime field") {}
};

/// Element of Z/pZ for a 62-bit prime p. The modulus is thread-local: each
/// worker sets it before reducing, so independent primes can run in parallel.
class Fp {
 public:
  Fp() : v_(0) {}
  explicit Fp(std::uint64_t reduced) : v_(reduced) {}

  static void set_modulus(std::uint64_t p) { modulus_ = p; }
  static std::uint64_t modulus() { return modulus_; }

  static Fp from_int(long long x) {
    const std::uint64_t p = modulus_;
    long long r = x % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    return Fp(static_cast<std::uint64_t>(r));
  }

  static Fp from_integer(const Integer& z) {
    Integer r = z % Integer(static_cast<unsigned long>(modulus_));
    if (r < 0) r += Integer(static_cast<unsigned long>(modulus_));
    return Fp(r.get_ui());
  }

  static Fp from_rational(const Rational& q) {
    Fp num = from_integer(q.get_num());
    Fp den = from_integer(q.get_den());
    return num * den.inv();
  }

  std::uint64_t value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  friend Fp operator+(Fp a, Fp b) {
    std::uint64_t s = a.v_ + b.v_;
    if (s >= modulus_) s -= modulus_;
    return Fp(s);
  }
  friend Fp operator-(Fp a, Fp b) {
    return Fp(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + modulus_ - b.v_);
  }
  friend Fp operator*(Fp a, Fp b) {
    return Fp(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a.v_) * b.v_) % modulus_));
  }
  friend Fp operator/(Fp a, Fp b) { return a * b.inv(); }
  Fp operator-() const { return Fp(v_ == 0 ? 0 : modulus_ - v_); }
  Fp& operator+=(Fp o) { return *this = *this + o; }
  Fp& operator-=(Fp o) { return *this = *this - o; }
  Fp& operator*=(Fp o) { return *this = *this * o; }
  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
  friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

  Fp inv() const {
    if (v_ == 0) throw FpDivisionByZero();
    // extended Euclid on signed 128-bit intermediates
    long long t = 0, newt = 1;
    long long r = static_cast<long long>(modulus_);
    long long newr = static_cast<long long>(v_);
    while (newr != 0) {
      long long q = r / newr;
      long long tmp = t - q * newt;
      t = newt;
      newt = tmp;
      tmp = r - q * newr;
      r = newr;
      newr = tmp;
    }
    if (t < 0) t += static_cast<long long>(modulus_);
    return Fp(static_cast<std::uint64_t>(t));
  }

 private:
  static thread_local std::uint64_t modulus_;
  std::uint64_t v_;
};

inline thread_local std::uint64_t Fp::modulus_ = 0;

/// Uniform construction interface for the scalar types the polynomial and
/// matrix templates are instantiated with.
template <class S>
struct FieldOps;

template <>
struct FieldOps<Integer> {
  static Integer zero() { return Integer(0); }
  static Integer one() { return Integer(1); }
  static Integer from_int(long long x) { return Integer(static_cast<long>(x)); }
  static bool is_zero(const Integer& x) { return x == 0; }
  static std::uint64_t capture_context() { return 0; }
  static void restore_context(std::uint64_t) {}
};

template <>
struct FieldOps<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(long long x) { return Rational(static_cast<long>(x)); }
  static Rational from_rational(const Rational& q) { return q; }
  static bool is_zero(const Rational& x) { return x == 0; }
  // worker threads carry no state for rationals
  static std::uint64_t capture_context() { return 0; }
  static void restore_context(std::uint64_t) {}
};

template <>
struct FieldOps<Fp> {
  static Fp zero() { return Fp(); }
  static Fp one() { return Fp(1); }
  static Fp from_int(long long x) { return Fp::from_int(x); }
  static Fp from_rational(const Rational& q) { return Fp::from_rational(q); }
  static bool is_zero(const Fp& x) { return x.is_zero(); }
  // propagate the thread-local modulus into worker threads
  static std::uint64_t capture_context() { return Fp::modulus(); }
  static void restore_context(std::uint64_t m) { Fp::set_modulus(m); }
};

template <class S>
concept FieldScalar = requires(S a, S b) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a* b } -> std::convertible_to<S>;
  { FieldOps<S>::zero() } -> std::convertible_to<S>;
};

}  // namespace crfem

#endif
