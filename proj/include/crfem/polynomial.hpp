#ifndef CRFEM_POLYNOMIAL_HPP
#define CRFEM_POLYNOMIAL_HPP

#include <map>
#include <sstream>
#include <vector>

#include "crfem/field.hpp"
#include "crfem/multiindex.hpp"
#include "crfem/rational.hpp"

namespace crfem {

/// Polynomial in the barycentric coordinates of an index set, stored
/// homogeneously: all monomials share one degree (lifting by powers of
/// sum(lambda) = 1), zero coefficients pruned.
template <class S>
class BaryPoly {
 public:
  BaryPoly() = default;
  BaryPoly(IndexSet labels, int degree)
      : labels_(std::move(labels)), degree_(degree) {}

  static BaryPoly zero(IndexSet labels, int degree = 0) {
    return BaryPoly(std::move(labels), degree);
  }

  static BaryPoly monomial(IndexSet labels, std::vector<int> exps,
                           S coeff = FieldOps<S>::one()) {
    BaryPoly p(std::move(labels), 0);
    if (exps.size() != p.labels_.card())
      throw std::invalid_argument("monomial exponent count mismatch");
    int deg = 0;
    for (int e : exps) {
      if (e < 0) throw std::invalid_argument("negative monomial exponent");
      deg += e;
    }
    p.degree_ = deg;
    if (!FieldOps<S>::is_zero(coeff)) p.terms_[std::move(exps)] = std::move(coeff);
    return p;
  }

  static BaryPoly monomial(const MultiIndex& alpha,
                           S coeff = FieldOps<S>::one()) {
    return monomial(alpha.labels, alpha.entries, std::move(coeff));
  }

  /// Affine function given by its vertex values: sum values_i * lambda_i.
  static BaryPoly affine(IndexSet labels, const std::vector<S>& values) {
    BaryPoly p(labels, 1);
    if (values.size() != labels.card())
      throw std::invalid_argument("affine value count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (FieldOps<S>::is_zero(values[i])) continue;
      std::vector<int> e(labels.card(), 0);
      e[i] = 1;
      p.terms_[std::move(e)] = values[i];
    }
    return p;
  }

  const IndexSet& labels() const { return labels_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<std::vector<int>, S>& terms() const { return terms_; }

  S coefficient(const std::vector<int>& exps) const {
    auto it = terms_.find(exps);
    return it == terms_.end() ? FieldOps<S>::zero() : it->second;
  }

  BaryPoly& operator+=(const BaryPoly& other) {
    *this = *this + other;
    return *this;
  }

  friend BaryPoly operator+(const BaryPoly& a, const BaryPoly& b) {
    if (a.labels_ != b.labels_)
      throw std::invalid_argument("polynomial index sets differ");
    int deg = std::max(a.degree_, b.degree_);
    BaryPoly x = a.homogenize_to(deg);
    BaryPoly y = b.homogenize_to(deg);
    for (auto& [e, c] : y.terms_) {
      auto it = x.terms_.find(e);
      if (it == x.terms_.end()) {
        x.terms_.emplace(e, c);
      } else {
        it->second += c;
        if (FieldOps<S>::is_zero(it->second)) x.terms_.erase(it);
      }
    }
    return x;
  }

  friend BaryPoly operator-(const BaryPoly& a, const BaryPoly& b) {
    return a + b.scaled(FieldOps<S>::from_int(-1));
  }

  friend BaryPoly operator*(const BaryPoly& a, const BaryPoly& b) {
    if (a.labels_ != b.labels_)
      throw std::invalid_argument("polynomial index sets differ");
    BaryPoly out(a.labels_, a.degree_ + b.degree_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        std::vector<int> e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        S prod = ca * cb;
        auto it = out.terms_.find(e);
        if (it == out.terms_.end()) {
          if (!FieldOps<S>::is_zero(prod)) out.terms_.emplace(std::move(e), std::move(prod));
        } else {
          it->second += prod;
          if (FieldOps<S>::is_zero(it->second)) out.terms_.erase(it);
        }
      }
    }
    return out;
  }

  BaryPoly scaled(const S& f) const {
    BaryPoly out(labels_, degree_);
    if (FieldOps<S>::is_zero(f)) return out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * f);
    return out;
  }

  /// Directional derivative given the chain-rule weights per label,
  /// weights[i] = dlambda_{label i}(v). Exact; degree drops by one.
  BaryPoly derivative(const std::vector<S>& weights) const {
    if (weights.size() != labels_.card())
      throw std::invalid_argument("derivative weight count mismatch");
    BaryPoly out(labels_, degree_ > 0 ? degree_ - 1 : 0);
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0 || FieldOps<S>::is_zero(weights[i])) continue;
        std::vector<int> d = e;
        --d[i];
        S add = c * weights[i] * FieldOps<S>::from_int(e[i]);
        auto it = out.terms_.find(d);
        if (it == out.terms_.end()) {
          if (!FieldOps<S>::is_zero(add)) out.terms_.emplace(std::move(d), std::move(add));
        } else {
          it->second += add;
          if (FieldOps<S>::is_zero(it->second)) out.terms_.erase(it);
        }
      }
    }
    return out;
  }

  /// Restriction onto the sub-simplex of delta: substitutes lambda_i = 0 for
  /// i outside delta and re-expresses over delta's coordinates.
  BaryPoly trace(const IndexSet& delta) const {
    if (!delta.subset_of(labels_))
      throw std::invalid_argument("trace: delta not contained in index set");
    std::vector<std::size_t> keep;
    for (int l : delta) keep.push_back(labels_.position(l));
    BaryPoly out(delta, degree_);
    for (const auto& [e, c] : terms_) {
      int kept = 0;
      for (auto p : keep) kept += e[p];
      if (kept != degree_) continue;  // some dropped label carries an exponent
      std::vector<int> re;
      re.reserve(keep.size());
      for (auto p : keep) re.push_back(e[p]);
      out.terms_.emplace(std::move(re), c);
    }
    return out;
  }

  /// Evaluation at barycentric values aligned with labels().
  S evaluate(const std::vector<S>& bary) const {
    if (bary.size() != labels_.card())
      throw std::invalid_argument("evaluate: coordinate count mismatch");
    S acc = FieldOps<S>::zero();
    for (const auto& [e, c] : terms_) {
      S term = c;
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (int rep = 0; rep < e[i]; ++rep) term = term * bary[i];
      }
      acc = acc + term;
    }
    return acc;
  }

  /// Lifts to degree K multiplying by (sum lambda)^{K - degree}.
  BaryPoly homogenize_to(int K) const {
    if (K < degree_)
      throw std::invalid_argument("cannot homogenize to a lower degree");
    if (K == degree_) return *this;
    BaryPoly unit(labels_, 1);
    for (std::size_t i = 0; i < labels_.card(); ++i) {
      std::vector<int> e(labels_.card(), 0);
      e[i] = 1;
      unit.terms_.emplace(std::move(e), FieldOps<S>::one());
    }
    BaryPoly out = *this;
    for (int i = degree_; i < K; ++i) out = out * unit;
    return out;
  }

  friend bool operator==(const BaryPoly& a, const BaryPoly& b) {
    return (a - b).is_zero();
  }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      if constexpr (std::is_same_v<S, Rational>) os << c.get_str() << "*";
      os << "L";
      for (std::size_t i = 0; i < e.size(); ++i) os << (i ? "," : "(") << e[i];
      os << ")";
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  IndexSet labels_;
  int degree_ = 0;
  std::map<std::vector<int>, S> terms_;
};

/// Mean value of a barycentric monomial over a t-simplex:
/// (1/|S|) int_S prod mu_i^{b_i} = t! prod(b_i!) / (t + sum b_i)!.
/// Geometry-independent; the measure cancels against the normalization.
template <class S>
S normalized_monomial_moment(int t, const std::vector<int>& exps) {
  Integer num = factorial_int(static_cast<unsigned>(t));
  int total = t;
  for (int e : exps) {
    num *= factorial_int(static_cast<unsigned>(e));
    total += e;
  }
  return FieldOps<S>::from_rational(
      rat(num, factorial_int(static_cast<unsigned>(total))));
}

/// (1/|S|) int_S p q over the sub-simplex both polynomials live on.
template <class S>
S normalized_moment(const BaryPoly<S>& p, const BaryPoly<S>& q) {
  if (p.labels() != q.labels())
    throw std::invalid_argument("moment: polynomials on different sub-simplices");
  const int t = static_cast<int>(p.labels().card()) - 1;
  BaryPoly<S> prod = p * q;
  S acc = FieldOps<S>::zero();
  for (const auto& [e, c] : prod.terms())
    acc = acc + c * normalized_monomial_moment<S>(t, e);
  return acc;
}

/// Iterated directional derivative: orders[i] derivatives with weight row
/// weight_rows[i] (one row per direction).
template <class S>
BaryPoly<S> iterated_derivative(BaryPoly<S> p,
                                const std::vector<std::vector<S>>& weight_rows,
                                const std::vector<int>& orders) {
  if (weight_rows.size() != orders.size())
    throw std::invalid_argument("iterated_derivative: arity mismatch");
  for (std::size_t i = 0; i < orders.size(); ++i)
    for (int rep = 0; rep < orders[i]; ++rep) p = p.derivative(weight_rows[i]);
  return p;
}

}  // namespace crfem

#endif
