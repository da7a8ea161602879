#ifndef CRFEM_INTERP_ELEMENT_HPP
#define CRFEM_INTERP_ELEMENT_HPP

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "crfem/fe_element.hpp"  // UnisolvencyCertificate
#include "crfem/geometry.hpp"
#include "crfem/linalg.hpp"
#include "crfem/multiindex.hpp"
#include "crfem/polynomial.hpp"

namespace crfem {

/// Point-derivative functional: a mixed directional derivative evaluated at a
/// barycentric node of the element.
struct PointDerivative {
  Vector node;  // barycentric, aligned with the element labels
  std::vector<std::pair<Vector, int>> directions;  // (direction, order)

  template <class S>
  S apply(const Simplex& simplex, const BaryPoly<S>& p) const {
    BaryPoly<S> w = p;
    for (const auto& [vec, order] : directions) {
      if (order == 0) continue;
      Vector weights = simplex.derivative_weights(vec);
      std::vector<S> wr;
      wr.reserve(weights.size());
      for (const auto& q : weights) wr.push_back(FieldOps<S>::from_rational(q));
      for (int rep = 0; rep < order; ++rep) w = w.derivative(wr);
    }
    std::vector<S> at;
    at.reserve(node.size());
    for (const auto& q : node) at.push_back(FieldOps<S>::from_rational(q));
    return w.evaluate(at);
  }
};

/// One interpolation DOF psi_alpha: outer-normal mixed derivative of order
/// alpha_i per i in N'(alpha) at the Lagrange node of alpha.
struct InterpDof {
  MultiIndex alpha;
  Classification cls;  // dual classification
  PointDerivative fn;
};

/// Barycentric Lagrange node of a dual-classified multi-index, over the index
/// set alpha lives on. Interior classes land on the equi-spaced interior
/// lattice; the vertex class lands on its vertex.
Vector interp_node(const MultiIndex& alpha, const SmoothnessVector& r);

/// Caller-supplied exact derivative oracle: mixed directional derivative of u
/// with the given (direction, order) list, evaluated at the Cartesian point.
using DerivativeOracle = std::function<Rational(
    const Vector& point, const std::vector<std::pair<Vector, int>>& dirs)>;

/// Interpolation element: P_k shape functions with the point-derivative DOFs
/// driven by the dual decomposition.
class InterpElement {
 public:
  InterpElement(Simplex simplex, SmoothnessVector r, int k);

  const Simplex& simplex() const { return simplex_; }
  const SmoothnessVector& smoothness() const { return r_; }
  int degree() const { return k_; }
  const std::vector<InterpDof>& dofs() const { return dofs_; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }

  template <class S>
  Matrix<S> vandermonde() const {
    const std::size_t n = dofs_.size();
    Matrix<S> v(n, n);
    const auto ctx = FieldOps<S>::capture_context();
    parallel_for(n, [&, ctx](std::size_t row) {
      FieldOps<S>::restore_context(ctx);
      for (std::size_t c = 0; c < n; ++c) {
        BaryPoly<S> mono = BaryPoly<S>::monomial(monomials_[c]);
        v(row, c) = dofs_[row].fn.template apply<S>(simplex_, mono);
      }
    });
    return v;
  }

  UnisolvencyCertificate check_unisolvent(bool exact, std::mt19937_64& rng) const;

  std::vector<Rational> dof_values(const BaryPoly<Rational>& u) const;
  std::vector<Rational> dof_values(const DerivativeOracle& oracle) const;

  /// I_K(u) = sum psi_alpha(u) p_alpha; reproduces P_k exactly.
  BaryPoly<Rational> interpolate(const BaryPoly<Rational>& u) const;
  BaryPoly<Rational> interpolate(const DerivativeOracle& oracle) const;
  BaryPoly<Rational> interpolate_values(const std::vector<Rational>& values) const;
  /// Batched variant: one factorization for many DOF-value vectors.
  std::vector<BaryPoly<Rational>> interpolate_values_batch(
      const std::vector<std::vector<Rational>>& values) const;

  std::vector<BaryPoly<Rational>> dual_basis() const;

  /// Trace DOF set Psi_{I,l}: the facet family applied to the l-th derivative
  /// along facet_normal, built under the shifted smoothness p_l. Depends only
  /// on the facet data and the normal vector.
  std::vector<PointDerivative> trace_dof_set(int I, int l,
                                             const Vector& facet_normal) const;

  /// Canonical primitive normal of the facet opposite to vertex I, oriented
  /// outward (away from x_I).
  Vector facet_outward_normal(int I) const;

 private:
  const ExactSolver& solver() const;

  Simplex simplex_;
  SmoothnessVector r_;
  int k_;
  std::vector<InterpDof> dofs_;
  std::vector<MultiIndex> monomials_;
  mutable std::unique_ptr<ExactSolver> solver_;
};

/// Exact rank argument for the linear-representation property: every
/// functional of Psi_{I,l} lies in the row space of the psi_alpha family.
bool trace_representation_check(const InterpElement& el, int I, int l);

/// Factors p = lambda_i^{t0+1} u1 after verifying that the normal derivatives
/// of order 0..t0 vanish on the facet opposite vertex i. Throws, naming the
/// first nonvanishing order, if the precondition fails.
BaryPoly<Rational> factor_power(const BaryPoly<Rational>& p,
                                const Simplex& simplex, int i, int t0);

}  // namespace crfem

#endif
