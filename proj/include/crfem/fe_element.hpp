#ifndef CRFEM_FE_ELEMENT_HPP
#define CRFEM_FE_ELEMENT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "crfem/geometry.hpp"
#include "crfem/linalg.hpp"
#include "crfem/multiindex.hpp"
#include "crfem/polynomial.hpp"

namespace crfem {

/// Moment-of-normal-derivative degree of freedom: on its owner sub-simplex,
/// the mean of the theta-th frame derivative against a weight monomial.
struct FeDof {
  IndexSet owner;          // Delta: global ids of the owning sub-simplex
  IndexSet normal_set;     // N: element labels minus owner
  std::vector<int> theta;  // derivative exponents per frame slot, |theta| <= r_m
  MultiIndex sigma;        // weight exponents over the owner
  MultiIndex alpha;        // provenance in the refined decomposition

  int theta_abs() const {
    int t = 0;
    for (int v : theta) t += v;
    return t;
  }
};

struct UnisolvencyCertificate {
  bool nonsingular = false;
  std::string mode;  // "exact" or "modular"
  std::size_t size = 0;
  Rational det;               // exact mode
  std::uint64_t prime = 0;    // modular mode: certifying prime
  std::size_t rank = 0;       // modular mode
  int primes_tried = 0;
  bool exact_fallback = false;
  std::vector<Rational> kernel;  // witness when exact mode finds singularity
};

/// Conforming element: P_k shape functions with the frame-derivative moment
/// DOFs driven by the primal decomposition.
class FeElement {
 public:
  FeElement(Simplex simplex, SmoothnessVector r, int k);

  const Simplex& simplex() const { return simplex_; }
  const SmoothnessVector& smoothness() const { return r_; }
  int degree() const { return k_; }
  const std::vector<FeDof>& dofs() const { return dofs_; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  const NormalFrame& frame(const IndexSet& owner) const;

  /// Applies one DOF to a polynomial over the element.
  template <class S>
  S apply(const FeDof& dof, const BaryPoly<S>& p) const {
    BaryPoly<S> w = p;
    const auto& rows = weight_rows_.at(dof.owner);
    for (std::size_t slot = 0; slot < dof.theta.size(); ++slot) {
      if (dof.theta[slot] == 0) continue;
      std::vector<S> wr;
      wr.reserve(rows[slot].size());
      for (const auto& q : rows[slot]) wr.push_back(FieldOps<S>::from_rational(q));
      for (int rep = 0; rep < dof.theta[slot]; ++rep) w = w.derivative(wr);
    }
    BaryPoly<S> tr = w.trace(dof.owner);
    return moment_against_monomial(tr, dof.sigma.entries);
  }

  /// Rows = DOFs in enumeration order, columns = monomials (lexicographic).
  template <class S>
  Matrix<S> vandermonde() const {
    const std::size_t n = dofs_.size();
    Matrix<S> v(n, n);
    // rows sharing (owner, theta) reuse one derivative-and-trace pass
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
    std::size_t g = 0;
    while (g < n) {
      std::size_t e = g + 1;
      while (e < n && dofs_[e].owner == dofs_[g].owner &&
             dofs_[e].theta == dofs_[g].theta)
        ++e;
      groups.emplace_back(g, e);
      g = e;
    }
    const auto ctx = FieldOps<S>::capture_context();
    parallel_for(groups.size(), [&, ctx](std::size_t gi) {
      FieldOps<S>::restore_context(ctx);
      const auto [begin, end] = groups[gi];
      const FeDof& head = dofs_[begin];
      const auto& rows = weight_rows_.at(head.owner);
      std::vector<std::vector<S>> wr;
      for (std::size_t slot = 0; slot < head.theta.size(); ++slot) {
        std::vector<S> r;
        for (const auto& q : rows[slot]) r.push_back(FieldOps<S>::from_rational(q));
        wr.push_back(std::move(r));
      }
      for (std::size_t c = 0; c < n; ++c) {
        BaryPoly<S> w = BaryPoly<S>::monomial(monomials_[c]);
        for (std::size_t slot = 0; slot < head.theta.size(); ++slot)
          for (int rep = 0; rep < head.theta[slot]; ++rep)
            w = w.derivative(wr[slot]);
        BaryPoly<S> tr = w.trace(head.owner);
        if (tr.is_zero()) continue;
        for (std::size_t row = begin; row < end; ++row)
          v(row, c) =
              moment_against_monomial(tr, dofs_[row].sigma.entries);
      }
    });
    return v;
  }

  UnisolvencyCertificate check_unisolvent(bool exact, std::mt19937_64& rng) const;

  /// Nodal dual basis p_j with dof_i(p_j) = delta_ij, exactly.
  std::vector<BaryPoly<Rational>> dual_basis() const;

  /// The unique p in P_k with dof_i(p) = values[i], one per value vector.
  std::vector<BaryPoly<Rational>> solve_from_dof_values(
      const std::vector<std::vector<Rational>>& values) const;

  std::vector<Rational> dof_values(const BaryPoly<Rational>& u) const;

  /// Moment of the iterated d/d lambda_i derivative against the Delta part
  /// of alpha (the lambda-derivative flavour of the moment DOFs).
  Rational apply_phi_alpha(const MultiIndex& alpha,
                           const BaryPoly<Rational>& p) const;

 private:
  template <class S>
  static S moment_against_monomial(const BaryPoly<S>& tr,
                                   const std::vector<int>& sigma) {
    const int t = static_cast<int>(tr.labels().card()) - 1;
    S acc = FieldOps<S>::zero();
    std::vector<int> e(sigma.size());
    for (const auto& [exp, c] : tr.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = exp[i] + sigma[i];
      acc = acc + c * normalized_monomial_moment<S>(t, e);
    }
    return acc;
  }

  const ExactSolver& solver() const;

  Simplex simplex_;
  SmoothnessVector r_;
  int k_;
  std::vector<FeDof> dofs_;
  std::vector<MultiIndex> monomials_;
  std::map<IndexSet, NormalFrame> frames_;
  // per owner, per frame slot: dlambda_label(frame vector) for every label
  std::map<IndexSet, std::vector<Vector>> weight_rows_;
  mutable std::unique_ptr<ExactSolver> solver_;
};

/// Iterated d/d lambda_i derivative: theta[j] derivatives along the dual-frame
/// vector of the j-th smallest label of N (dlambda_i(v_j) = delta_ij on N,
/// v_j orthogonal to the complementary sub-simplex).
BaryPoly<Rational> lambda_derivative(const Simplex& simplex,
                                     const BaryPoly<Rational>& p,
                                     const IndexSet& N,
                                     const std::vector<int>& theta);

/// Certifies that the lambda-derivative DOFs and the frame DOFs span each
/// other on every Sigma_{N,n,-sigma} slice and every block.
struct EquivalenceReport {
  bool ok = true;
  int blocks_checked = 0;
  int slices_checked = 0;
  std::string failure;
};
EquivalenceReport phi_equivalence_check(const FeElement& element);

/// Verifies the block structure of the Vandermonde in the normal-monomial
/// basis: blocks above the diagonal in the (N,n) order are exactly zero where
/// trace vanishing predicts, and diagonal theta-slices are scaled Gram
/// matrices, positive definite over the rationals.
struct BlockTriangularReport {
  bool ok = true;
  int blocks = 0;
  long long zero_pairs_checked = 0;
  int gram_blocks_checked = 0;
  std::string failure;
};
BlockTriangularReport block_triangularity_check(const FeElement& element);

}  // namespace crfem

#endif
