#ifndef CRFEM_CONTINUITY_HPP
#define CRFEM_CONTINUITY_HPP

#include <random>
#include <vector>

#include "crfem/fe_element.hpp"
#include "crfem/geometry.hpp"
#include "crfem/interp_element.hpp"

namespace crfem {

/// Two elements sharing a facet. The facet normal is the canonical primitive
/// vector of the shared facet, oriented from K+ into K-; both sides use this
/// one vector for jump computations.
struct Patch {
  Simplex plus;
  Simplex minus;
  IndexSet shared;      // the d common global ids
  int off_plus;         // vertex of K+ opposite the facet
  int off_minus;        // vertex of K- opposite the facet
  Vector facet_normal;  // primitive, from K+ toward K-
};

Patch build_patch(const Simplex& plus, const Simplex& minus);

/// Pairing of the facet-owned FE DOFs of the two elements. The paired
/// functionals are identical (frames are canonical per sub-simplex), so the
/// sign is always +1; it is kept for symmetry with the interp pairing.
struct SharedFeDof {
  std::size_t plus_index;
  std::size_t minus_index;
  int sign;
};
std::vector<SharedFeDof> shared_dof_map_fe(const FeElement& plus,
                                           const FeElement& minus,
                                           const Patch& patch);

/// Pairing of the interp trace families Psi_{I,l} from the two sides, built
/// with each element's outward facet normal: phi_plus = (-1)^l phi_minus.
struct SharedTracePair {
  int order_l;
  int sign;  // (-1)^l
  PointDerivative plus_fn;
  PointDerivative minus_fn;
};
std::vector<SharedTracePair> shared_trace_map_interp(const InterpElement& plus,
                                                     const InterpElement& minus,
                                                     const Patch& patch);

/// Jump polynomials trace_F(d^t u+ / dn^t) - trace_F(d^t u- / dn^t) for
/// t = 0..t_max, computed with the single canonical patch normal. The piecewise
/// function is C^{t_max} across F iff every returned polynomial is zero.
std::vector<BaryPoly<Rational>> jump_check(const BaryPoly<Rational>& u_plus,
                                           const BaryPoly<Rational>& u_minus,
                                           const Patch& patch, int t_max);

/// Random rational with numerator/denominator bounded by 100 (small exact
/// trial data).
Rational random_rational(std::mt19937_64& rng);

/// Consistent-DOF patch trials for the FE family: random DOF vectors with the
/// shared functionals matched, independent elsewhere. All trials are solved in
/// one batch; trial t yields jumps[t][0..r_1+1].
std::vector<std::vector<BaryPoly<Rational>>> fe_patch_trials(
    const FeElement& plus, const FeElement& minus, const Patch& patch,
    std::mt19937_64& rng, int n_trials);

}  // namespace crfem

#endif
