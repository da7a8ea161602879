#include "crfem/interp_element.hpp"

#include <algorithm>
#include <sstream>

namespace crfem {

Vector interp_node(const MultiIndex& alpha, const SmoothnessVector& r) {
  const std::size_t card = alpha.labels.card();
  Vector node(card, Rational(0));
  if (card == 1) {
    node[0] = 1;  // zero-dimensional index set: the vertex itself
    return node;
  }
  Classification c = classify_dual(alpha, r);
  MultiIndex shifted = dual_node_shift(alpha, r);
  const int s_val = shifted.degree();
  const long denom = s_val + static_cast<long>(c.Delta.card());
  for (std::size_t i = 0; i < c.Delta.card(); ++i) {
    const int l = c.Delta.label(i);
    node[alpha.labels.position(l)] = rat(shifted.entries[i] + 1, denom);
  }
  return node;
}

InterpElement::InterpElement(Simplex simplex, SmoothnessVector r, int k)
    : simplex_(std::move(simplex)), r_(std::move(r)), k_(k) {
  const int d = simplex_.dim();
  if (r_.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("interp element: r must have length d");
  std::string why = assumption_violation(r_, k_);
  if (!why.empty())
    throw std::invalid_argument("interp element: assumption violated: " + why);

  monomials_ = enumerate_sigma(simplex_.labels(), k_);
  for (const auto& alpha : monomials_) {
    InterpDof dof;
    dof.alpha = alpha;
    dof.cls = classify_dual(alpha, r_);
    dof.fn.node = interp_node(alpha, r_);
    for (int i : dof.cls.N) {
      const int order = alpha.entry(i);
      if (order == 0) continue;
      dof.fn.directions.emplace_back(outer_normal(simplex_, dof.cls.Delta, i),
                                     order);
    }
    dofs_.push_back(std::move(dof));
  }
}

const ExactSolver& InterpElement::solver() const {
  if (!solver_) {
    Matrix<Rational> v = vandermonde<Rational>();
    solver_ = std::make_unique<ExactSolver>(v);
  }
  return *solver_;
}

UnisolvencyCertificate InterpElement::check_unisolvent(
    bool exact, std::mt19937_64& rng) const {
  UnisolvencyCertificate cert;
  cert.size = dofs_.size();
  if (exact) {
    cert.mode = "exact";
    const ExactSolver& s = solver();
    cert.det = s.det();
    cert.nonsingular = !s.singular();
    if (!cert.nonsingular) {
      Matrix<Rational> v = vandermonde<Rational>();
      cert.kernel = kernel_vector(std::move(v));
    }
    return cert;
  }
  cert.mode = "modular";
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::uint64_t p = random_prime_62(rng);
    Fp::set_modulus(p);
    ++cert.primes_tried;
    try {
      Matrix<Fp> v = vandermonde<Fp>();
      std::size_t rank = rank_mod(v);
      cert.prime = p;
      cert.rank = rank;
      if (rank == dofs_.size()) {
        cert.nonsingular = true;
        return cert;
      }
    } catch (const FpDivisionByZero&) {
      continue;
    }
  }
  cert.exact_fallback = true;
  const ExactSolver& s = solver();
  cert.det = s.det();
  cert.nonsingular = !s.singular();
  if (!cert.nonsingular) {
    Matrix<Rational> v = vandermonde<Rational>();
    cert.kernel = kernel_vector(std::move(v));
  }
  return cert;
}

std::vector<Rational> InterpElement::dof_values(
    const BaryPoly<Rational>& u) const {
  std::vector<Rational> out;
  out.reserve(dofs_.size());
  for (const auto& dof : dofs_)
    out.push_back(dof.fn.apply<Rational>(simplex_, u));
  return out;
}

std::vector<Rational> InterpElement::dof_values(
    const DerivativeOracle& oracle) const {
  std::vector<Rational> out;
  out.reserve(dofs_.size());
  for (const auto& dof : dofs_) {
    Vector bary = dof.fn.node;
    out.push_back(oracle(simplex_.point_of(bary), dof.fn.directions));
  }
  return out;
}

std::vector<BaryPoly<Rational>> InterpElement::interpolate_values_batch(
    const std::vector<std::vector<Rational>>& values) const {
  const ExactSolver& s = solver();
  if (s.singular()) throw std::runtime_error("interpolate on singular element");
  auto coeff_sets = s.solve(values);
  std::vector<BaryPoly<Rational>> out;
  out.reserve(coeff_sets.size());
  for (const auto& coeffs : coeff_sets) {
    BaryPoly<Rational> p = BaryPoly<Rational>::zero(simplex_.labels(), k_);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0) continue;
      p += BaryPoly<Rational>::monomial(monomials_[i], coeffs[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

BaryPoly<Rational> InterpElement::interpolate_values(
    const std::vector<Rational>& values) const {
  return interpolate_values_batch({values})[0];
}

BaryPoly<Rational> InterpElement::interpolate(const BaryPoly<Rational>& u) const {
  return interpolate_values(dof_values(u));
}

BaryPoly<Rational> InterpElement::interpolate(const DerivativeOracle& oracle) const {
  return interpolate_values(dof_values(oracle));
}

std::vector<BaryPoly<Rational>> InterpElement::dual_basis() const {
  const ExactSolver& s = solver();
  if (s.singular()) throw std::runtime_error("dual basis of singular element");
  Matrix<Rational> inv = s.inverse();
  std::vector<BaryPoly<Rational>> basis;
  const std::size_t n = dofs_.size();
  for (std::size_t j = 0; j < n; ++j) {
    BaryPoly<Rational> p = BaryPoly<Rational>::zero(simplex_.labels(), k_);
    for (std::size_t c = 0; c < n; ++c) {
      if (inv(c, j) == 0) continue;
      p += BaryPoly<Rational>::monomial(monomials_[c], inv(c, j));
    }
    basis.push_back(std::move(p));
  }
  return basis;
}

Vector InterpElement::facet_outward_normal(int I) const {
  NormalFrame fr = perpendicular_frame(simplex_, IndexSet({I}));
  Vector n = fr.vectors[0];
  IndexSet facet = simplex_.labels().set_minus(IndexSet({I}));
  Vector toward = simplex_.subsimplex_centroid(facet);
  const Vector& xi = simplex_.vertex(I);
  Rational side(0);
  for (std::size_t c = 0; c < n.size(); ++c) side += n[c] * (toward[c] - xi[c]);
  if (side < 0)
    for (auto& v : n) v = -v;
  if (side == 0) throw std::logic_error("facet normal orientation degenerate");
  return n;
}

std::vector<PointDerivative> InterpElement::trace_dof_set(
    int I, int l, const Vector& facet_normal) const {
  if (l < 0 || l > r_.at(1))
    throw std::invalid_argument("trace_dof_set: need 0 <= l <= r_1");
  const IndexSet facet = simplex_.labels().set_minus(IndexSet({I}));
  SmoothnessVector p_l = r_.tail_shifted(1, l);
  std::vector<PointDerivative> out;
  for (const auto& beta : enumerate_sigma(facet, k_ - l)) {
    PointDerivative fn;
    Classification c = classify_dual(beta, p_l);
    Vector facet_node = interp_node(beta, p_l);
    fn.node.assign(simplex_.labels().card(), Rational(0));
    for (std::size_t i = 0; i < facet.card(); ++i)
      fn.node[simplex_.labels().position(facet.label(i))] = facet_node[i];
    fn.directions.emplace_back(facet_normal, l);
    for (int j : c.N) {
      const int order = beta.entry(j);
      if (order == 0) continue;
      fn.directions.emplace_back(outer_normal(simplex_, c.Delta, j), order);
    }
    out.push_back(std::move(fn));
  }
  return out;
}

bool trace_representation_check(const InterpElement& el, int I, int l) {
  const auto& monos = el.monomials();
  const std::size_t dim = monos.size();
  auto psi_rows = el.vandermonde<Rational>();
  auto traces = el.trace_dof_set(I, l, el.facet_outward_normal(I));
  Matrix<Rational> stacked(dim + traces.size(), dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) stacked(r, c) = psi_rows(r, c);
  for (std::size_t r = 0; r < traces.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      BaryPoly<Rational> mono = BaryPoly<Rational>::monomial(monos[c]);
      stacked(dim + r, c) = traces[r].apply<Rational>(el.simplex(), mono);
    }
  std::mt19937_64 rng(0xBEEFull + static_cast<std::uint64_t>(I * 131 + l));
  return rank_with_modular_fast_path(stacked, dim, rng) == dim;
}

BaryPoly<Rational> factor_power(const BaryPoly<Rational>& p,
                                const Simplex& simplex, int i, int t0) {
  if (t0 < 0 || t0 >= p.degree())
    throw std::invalid_argument("factor_power: need 0 <= t0 < deg(p)");
  const IndexSet& labels = simplex.labels();
  const IndexSet facet = labels.set_minus(IndexSet({i}));
  NormalFrame fr = perpendicular_frame(simplex, IndexSet({i}));
  Vector weights = simplex.derivative_weights(fr.vectors[0]);
  BaryPoly<Rational> w = p;
  for (int t = 0; t <= t0; ++t) {
    if (!w.trace(facet).is_zero())
      throw std::invalid_argument(
          "factor_power: normal derivative of order " + std::to_string(t) +
          " does not vanish on the facet");
    w = w.derivative(weights);
  }
  // Vanishing through order t0 forces every monomial to carry lambda_i^{t0+1}
  // in the (unique) degree-deg(p) representation; peel the power off.
  const std::size_t pos = labels.position(i);
  BaryPoly<Rational> out = BaryPoly<Rational>::zero(labels, p.degree() - t0 - 1);
  for (const auto& [e, c] : p.terms()) {
    if (e[pos] <= t0)
      throw std::logic_error("factor_power: low-power coefficient survived");
    std::vector<int> shifted = e;
    shifted[pos] -= t0 + 1;
    out += BaryPoly<Rational>::monomial(labels, shifted, c);
  }
  return out;
}

}  // namespace crfem
