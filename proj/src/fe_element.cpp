#include "crfem/fe_element.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace crfem {

namespace {

// All (t+1)-subsets of the labels, ascending lexicographic by id tuple.
std::vector<IndexSet> subsets_of_dim(const IndexSet& labels, int t) {
  std::vector<IndexSet> out;
  const std::size_t n = labels.card();
  const std::size_t pick = static_cast<std::size_t>(t) + 1;
  if (pick > n) return out;
  std::vector<std::size_t> idx(pick);
  for (std::size_t i = 0; i < pick; ++i) idx[i] = i;
  for (;;) {
    std::vector<int> ids;
    for (auto i : idx) ids.push_back(labels.label(i));
    out.emplace_back(std::move(ids));
    std::size_t i = pick;
    bool advanced = false;
    while (i-- > 0) {
      if (idx[i] + (pick - i) <= n - 1) {
        ++idx[i];
        for (std::size_t j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return out;
}

MultiIndex theta_as_multiindex(const IndexSet& N, const std::vector<int>& theta) {
  return MultiIndex(N, theta);  // slot j corresponds to the j-th smallest label
}

}  // namespace

FeElement::FeElement(Simplex simplex, SmoothnessVector r, int k)
    : simplex_(std::move(simplex)), r_(std::move(r)), k_(k) {
  const int d = simplex_.dim();
  if (r_.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("fe element: r must have length d");
  std::string why = assumption_violation(r_, k_);
  if (!why.empty())
    throw std::invalid_argument("fe element: assumption violated: " + why);

  const IndexSet& labels = simplex_.labels();
  monomials_ = enumerate_sigma(labels, k_);

  for (int t = 0; t <= d; ++t) {
    const int m = d - t;
    for (const IndexSet& owner : subsets_of_dim(labels, t)) {
      IndexSet N = labels.set_minus(owner);
      if (m > 0) {
        NormalFrame fr = perpendicular_frame(simplex_, N);
        std::vector<Vector> rows;
        for (const auto& vec : fr.vectors)
          rows.push_back(simplex_.derivative_weights(vec));
        frames_.emplace(owner, std::move(fr));
        weight_rows_.emplace(owner, std::move(rows));
        const int rm = r_.at(m);
        for (int td = 0; td <= rm; ++td) {
          SmoothnessVector q = q_vector(r_, m, td);
          auto weights = enumerate_sigma0(owner, k_ - td, q);
          for (const auto& theta : enumerate_sigma(IndexSet::range(m), td)) {
            for (const auto& sigma : weights) {
              FeDof dof;
              dof.owner = owner;
              dof.normal_set = N;
              dof.theta = theta.entries;
              dof.sigma = sigma;
              dof.alpha =
                  extend_from(theta_as_multiindex(N, theta.entries), sigma, r_);
              dofs_.push_back(std::move(dof));
            }
          }
        }
      } else {
        weight_rows_.emplace(owner, std::vector<Vector>{});
        for (const auto& sigma : enumerate_sigma0(owner, k_, r_)) {
          FeDof dof;
          dof.owner = owner;
          dof.normal_set = IndexSet{};
          dof.sigma = sigma;
          dof.alpha = sigma;
          dofs_.push_back(std::move(dof));
        }
      }
    }
  }
  if (dofs_.size() != monomials_.size())
    throw std::logic_error("fe element: DOF count != dim P_k");
}

const NormalFrame& FeElement::frame(const IndexSet& owner) const {
  auto it = frames_.find(owner);
  if (it == frames_.end())
    throw std::invalid_argument("no frame for this owner (interior has none)");
  return it->second;
}

const ExactSolver& FeElement::solver() const {
  if (!solver_) {
    Matrix<Rational> v = vandermonde<Rational>();
    solver_ = std::make_unique<ExactSolver>(v);
  }
  return *solver_;
}

UnisolvencyCertificate FeElement::check_unisolvent(bool exact,
                                                   std::mt19937_64& rng) const {
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
      continue;  // prime collided with a denominator; resample
    }
  }
  // singular modulo several primes: settle it exactly
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

std::vector<BaryPoly<Rational>> FeElement::dual_basis() const {
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

std::vector<BaryPoly<Rational>> FeElement::solve_from_dof_values(
    const std::vector<std::vector<Rational>>& values) const {
  const ExactSolver& s = solver();
  if (s.singular()) throw std::runtime_error("solve on singular element");
  auto coeffs = s.solve(values);
  std::vector<BaryPoly<Rational>> out;
  for (const auto& c : coeffs) {
    BaryPoly<Rational> p = BaryPoly<Rational>::zero(simplex_.labels(), k_);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      p += BaryPoly<Rational>::monomial(monomials_[i], c[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Rational> FeElement::dof_values(const BaryPoly<Rational>& u) const {
  std::vector<Rational> out;
  out.reserve(dofs_.size());
  for (const auto& dof : dofs_) out.push_back(apply(dof, u));
  return out;
}

BaryPoly<Rational> lambda_derivative(const Simplex& simplex,
                                     const BaryPoly<Rational>& p,
                                     const IndexSet& N,
                                     const std::vector<int>& theta) {
  if (theta.size() != N.card())
    throw std::invalid_argument("lambda_derivative: theta must match N");
  BaryPoly<Rational> w = p;
  if (N.empty()) return w;
  auto duals = dual_lambda_frame(simplex, N);
  for (std::size_t i = 0; i < N.card(); ++i) {
    if (theta[i] == 0) continue;
    Vector weights = simplex.derivative_weights(duals[i]);
    for (int rep = 0; rep < theta[i]; ++rep) w = w.derivative(weights);
  }
  return w;
}

Rational FeElement::apply_phi_alpha(const MultiIndex& alpha,
                                    const BaryPoly<Rational>& p) const {
  Classification c = classify_primal(alpha, r_);
  std::vector<int> theta;
  for (int l : c.N) theta.push_back(alpha.entry(l));
  BaryPoly<Rational> tr = lambda_derivative(simplex_, p, c.N, theta).trace(c.Delta);
  std::vector<int> sigma;
  for (int l : c.Delta) sigma.push_back(alpha.entry(l));
  return normalized_moment(
      tr, BaryPoly<Rational>::monomial(c.Delta, std::move(sigma)));
}

// ---------------------------------------------------------------------------
// equivalence of the two DOF definitions
// ---------------------------------------------------------------------------

namespace {

struct Block {
  IndexSet N;
  int n = 0;
  std::vector<MultiIndex> members;
};

std::vector<Block> refined_blocks(const FeElement& el) {
  std::map<std::pair<IndexSet, int>, std::vector<MultiIndex>> grouped;
  for (const auto& alpha : el.monomials()) {
    Classification c = classify_primal(alpha, el.smoothness());
    grouped[{c.N, c.n}].push_back(alpha);
  }
  std::vector<Block> blocks;
  for (auto& [key, members] : grouped)
    blocks.push_back(Block{key.first, key.second, std::move(members)});
  // linear extension of the block order: larger N first, then n ascending
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.N.card() != b.N.card()) return a.N.card() > b.N.card();
    if (a.N != b.N) return a.N < b.N;
    return a.n < b.n;
  });
  return blocks;
}

// rows of functionals applied to every monomial column
Matrix<Rational> functional_rows(
    const FeElement& el,
    const std::vector<std::function<Rational(const BaryPoly<Rational>&)>>& fns) {
  const auto& cols = el.monomials();
  Matrix<Rational> m(fns.size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    BaryPoly<Rational> mono = BaryPoly<Rational>::monomial(cols[c]);
    for (std::size_t r = 0; r < fns.size(); ++r) m(r, c) = fns[r](mono);
  }
  return m;
}

}  // namespace

EquivalenceReport phi_equivalence_check(const FeElement& el) {
  EquivalenceReport report;
  std::map<MultiIndex, const FeDof*> by_alpha;
  for (const auto& dof : el.dofs()) by_alpha.emplace(dof.alpha, &dof);

  std::mt19937_64 rng(0xA5A5A5A5ull);
  for (const auto& block : refined_blocks(el)) {
    // per-block: both families span the same functional space
    std::vector<std::function<Rational(const BaryPoly<Rational>&)>> fns;
    for (const auto& alpha : block.members) {
      const FeDof* dof = by_alpha.at(alpha);
      fns.push_back([&el, dof](const BaryPoly<Rational>& p) {
        return el.apply(*dof, p);
      });
    }
    for (const auto& alpha : block.members)
      fns.push_back([&el, alpha](const BaryPoly<Rational>& p) {
        return el.apply_phi_alpha(alpha, p);
      });
    Matrix<Rational> stacked = functional_rows(el, fns);
    const std::size_t want = block.members.size();
    Matrix<Rational> top(want, stacked.cols());
    Matrix<Rational> bottom(want, stacked.cols());
    for (std::size_t c = 0; c < stacked.cols(); ++c)
      for (std::size_t r = 0; r < want; ++r) {
        top(r, c) = stacked(r, c);
        bottom(r, c) = stacked(r + want, c);
      }
    std::size_t rank_top = rank_with_modular_fast_path(top, want, rng);
    std::size_t rank_bottom = rank_with_modular_fast_path(bottom, want, rng);
    std::size_t rank_stacked = rank_with_modular_fast_path(stacked, want, rng);
    if (rank_top != want || rank_bottom != want || rank_stacked != want) {
      report.ok = false;
      std::ostringstream os;
      os << "span mismatch on block N={";
      for (int l : block.N) os << l << " ";
      os << "} n=" << block.n << ": ranks " << rank_top << "/" << rank_bottom
         << "/" << rank_stacked << " want " << want;
      report.failure = os.str();
      return report;
    }
    ++report.blocks_checked;

    // per-slice: fixed sigma, change of basis between the theta derivatives
    if (!block.N.empty()) {
      std::map<std::vector<int>, std::vector<MultiIndex>> slices;
      for (const auto& alpha : block.members) {
        std::vector<int> sigma;
        IndexSet delta = alpha.labels.set_minus(block.N);
        for (int l : delta) sigma.push_back(alpha.entry(l));
        slices[sigma].push_back(alpha);
      }
      for (const auto& [sigma, members] : slices) {
        std::vector<std::function<Rational(const BaryPoly<Rational>&)>> sf;
        for (const auto& alpha : members) {
          const FeDof* dof = by_alpha.at(alpha);
          sf.push_back([&el, dof](const BaryPoly<Rational>& p) {
            return el.apply(*dof, p);
          });
        }
        for (const auto& alpha : members)
          sf.push_back([&el, alpha](const BaryPoly<Rational>& p) {
            return el.apply_phi_alpha(alpha, p);
          });
        Matrix<Rational> stacked_slice = functional_rows(el, sf);
        std::size_t want_slice = members.size();
        if (rank_with_modular_fast_path(stacked_slice, want_slice, rng) !=
            want_slice) {
          report.ok = false;
          report.failure = "slice change of basis not invertible";
          return report;
        }
        ++report.slices_checked;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// block triangularity in the normal-monomial basis
// ---------------------------------------------------------------------------

BlockTriangularReport block_triangularity_check(const FeElement& el) {
  BlockTriangularReport report;
  const auto blocks = refined_blocks(el);
  report.blocks = static_cast<int>(blocks.size());
  std::map<MultiIndex, const FeDof*> by_alpha;
  for (const auto& dof : el.dofs()) by_alpha.emplace(dof.alpha, &dof);
  const Simplex& sx = el.simplex();
  const IndexSet& labels = sx.labels();

  // normal-monomial columns Lambda_nor(beta), built per block
  std::vector<std::vector<BaryPoly<Rational>>> columns(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    for (const auto& beta : blk.members) {
      BaryPoly<Rational> col = BaryPoly<Rational>::monomial(
          MultiIndex(labels, std::vector<int>(labels.card(), 0)));
      if (!blk.N.empty()) {
        const IndexSet owner = labels.set_minus(blk.N);
        const NormalFrame& fr = el.frame(owner);
        // nu_i = n_i . (x - x_base) with x_base on the owner, so nu_i vanishes
        // there and is supported on the lambda_j with j in N
        const Vector& base = sx.vertex(owner.label(0));
        for (std::size_t slot = 0; slot < blk.N.card(); ++slot) {
          const int e = beta.entry(blk.N.label(slot));
          if (e == 0) continue;
          std::vector<Rational> values;
          for (int l : labels) {
            Vector rel(base.size());
            for (std::size_t c = 0; c < base.size(); ++c)
              rel[c] = sx.vertex(l)[c] - base[c];
            values.push_back(dot(fr.vectors[slot], rel));
          }
          BaryPoly<Rational> nu_poly = BaryPoly<Rational>::affine(labels, values);
          for (int rep = 0; rep < e; ++rep) col = col * nu_poly;
        }
      }
      std::vector<int> delta_part(labels.card(), 0);
      IndexSet delta = labels.set_minus(blk.N);
      for (int l : delta)
        delta_part[labels.position(l)] = beta.entry(l);
      col = col * BaryPoly<Rational>::monomial(labels, delta_part);
      columns[b].push_back(col.homogenize_to(el.degree()));
    }
  }

  for (std::size_t rb = 0; rb < blocks.size(); ++rb) {
    const Block& rowb = blocks[rb];
    for (std::size_t cb = 0; cb < blocks.size(); ++cb) {
      const Block& colb = blocks[cb];
      const bool allowed_nonzero =
          (colb.N == rowb.N && colb.n <= rowb.n) ||
          (rowb.N != colb.N && rowb.N.subset_of(colb.N));
      if (allowed_nonzero) continue;
      for (const auto& alpha : rowb.members) {
        const FeDof* dof = by_alpha.at(alpha);
        for (const auto& col : columns[cb]) {
          Rational v = el.apply(*dof, col);
          ++report.zero_pairs_checked;
          if (v != 0) {
            report.ok = false;
            report.failure = "predicted-zero block has nonzero entry at alpha=" +
                             alpha.str();
            return report;
          }
        }
      }
    }
  }

  // diagonal blocks: per-theta slices are scaled Gram matrices, PD exactly
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    std::map<std::vector<int>, std::vector<std::size_t>> by_theta;
    for (std::size_t i = 0; i < blk.members.size(); ++i) {
      std::vector<int> theta;
      for (int l : blk.N) theta.push_back(blk.members[i].entry(l));
      by_theta[theta].push_back(i);
    }
    for (const auto& [theta, idxs] : by_theta) {
      // cross-theta entries within the block must vanish
      for (std::size_t i : idxs) {
        const FeDof* dof = by_alpha.at(blk.members[i]);
        for (std::size_t j = 0; j < blk.members.size(); ++j) {
          std::vector<int> theta_j;
          for (int l : blk.N) theta_j.push_back(blk.members[j].entry(l));
          if (theta_j == theta) continue;
          Rational v = el.apply(*dof, columns[b][j]);
          ++report.zero_pairs_checked;
          if (v != 0) {
            report.ok = false;
            report.failure = "cross-theta entry nonzero inside block";
            return report;
          }
        }
      }
      // the diagonal slice equals c_theta * Gram of the weight monomials
      Rational c_theta(1);
      if (!blk.N.empty()) {
        const NormalFrame& fr = el.frame(labels.set_minus(blk.N));
        for (std::size_t slot = 0; slot < theta.size(); ++slot) {
          c_theta *= Rational(factorial_int(static_cast<unsigned>(theta[slot])));
          Rational len2 = dot(fr.vectors[slot], fr.vectors[slot]);
          c_theta *= rational_pow(len2, static_cast<unsigned>(theta[slot]));
        }
      }
      const std::size_t nslice = idxs.size();
      Matrix<Rational> slice(nslice, nslice);
      Matrix<Rational> gram(nslice, nslice);
      IndexSet delta = labels.set_minus(blk.N);
      for (std::size_t a = 0; a < nslice; ++a) {
        const FeDof* dof = by_alpha.at(blk.members[idxs[a]]);
        for (std::size_t c = 0; c < nslice; ++c) {
          slice(a, c) = el.apply(*dof, columns[b][idxs[c]]);
          std::vector<int> ea, ec;
          for (int l : delta) {
            ea.push_back(blk.members[idxs[a]].entry(l));
            ec.push_back(blk.members[idxs[c]].entry(l));
          }
          gram(a, c) = normalized_moment(
              BaryPoly<Rational>::monomial(delta, ea),
              BaryPoly<Rational>::monomial(delta, ec));
        }
      }
      for (std::size_t a = 0; a < nslice; ++a)
        for (std::size_t c = 0; c < nslice; ++c) {
          Rational want = c_theta * gram(a, c);
          if (slice(a, c) != want) {
            report.ok = false;
            report.failure = "diagonal slice is not the scaled Gram matrix";
            return report;
          }
        }
      auto minors = leading_principal_minors(gram);
      for (const auto& mnr : minors)
        if (mnr <= 0) {
          report.ok = false;
          report.failure = "Gram diagonal block not positive definite";
          return report;
        }
      ++report.gram_blocks_checked;
    }
  }
  return report;
}

}  // namespace crfem
