#include "crfem/continuity.hpp"

#include <algorithm>
#include <map>

namespace crfem {

Patch build_patch(const Simplex& plus, const Simplex& minus) {
  const int d = plus.dim();
  if (minus.dim() != d) throw std::invalid_argument("patch: dimension mismatch");
  IndexSet shared = plus.labels().set_minus(
      plus.labels().set_minus(minus.labels()));  // intersection
  if (shared.card() != static_cast<std::size_t>(d))
    throw std::invalid_argument("patch: cells must share exactly d vertex ids");
  for (int l : shared) {
    if (plus.vertex(l) != minus.vertex(l))
      throw std::invalid_argument("patch: shared id " + std::to_string(l) +
                                  " has different coordinates");
  }
  Patch p{plus, minus, shared, 0, 0, {}};
  p.off_plus = plus.labels().set_minus(shared).label(0);
  p.off_minus = minus.labels().set_minus(shared).label(0);

  // opposite sides: the off-vertex of K- must have a negative barycentric
  // coordinate against K+ at the off_plus position
  Vector bary = plus.barycentric(minus.vertex(p.off_minus));
  Rational lam = bary[plus.labels().position(p.off_plus)];
  if (lam == 0) throw std::invalid_argument("patch: degenerate glued geometry");
  if (lam > 0)
    throw std::invalid_argument("patch: cells lie on the same side of the facet");

  // canonical primitive facet normal, oriented from K+ into K-
  NormalFrame fr = perpendicular_frame(plus, IndexSet({p.off_plus}));
  Vector n = fr.vectors[0];
  Vector facet_centroid = plus.subsimplex_centroid(shared);
  Vector minus_centroid = minus.centroid();
  Rational side(0);
  for (std::size_t c = 0; c < n.size(); ++c)
    side += n[c] * (minus_centroid[c] - facet_centroid[c]);
  if (side == 0) throw std::invalid_argument("patch: normal orientation degenerate");
  if (side < 0)
    for (auto& v : n) v = -v;
  p.facet_normal = std::move(n);
  return p;
}

std::vector<SharedFeDof> shared_dof_map_fe(const FeElement& plus,
                                           const FeElement& minus,
                                           const Patch& patch) {
  // key: owner ids + theta + sigma entries
  using Key = std::tuple<IndexSet, std::vector<int>, std::vector<int>>;
  std::map<Key, std::size_t> minus_lookup;
  for (std::size_t i = 0; i < minus.dofs().size(); ++i) {
    const FeDof& dof = minus.dofs()[i];
    if (!dof.owner.subset_of(patch.shared)) continue;
    minus_lookup.emplace(Key{dof.owner, dof.theta, dof.sigma.entries}, i);
  }
  std::vector<SharedFeDof> out;
  for (std::size_t i = 0; i < plus.dofs().size(); ++i) {
    const FeDof& dof = plus.dofs()[i];
    if (!dof.owner.subset_of(patch.shared)) continue;
    auto it = minus_lookup.find(Key{dof.owner, dof.theta, dof.sigma.entries});
    if (it == minus_lookup.end())
      throw std::logic_error("shared DOF has no partner on the minus side");
    out.push_back(SharedFeDof{i, it->second, +1});
    minus_lookup.erase(it);
  }
  if (!minus_lookup.empty())
    throw std::logic_error("unmatched facet DOFs on the minus side");
  return out;
}

std::vector<SharedTracePair> shared_trace_map_interp(const InterpElement& plus,
                                                     const InterpElement& minus,
                                                     const Patch& patch) {
  std::vector<SharedTracePair> out;
  const int r1 = plus.smoothness().at(1);
  for (int l = 0; l <= r1; ++l) {
    auto fp = plus.trace_dof_set(patch.off_plus, l,
                                 plus.facet_outward_normal(patch.off_plus));
    auto fm = minus.trace_dof_set(patch.off_minus, l,
                                  minus.facet_outward_normal(patch.off_minus));
    if (fp.size() != fm.size())
      throw std::logic_error("trace set sizes differ across the facet");
    for (std::size_t i = 0; i < fp.size(); ++i) {
      SharedTracePair pair;
      pair.order_l = l;
      pair.sign = (l % 2 == 0) ? +1 : -1;
      pair.plus_fn = fp[i];
      pair.minus_fn = fm[i];
      out.push_back(std::move(pair));
    }
  }
  return out;
}

std::vector<BaryPoly<Rational>> jump_check(const BaryPoly<Rational>& u_plus,
                                           const BaryPoly<Rational>& u_minus,
                                           const Patch& patch, int t_max) {
  Vector w_plus = patch.plus.derivative_weights(patch.facet_normal);
  Vector w_minus = patch.minus.derivative_weights(patch.facet_normal);
  std::vector<BaryPoly<Rational>> jumps;
  BaryPoly<Rational> dp = u_plus;
  BaryPoly<Rational> dm = u_minus;
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) {
      dp = dp.derivative(w_plus);
      dm = dm.derivative(w_minus);
    }
    jumps.push_back(dp.trace(patch.shared) - dm.trace(patch.shared));
  }
  return jumps;
}

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-100, 100);
  std::uniform_int_distribution<long> den(1, 100);
  return rat(num(rng), den(rng));
}

std::vector<std::vector<BaryPoly<Rational>>> fe_patch_trials(
    const FeElement& plus, const FeElement& minus, const Patch& patch,
    std::mt19937_64& rng, int n_trials) {
  auto pairs = shared_dof_map_fe(plus, minus, patch);
  std::vector<std::vector<Rational>> vp(n_trials), vm(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    vp[t].resize(plus.dofs().size());
    vm[t].resize(minus.dofs().size());
    for (auto& v : vp[t]) v = random_rational(rng);
    for (auto& v : vm[t]) v = random_rational(rng);
    for (const auto& pair : pairs)
      vm[t][pair.minus_index] = vp[t][pair.plus_index] * Rational(pair.sign);
  }
  auto up = plus.solve_from_dof_values(vp);
  auto um = minus.solve_from_dof_values(vm);
  const int r1 = plus.smoothness().at(1);
  std::vector<std::vector<BaryPoly<Rational>>> out;
  out.reserve(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t)
    out.push_back(jump_check(up[t], um[t], patch, r1 + 1));
  return out;
}

}  // namespace crfem
