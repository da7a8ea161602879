#include "doctest.h"

#include <functional>
#include <random>

#include "crfem/continuity.hpp"

using namespace crfem;

namespace {

using RPoly = BaryPoly<Rational>;

Vector v2(long a, long b) { return Vector{Rational(a), Rational(b)}; }

// unit square split by the diagonal; shared facet has ids {1, 2}
std::pair<Simplex, Simplex> square_pair() {
  Simplex plus({0, 1, 2}, {v2(0, 0), v2(1, 0), v2(0, 1)});
  Simplex minus({3, 1, 2}, {v2(1, 1), v2(1, 0), v2(0, 1)});
  return {plus, minus};
}

std::pair<Simplex, Simplex> tet_pair() {
  auto v3 = [](long a, long b, long c) {
    return Vector{Rational(a), Rational(b), Rational(c)};
  };
  Simplex plus({0, 1, 2, 3}, {v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)});
  Simplex minus({4, 1, 2, 3},
                {v3(1, 1, 1), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)});
  return {plus, minus};
}

// a global polynomial assembled on the labels of the given simplex
RPoly global_poly_on(const Simplex& sx, int degree, std::mt19937_64 rng) {
  IndexSet L = sx.labels();
  const int d = sx.dim();
  std::vector<RPoly> coords;
  for (int c = 0; c < d; ++c) {
    std::vector<Rational> values;
    for (int l : L) values.push_back(sx.vertex(l)[static_cast<std::size_t>(c)]);
    coords.push_back(RPoly::affine(L, values));
  }
  std::uniform_int_distribution<long> num(-5, 5);
  RPoly acc = RPoly::zero(L, 0);
  std::function<void(int, int, RPoly)> rec = [&](int c, int deg_left, RPoly m) {
    if (c == d) {
      acc += m.scaled(rat(num(rng), 1 + (num(rng) & 3)));
      return;
    }
    for (int e = 0; e <= deg_left; ++e) {
      rec(c + 1, deg_left - e, m);
      if (e < deg_left) m = m * coords[static_cast<std::size_t>(c)];
    }
  };
  rec(0, degree, RPoly::monomial(L, std::vector<int>(L.card(), 0)));
  return acc;
}

}  // namespace

TEST_SUITE("continuity") {

TEST_CASE("build_patch") {
  auto [plus, minus] = square_pair();
  Patch p = build_patch(plus, minus);
  CHECK(p.shared == IndexSet({1, 2}));
  CHECK(p.off_plus == 0);
  CHECK(p.off_minus == 3);
  // normal points from K+ toward K-
  Rational toward(0);
  for (std::size_t c = 0; c < 2; ++c)
    toward += p.facet_normal[c] * (minus.centroid()[c] - plus.centroid()[c]);
  CHECK(toward > 0);

  auto [tp, tm] = tet_pair();
  Patch p3 = build_patch(tp, tm);
  CHECK(p3.shared == IndexSet({1, 2, 3}));

  // sharing only an edge is rejected
  Simplex bad({4, 5, 2, 3},
              {Vector{Rational(2), Rational(2), Rational(2)},
               Vector{Rational(3), Rational(2), Rational(2)},
               Vector{Rational(0), Rational(1), Rational(0)},
               Vector{Rational(0), Rational(0), Rational(1)}});
  CHECK_THROWS_AS(build_patch(tp, bad), std::invalid_argument);

  // same-side geometry is rejected: (1,-1) and (0,0) sit on one side
  Simplex same({3, 1, 2}, {v2(1, -1), v2(1, 0), v2(0, 1)});
  CHECK_THROWS_AS(build_patch(plus, same), std::invalid_argument);
}

TEST_CASE("shared FE DOFs") {
  auto [plus, minus] = square_pair();
  Patch patch = build_patch(plus, minus);
  SmoothnessVector r({1, 2});
  FeElement ep(plus, r, 5), em(minus, r, 5);
  auto pairs = shared_dof_map_fe(ep, em, patch);
  CHECK(pairs.size() == 13);  // 2 vertices x 6 + 1 edge moment

  // r = 0 Lagrange: shared DOFs are the facet lattice of functionals
  FeElement lp(plus, SmoothnessVector({0, 0}), 2);
  FeElement lm(minus, SmoothnessVector({0, 0}), 2);
  auto lp_pairs = shared_dof_map_fe(lp, lm, patch);
  CHECK(lp_pairs.size() == 3);  // 2 vertex values + 1 edge moment
}

TEST_CASE("jump_check on a shared global polynomial") {
  auto [plus, minus] = square_pair();
  Patch patch = build_patch(plus, minus);
  std::mt19937_64 rng(3);
  RPoly up = global_poly_on(plus, 4, rng);
  RPoly um = global_poly_on(minus, 4, rng);  // same seed: same global function
  auto jumps = jump_check(up, um, patch, 3);
  for (const auto& j : jumps) CHECK(j.is_zero());
}

TEST_CASE("FE patch trials: zero jumps and sharpness") {
  auto [plus, minus] = square_pair();
  Patch patch = build_patch(plus, minus);
  SmoothnessVector r({1, 2});
  FeElement ep(plus, r, 5), em(minus, r, 5);
  std::mt19937_64 rng(19);
  auto trials = fe_patch_trials(ep, em, patch, rng, 6);
  int sharp = 0;
  for (const auto& jumps : trials) {
    REQUIRE(jumps.size() == 3);  // t = 0, 1, 2
    CHECK(jumps[0].is_zero());
    CHECK(jumps[1].is_zero());
    if (!jumps[2].is_zero()) ++sharp;
  }
  CHECK(sharp > 0);
}

TEST_CASE("interior DOFs do not influence facet jumps") {
  auto [plus, minus] = square_pair();
  Patch patch = build_patch(plus, minus);
  SmoothnessVector r({1, 2});
  FeElement ep(plus, r, 5), em(minus, r, 5);
  auto pairs = shared_dof_map_fe(ep, em, patch);
  std::vector<bool> shared_plus(ep.dofs().size(), false);
  for (const auto& pr : pairs) shared_plus[pr.plus_index] = true;

  std::mt19937_64 rng(23);
  std::vector<Rational> vp(ep.dofs().size()), vm(em.dofs().size());
  for (auto& v : vp) v = random_rational(rng);
  for (auto& v : vm) v = random_rational(rng);
  for (const auto& pr : pairs) vm[pr.minus_index] = vp[pr.plus_index];

  // perturb every non-shared DOF on the plus side, one at a time
  std::vector<std::vector<Rational>> batches{vp};
  for (std::size_t i = 0; i < vp.size(); ++i) {
    if (shared_plus[i]) continue;
    auto copy = vp;
    copy[i] += 1;
    batches.push_back(std::move(copy));
  }
  auto ups = ep.solve_from_dof_values(batches);
  auto um = em.solve_from_dof_values({vm})[0];
  for (const auto& up : ups) {
    auto jumps = jump_check(up, um, patch, r.at(1));
    for (const auto& j : jumps) CHECK(j.is_zero());
  }
}

TEST_CASE("interp family across the facet") {
  auto [plus, minus] = square_pair();
  Patch patch = build_patch(plus, minus);
  SmoothnessVector r({1, 2});
  InterpElement ip(plus, r, 5), im(minus, r, 5);

  // shared trace nodes coincide as geometric points from both sides
  auto tp = shared_trace_map_interp(ip, im, patch);
  CHECK(!tp.empty());
  for (const auto& pair : tp) {
    Vector gp = plus.point_of(pair.plus_fn.node);
    Vector gm = minus.point_of(pair.minus_fn.node);
    CHECK(gp == gm);
  }

  // phi+ = (-1)^l phi- on a shared smooth function
  std::mt19937_64 rng(31);
  RPoly gp_poly = global_poly_on(plus, 7, rng);
  RPoly gm_poly = global_poly_on(minus, 7, rng);
  for (const auto& pair : tp) {
    Rational a = pair.plus_fn.apply<Rational>(plus, gp_poly);
    Rational b = pair.minus_fn.apply<Rational>(minus, gm_poly);
    CHECK(a == Rational(pair.sign) * b);
  }

  // independent interpolation of one global degree-(k+2) polynomial:
  // jumps vanish through r_1, generically not at r_1 + 1
  RPoly up = ip.interpolate(gp_poly);
  RPoly um = im.interpolate(gm_poly);
  auto jumps = jump_check(up, um, patch, r.at(1) + 1);
  CHECK(jumps[0].is_zero());
  CHECK(jumps[1].is_zero());
  CHECK_FALSE(jumps[2].is_zero());
}

}  // TEST_SUITE
