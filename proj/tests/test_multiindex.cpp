#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "crfem/multiindex.hpp"

using namespace crfem;

namespace {

// Literal subset-search classification straight from the set definitions,
// independent of the sorted-prefix shortcut used by the library.
int subset_min_sum(const MultiIndex& a, int size, std::vector<int>* witness) {
  const int n = static_cast<int>(a.entries.size());
  int best = -1;
  std::vector<int> pick(static_cast<std::size_t>(size));
  std::function<void(int, int, int)> rec = [&](int start, int chosen, int sum) {
    if (chosen == size) {
      if (best < 0 || sum < best) {
        best = sum;
        if (witness) {
          witness->clear();
          for (int i = 0; i < size; ++i)
            witness->push_back(a.labels.label(static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])));
        }
      }
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[static_cast<std::size_t>(chosen)] = i;
      rec(i + 1, chosen + 1, sum + a.entries[static_cast<std::size_t>(i)]);
    }
  };
  if (size == 0) return 0;
  rec(0, 0, 0);
  return best;
}

int oracle_primal_s(const MultiIndex& a, const SmoothnessVector& r) {
  const int smax = static_cast<int>(a.labels.card()) - 1;
  for (int s = smax; s >= 1; --s)
    if (subset_min_sum(a, s, nullptr) <= r.at(s)) return s;
  return 0;
}

int oracle_dual_s(const MultiIndex& a, const SmoothnessVector& r) {
  const int smax = static_cast<int>(a.labels.card()) - 1;
  int s = 0;
  while (s < smax && subset_min_sum(a, s + 1, nullptr) <= r.at(s + 1)) ++s;
  return s;
}

MultiIndex mi(std::vector<int> entries) {
  IndexSet d = IndexSet::range(static_cast<int>(entries.size()));
  return MultiIndex(d, std::move(entries));
}

}  // namespace

TEST_SUITE("multiindex") {

TEST_CASE("enumerate_sigma basics") {
  auto list = enumerate_sigma(IndexSet::range(2), 2);
  REQUIRE(list.size() == 3);
  CHECK(list[0].entries == std::vector<int>{2, 0});
  CHECK(list[1].entries == std::vector<int>{1, 1});
  CHECK(list[2].entries == std::vector<int>{0, 2});

  CHECK(enumerate_sigma(IndexSet::range(1), 5).size() == 1);
  CHECK(enumerate_sigma(IndexSet::range(1), 5)[0].entries == std::vector<int>{5});

  CHECK(enumerate_sigma(IndexSet::range(4), 33).size() == 7140);
  CHECK(sigma_cardinality(4, 33) == 7140);

  CHECK_THROWS_AS(enumerate_sigma(IndexSet{}, 2), std::invalid_argument);
}

TEST_CASE("validate_assumption") {
  CHECK(validate_assumption(SmoothnessVector({2, 4}), 9));
  CHECK_FALSE(validate_assumption(SmoothnessVector({1, 3}), 6));
  CHECK(validate_assumption(SmoothnessVector({4, 8, 16}), 33));
  CHECK(assumption_violation(SmoothnessVector({1, 3}), 6) == "k < 2·r_d+1");
  // leading -1 prefix is the L2 convention; -1 after a nonnegative entry fails
  CHECK(validate_assumption(SmoothnessVector({-1, 0}), 3));
  CHECK_FALSE(validate_assumption(SmoothnessVector({0, -1}), 3));
  CHECK_FALSE(validate_assumption(SmoothnessVector({-2, 0}), 3));
}

TEST_CASE("classify_primal worked examples") {
  SmoothnessVector r({2, 4});
  auto c1 = classify_primal(mi({1, 2, 6}), r);
  CHECK(c1.s == 2);
  CHECK(c1.N == IndexSet({0, 1}));
  CHECK(c1.n == 3);
  auto c2 = classify_primal(mi({2, 3, 4}), r);
  CHECK(c2.s == 1);
  CHECK(c2.N == IndexSet({0}));
  CHECK(c2.n == 2);
  auto c3 = classify_primal(mi({3, 3, 3}), r);
  CHECK(c3.s == 0);
  CHECK(c3.N.empty());
  CHECK_THROWS_AS(classify_primal(mi({3, 3}), SmoothnessVector({1, 3})),
                  std::invalid_argument);
}

TEST_CASE("classify_dual worked examples") {
  SmoothnessVector r({3, 6, 14});
  CHECK(classify_dual(mi({0, 7, 7, 16}), r).s == 1);
  CHECK(classify_dual(mi({4, 4, 4, 18}), r).s == 0);
  auto c = classify_dual(mi({30, 0, 0, 0}), r);
  CHECK(c.s == 3);
  CHECK(c.N == IndexSet({1, 2, 3}));
  CHECK(c.n == 0);
}

TEST_CASE("classification matches exhaustive subset oracle") {
  struct Config {
    int d;
    SmoothnessVector r;
    int k;
  };
  std::vector<Config> configs = {{1, SmoothnessVector({1}), 3},
                                 {2, SmoothnessVector({1, 2}), 5},
                                 {2, SmoothnessVector({2, 4}), 9},
                                 {3, SmoothnessVector({1, 2, 4}), 9}};
  for (const auto& cfg : configs) {
    for (const auto& alpha : enumerate_sigma(IndexSet::range(cfg.d + 1), cfg.k)) {
      auto cp = classify_primal(alpha, cfg.r);
      CHECK(cp.s == oracle_primal_s(alpha, cfg.r));
      if (cp.s > 0) {
        std::vector<int> witness;
        subset_min_sum(alpha, cp.s, &witness);
        CHECK(cp.N == IndexSet(witness));
      }
      auto cd = classify_dual(alpha, cfg.r);
      CHECK(cd.s == oracle_dual_s(alpha, cfg.r));
    }
  }
}

TEST_CASE("enumerate_sigma0 worked counts") {
  CHECK(enumerate_sigma0(IndexSet::range(3), 33, SmoothnessVector({8, 16})).size() == 28);
  CHECK(enumerate_sigma0(IndexSet::range(3), 29, SmoothnessVector({4, 12})).size() == 102);
  CHECK(enumerate_sigma0(IndexSet::range(2), 3, SmoothnessVector({1})).empty());
}

TEST_CASE("refined_enumerate and slices") {
  SmoothnessVector r({2, 4});
  IndexSet d3 = IndexSet::range(3);
  MultiIndex theta(IndexSet({0}), {2});
  auto slice = refined_enumerate(IndexSet({0}), 2, d3, 9, r,
                                 DecompositionKind::primal, SliceKind::theta,
                                 &theta);
  REQUIRE(slice.size() == 2);
  std::set<std::vector<int>> images;
  for (const auto& alpha : slice)
    images.insert({alpha.entry(1), alpha.entry(2)});
  CHECK(images == std::set<std::vector<int>>{{3, 4}, {4, 3}});

  // classes partition Sigma(2,9)
  std::map<std::vector<int>, int> seen;
  long long total = 0;
  for (const auto& alpha : enumerate_sigma(d3, 9)) seen[alpha.entries] = 0;
  for (int s = 0; s <= 2; ++s) {
    // collect all (N, n) blocks at this codim
    std::set<std::pair<std::vector<int>, int>> blocks;
    for (const auto& alpha : enumerate_sigma(d3, 9)) {
      auto c = classify_primal(alpha, r);
      if (c.s == s) blocks.insert({c.N.labels(), c.n});
    }
    for (const auto& [nlabels, n] : blocks) {
      auto members = refined_enumerate(IndexSet(nlabels), n, d3, 9, r,
                                       DecompositionKind::primal);
      total += static_cast<long long>(members.size());
      for (const auto& m : members) ++seen[m.entries];
    }
  }
  CHECK(total == 55);
  for (const auto& [e, cnt] : seen) CHECK(cnt == 1);  // disjoint cover

  // emptiness when n exceeds the threshold
  CHECK(refined_enumerate(IndexSet({0, 1}), 5, d3, 9, r,
                          DecompositionKind::primal)
            .empty());
}

TEST_CASE("restriction bijections") {
  SmoothnessVector r({2, 4});
  auto rd = restrict_to_delta(mi({1, 2, 6}), r);
  CHECK(rd.labels == IndexSet({2}));
  CHECK(rd.entries == std::vector<int>{6});

  // round trip over every refined class of Sigma(2,9)
  IndexSet d3 = IndexSet::range(3);
  for (const auto& alpha : enumerate_sigma(d3, 9)) {
    auto c = classify_primal(alpha, r);
    if (c.s == 0) continue;
    MultiIndex theta = restrict_to_n(alpha, r);
    MultiIndex sigma = restrict_to_delta(alpha, r);
    SmoothnessVector q = q_vector(r, c.s, c.n);
    CHECK(in_sigma0(sigma, q));
    MultiIndex back = extend_from(theta, sigma, r);
    CHECK(back == alpha);
  }

  // theta-independence of slice cardinality, d = 3
  SmoothnessVector r3({1, 2, 4});
  IndexSet d4 = IndexSet::range(4);
  std::map<std::pair<std::vector<int>, int>,
           std::map<std::vector<int>, long long>>
      slice_sizes;
  for (const auto& alpha : enumerate_sigma(d4, 9)) {
    auto c = classify_primal(alpha, r3);
    if (c.s == 0) continue;
    std::vector<int> theta;
    for (int l : c.N) theta.push_back(alpha.entry(l));
    ++slice_sizes[{c.N.labels(), c.n}][theta];
  }
  for (const auto& [block, by_theta] : slice_sizes) {
    const auto expected = static_cast<long long>(
        enumerate_sigma0(
            IndexSet(std::vector<int>(
                d4.set_minus(IndexSet(block.first)).labels())),
            9 - block.second, q_vector(r3, static_cast<int>(block.first.size()), block.second))
            .size());
    for (const auto& [theta, count] : by_theta) CHECK(count == expected);
  }
}

TEST_CASE("dual node shift and S value") {
  SmoothnessVector r({1, 2});
  // no interior nodes for the Argyris parameters
  CHECK(s_value(2, 5, 0, 0, r) == -1);
  long long interior = 0;
  for (const auto& alpha : enumerate_sigma(IndexSet::range(3), 5))
    if (classify_dual(alpha, r).s == 0) ++interior;
  CHECK(interior == 0);

  // one node per edge class
  CHECK(s_value(2, 5, 1, 1, r) == 0);
  long long edge_nodes = 0;
  for (const auto& alpha : enumerate_sigma(IndexSet::range(3), 5)) {
    auto c = classify_dual(alpha, r);
    if (c.s == 1 && c.n == 1) ++edge_nodes;
  }
  CHECK(edge_nodes == 3);  // one per edge

  // vertex class: the shifted singleton entry equals S
  for (const auto& alpha : enumerate_sigma(IndexSet::range(3), 5)) {
    auto c = classify_dual(alpha, r);
    if (c.s != 2) continue;
    auto shifted = dual_node_shift(alpha, r);
    CHECK(shifted.entries.size() == 1);
    CHECK(shifted.degree() == s_value(2, 5, 2, c.n, r));
  }
}

TEST_CASE("embed_dual classification") {
  // d=2 exhaustive and the zero-theta special case
  SmoothnessVector r({1, 2});
  IndexSet d3 = IndexSet::range(3);
  const int k = 5;
  for (int I = 0; I <= 2; ++I) {
    IndexSet facet = d3.set_minus(IndexSet({I}));
    for (int l = 0; l <= r.at(1); ++l) {
      SmoothnessVector pl = r.tail_shifted(1, l);
      for (const auto& beta : enumerate_sigma(facet, k - l)) {
        auto cb = classify_dual(beta, pl);
        for (const auto& theta : enumerate_sigma(cb.N.with(I), l)) {
          MultiIndex alpha = embed_dual(beta, theta, d3, I, l, r);
          auto ca = classify_dual(alpha, r);
          CHECK(ca.N == cb.N.with(I));
          CHECK(ca.n == cb.n + l);
          if (l == 0) {
            CHECK(alpha.entry(I) == 0);
          }
        }
      }
    }
  }
  // d=3 brute force
  SmoothnessVector r3({1, 2, 4});
  IndexSet d4 = IndexSet::range(4);
  for (int I = 0; I <= 3; ++I) {
    IndexSet facet = d4.set_minus(IndexSet({I}));
    for (int l = 0; l <= r3.at(1); ++l) {
      SmoothnessVector pl = r3.tail_shifted(1, l);
      for (const auto& beta : enumerate_sigma(facet, 9 - l)) {
        auto cb = classify_dual(beta, pl);
        for (const auto& theta : enumerate_sigma(cb.N.with(I), l)) {
          MultiIndex alpha = embed_dual(beta, theta, d4, I, l, r3);
          auto ca = classify_dual(alpha, r3);
          CHECK(ca.N == cb.N.with(I));
          CHECK(ca.n == cb.n + l);
        }
      }
    }
  }
}

TEST_CASE("counts_by_codim") {
  // the worked 3D example
  auto t = counts_by_codim(3, 33, SmoothnessVector({4, 8, 16}),
                           DecompositionKind::primal);
  REQUIRE(t.by_codim.size() == 4);
  CHECK(t.by_codim[0].codim == 3);
  CHECK(t.by_codim[0].total == 3876);
  CHECK(t.by_codim[1].total == 1440);
  CHECK(t.by_codim[2].total == 1280);
  CHECK(t.by_codim[3].total == 544);
  CHECK(t.total == 7140);
  CHECK(t.by_codim[2].theta_series ==
        std::vector<long long>{28, 45, 63, 82, 102});

  // Argyris counts, cross-checked by brute-force classification
  auto a = counts_by_codim(2, 5, SmoothnessVector({1, 2}),
                           DecompositionKind::primal);
  CHECK(a.by_codim[0].per_subsimplex == 6);
  CHECK(a.by_codim[1].per_subsimplex == 1);
  CHECK(a.by_codim[2].per_subsimplex == 0);
  CHECK(a.total == 21);
  std::map<int, long long> brute;
  for (const auto& alpha : enumerate_sigma(IndexSet::range(3), 5))
    ++brute[classify_primal(alpha, SmoothnessVector({1, 2})).s];
  CHECK(brute[2] == 18);
  CHECK(brute[1] == 3);
  CHECK(brute[0] == 0);

  // Lagrange P1
  auto l = counts_by_codim(2, 1, SmoothnessVector({0, 0}),
                           DecompositionKind::primal);
  CHECK(l.by_codim[0].per_subsimplex == 1);
  CHECK(l.by_codim[1].per_subsimplex == 0);
  CHECK(l.total == 3);

  // primal formula equals brute-force classification at the big example
  auto brute33 = [&]() {
    std::map<int, long long> by_s;
    for (const auto& alpha : enumerate_sigma(IndexSet::range(4), 33))
      ++by_s[classify_primal(alpha, SmoothnessVector({4, 8, 16})).s];
    return by_s;
  }();
  CHECK(brute33.at(3) == 3876);
  CHECK(brute33.at(2) == 1440);
  CHECK(brute33.at(1) == 1280);
  CHECK(brute33.at(0) == 544);
}

TEST_CASE("q_vector closure") {
  SmoothnessVector r({2, 4, 8});
  for (int m = 1; m <= 3; ++m) {
    for (int t = 0; t <= r.at(m); ++t) {
      SmoothnessVector q = q_vector(r, m, t);
      CHECK(validate_assumption(q, 17 - t));
    }
  }
}

}  // TEST_SUITE
