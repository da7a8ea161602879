#include "doctest.h"

#include "crfem/geometry.hpp"

using namespace crfem;

namespace {

Simplex unit_triangle() { return Simplex::reference(2); }

Vector v2(long a, long b) { return Vector{Rational(a), Rational(b)}; }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("barycentric identities") {
  Simplex t = unit_triangle();
  for (int l = 0; l <= 2; ++l) {
    Vector b = t.barycentric(t.vertex(l));
    for (int j = 0; j <= 2; ++j)
      CHECK(b[static_cast<std::size_t>(j)] == (j == l ? 1 : 0));
  }
  Vector c = t.barycentric(t.centroid());
  for (const auto& x : c) CHECK(x == rat(1, 3));

  Vector outside = t.barycentric(v2(2, 2));
  Rational sum(0);
  bool has_negative = false;
  for (const auto& x : outside) {
    sum += x;
    if (x < 0) has_negative = true;
  }
  CHECK(sum == 1);
  CHECK(has_negative);

  // dlambda identities on edge vectors
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j) {
      if (i == j) continue;
      Vector edge(2);
      for (std::size_t c2 = 0; c2 < 2; ++c2)
        edge[c2] = t.vertex(j)[c2] - t.vertex(i)[c2];
      Vector w = t.derivative_weights(edge);
      CHECK(w[t.labels().position(i)] == -1);
      for (int l = 0; l <= 2; ++l)
        if (l != i && l != j) CHECK(w[t.labels().position(l)] == 0);
    }

  CHECK_THROWS_AS(Simplex({0, 1, 2}, {v2(0, 0), v2(1, 1), v2(2, 2)}),
                  std::invalid_argument);
}

TEST_CASE("perpendicular frame") {
  Simplex t = unit_triangle();
  // edge y = 0 (vertices 0,1): normal proportional to (0,1)
  NormalFrame f = perpendicular_frame(t, IndexSet({2}));
  REQUIRE(f.vectors.size() == 1);
  CHECK(f.vectors[0][0] == 0);
  CHECK(f.vectors[0][1] != 0);
  CHECK(f.vectors[0][1] > 0);  // sign convention: leading nonzero positive

  // tetrahedron edge frame: two mutually orthogonal vectors, orthogonal to
  // the edge
  Simplex tet = Simplex::reference(3);
  NormalFrame ef = perpendicular_frame(tet, IndexSet({2, 3}));
  REQUIRE(ef.vectors.size() == 2);
  Vector edge(3);
  for (std::size_t c = 0; c < 3; ++c)
    edge[c] = tet.vertex(1)[c] - tet.vertex(0)[c];
  CHECK(dot(ef.vectors[0], ef.vectors[1]) == 0);
  CHECK(dot(ef.vectors[0], edge) == 0);
  CHECK(dot(ef.vectors[1], edge) == 0);

  // same frame from either adjacent element sharing the sub-simplex
  Simplex plus({0, 1, 2}, {v2(0, 0), v2(3, 0), v2(1, 2)});
  Simplex minus({0, 1, 3}, {v2(0, 0), v2(3, 0), v2(1, -5)});
  NormalFrame fp = perpendicular_frame(plus, IndexSet({2}));
  NormalFrame fm = perpendicular_frame(minus, IndexSet({3}));
  CHECK(fp.vectors == fm.vectors);

  CHECK_THROWS_AS(perpendicular_frame(t, IndexSet({0, 1, 2})),
                  std::invalid_argument);
}

TEST_CASE("outer normal") {
  Simplex t = unit_triangle();
  Vector n = outer_normal(t, IndexSet({0, 1}), 2);
  CHECK(n[0] == 0);
  CHECK(n[1] < 0);  // away from vertex (0,1), outward across y=0

  Simplex seg = Simplex::reference(1);
  Vector n1 = outer_normal(seg, IndexSet({0}), 1);
  CHECK(n1[0] < 0);  // from x_1 toward x_0

  Simplex tet = Simplex::reference(3);
  Vector fn = outer_normal(tet, IndexSet({0, 1}), 2);
  Vector edge(3);
  for (std::size_t c = 0; c < 3; ++c)
    edge[c] = tet.vertex(1)[c] - tet.vertex(0)[c];
  CHECK(dot(fn, edge) == 0);
  // lies in the plane of face {0,1,2}: orthogonal to that plane's normal
  NormalFrame face_frame = perpendicular_frame(tet, IndexSet({3}));
  CHECK(dot(fn, face_frame.vectors[0]) == 0);

  CHECK_THROWS_AS(outer_normal(t, IndexSet({0, 1}), 1), std::invalid_argument);
}

TEST_CASE("gram measure") {
  Simplex seg = Simplex::reference(1);
  CHECK(gram_measure_sq(seg, IndexSet({0, 1})) == 1);

  Simplex t = unit_triangle();
  CHECK(gram_measure_sq(t, IndexSet({0, 1, 2})) == rat(1, 4));

  // shoelace oracle on a general rational triangle
  Simplex g({0, 1, 2}, {v2(1, 2), Vector{rat(7, 2), Rational(3)},
                        Vector{Rational(2), rat(13, 3)}});
  auto shoelace = [&](const Simplex& s) {
    const Vector &a = s.vertex(0), &b = s.vertex(1), &c = s.vertex(2);
    Rational twice = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    Rational area = twice / 2;
    if (area < 0) area = -area;
    return area;
  };
  Rational area = shoelace(g);
  CHECK(gram_measure_sq(g, IndexSet({0, 1, 2})) == area * area);
}

TEST_CASE("dual lambda frame") {
  Simplex tet = Simplex::reference(3);
  IndexSet n({1, 3});
  auto duals = dual_lambda_frame(tet, n);
  REQUIRE(duals.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    Vector w = tet.derivative_weights(duals[i]);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(w[tet.labels().position(n.label(j))] == (i == j ? 1 : 0));
  }
  // orthogonal to the tangent of the complementary sub-simplex {0,2}
  Vector tangent(3);
  for (std::size_t c = 0; c < 3; ++c)
    tangent[c] = tet.vertex(2)[c] - tet.vertex(0)[c];
  CHECK(dot(duals[0], tangent) == 0);
  CHECK(dot(duals[1], tangent) == 0);
}

}  // TEST_SUITE
