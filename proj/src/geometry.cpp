#include "crfem/geometry.hpp"

#include <algorithm>
#include <numeric>

#include "crfem/linalg.hpp"

namespace crfem {

namespace {

Vector sub(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool is_zero_vec(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

}  // namespace

Simplex::Simplex(std::vector<int> ids, std::vector<Vector> vertices) {
  if (ids.size() != vertices.size() || ids.empty())
    throw std::invalid_argument("simplex needs matching ids and vertices");
  dim_ = static_cast<int>(ids.size()) - 1;
  for (const auto& v : vertices)
    if (static_cast<int>(v.size()) != dim_)
      throw std::invalid_argument("simplex vertex has wrong ambient dimension");
  // sort vertex data by global id
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::vector<int> sorted_ids;
  for (auto o : order) sorted_ids.push_back(ids[o]);
  labels_ = IndexSet(sorted_ids);  // throws on duplicates
  for (auto o : order) vertices_.push_back(std::move(vertices[o]));

  // gradients of lambda_1..lambda_d: rows of T^{-1}, T = [x_1-x_0 .. x_d-x_0]
  gradients_.assign(labels_.card(), Vector(dim_, Rational(0)));
  if (dim_ == 0) return;
  Matrix<Rational> t_transposed(dim_, dim_);
  for (int j = 1; j <= dim_; ++j) {
    Vector e = sub(vertices_[static_cast<std::size_t>(j)], vertices_[0]);
    for (int c = 0; c < dim_; ++c) t_transposed(j - 1, c) = e[static_cast<std::size_t>(c)];
  }
  for (int j = 1; j <= dim_; ++j) {
    std::vector<Rational> rhs(dim_, Rational(0));
    rhs[static_cast<std::size_t>(j - 1)] = 1;
    std::vector<Rational> g;
    try {
      g = solve_exact_small(t_transposed, rhs);
    } catch (const std::runtime_error&) {
      throw std::invalid_argument("degenerate simplex: vertices not affinely independent");
    }
    gradients_[static_cast<std::size_t>(j)] = std::move(g);
  }
  for (int c = 0; c < dim_; ++c) {
    Rational s(0);
    for (int j = 1; j <= dim_; ++j) s += gradients_[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
    gradients_[0][static_cast<std::size_t>(c)] = -s;
  }
}

Simplex Simplex::reference(int d) {
  std::vector<int> ids(static_cast<std::size_t>(d) + 1);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<Vector> verts;
  for (int i = 0; i <= d; ++i) {
    Vector v(static_cast<std::size_t>(d), Rational(0));
    if (i > 0) v[static_cast<std::size_t>(i - 1)] = 1;
    verts.push_back(std::move(v));
  }
  return Simplex(std::move(ids), std::move(verts));
}

Vector Simplex::barycentric(const Vector& point) const {
  if (static_cast<int>(point.size()) != dim_)
    throw std::invalid_argument("barycentric: point dimension mismatch");
  Vector out(labels_.card());
  Vector rel = sub(point, vertices_[0]);
  for (std::size_t i = 0; i < labels_.card(); ++i) {
    Rational v = i == 0 ? Rational(1) : Rational(0);
    v += dot(gradients_[i], rel);
    out[i] = v;
  }
  return out;
}

Vector Simplex::point_of(const Vector& bary) const {
  if (bary.size() != labels_.card())
    throw std::invalid_argument("point_of: coordinate count mismatch");
  Vector out(static_cast<std::size_t>(dim_), Rational(0));
  for (std::size_t i = 0; i < labels_.card(); ++i)
    for (std::size_t c = 0; c < out.size(); ++c)
      out[c] += bary[i] * vertices_[i][c];
  return out;
}

Vector Simplex::derivative_weights(const Vector& v) const {
  Vector out(labels_.card());
  for (std::size_t i = 0; i < labels_.card(); ++i) out[i] = dot(gradients_[i], v);
  return out;
}

Vector Simplex::centroid() const { return subsimplex_centroid(labels_); }

Vector Simplex::subsimplex_centroid(const IndexSet& delta) const {
  Vector out(static_cast<std::size_t>(dim_), Rational(0));
  for (int l : delta) {
    const Vector& x = vertex(l);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += x[c];
  }
  Rational inv(1, static_cast<long>(delta.card()));
  inv.canonicalize();
  for (auto& c : out) c *= inv;
  return out;
}

Vector primitive_vector(const Vector& v) {
  if (is_zero_vec(v)) throw std::invalid_argument("primitive_vector: zero vector");
  Integer l(1);
  for (const auto& q : v) {
    Integer den = q.get_den();
    Integer g;
    mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    l = l / g * den;
  }
  std::vector<Integer> ints;
  Integer g(0);
  for (const auto& q : v) {
    Rational s = q * Rational(l);
    s.canonicalize();
    ints.push_back(s.get_num());
    Integer a = abs(ints.back());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  int sign = 0;
  for (const auto& z : ints) {
    if (z != 0) {
      sign = z > 0 ? 1 : -1;
      break;
    }
  }
  Vector out;
  for (const auto& z : ints) {
    Integer e = z / g;
    if (sign < 0) e = -e;
    out.push_back(Rational(e));
  }
  return out;
}

Vector project_out(const Vector& v, const std::vector<Vector>& basis) {
  if (basis.empty()) return v;
  const std::size_t m = basis.size();
  Matrix<Rational> gram(m, m);
  std::vector<Rational> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) gram(i, j) = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  auto coef = solve_exact_small(gram, rhs);
  Vector out = v;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < out.size(); ++c) out[c] -= coef[i] * basis[i][c];
  return out;
}

NormalFrame perpendicular_frame(const Simplex& simplex, const IndexSet& N) {
  if (N.empty() || !N.subset_of(simplex.labels()))
    throw std::invalid_argument("perpendicular_frame: N must be a nonempty subset");
  IndexSet delta = simplex.labels().set_minus(N);
  if (delta.empty())
    throw std::invalid_argument("perpendicular_frame: N must be proper");
  const int d = simplex.dim();
  const std::size_t m = N.card();

  std::vector<Vector> span;  // tangent of the sub-simplex, then accepted frame
  const Vector& base = simplex.vertex(delta.label(0));
  for (std::size_t j = 1; j < delta.card(); ++j)
    span.push_back(sub(simplex.vertex(delta.label(j)), base));

  NormalFrame frame;
  frame.kind = FrameKind::orthogonal_perpendicular;
  for (int c = 0; c < d && frame.vectors.size() < m; ++c) {
    Vector e(static_cast<std::size_t>(d), Rational(0));
    e[static_cast<std::size_t>(c)] = 1;
    Vector w = project_out(e, span);
    if (is_zero_vec(w)) continue;
    Vector p = primitive_vector(w);
    frame.vectors.push_back(p);
    span.push_back(std::move(p));
  }
  if (frame.vectors.size() != m)
    throw std::logic_error("perpendicular_frame: span construction failed");
  return frame;
}

Vector outer_normal(const Simplex& simplex, const IndexSet& delta, int i) {
  if (delta.contains(i))
    throw std::invalid_argument("outer_normal: i must not lie in delta");
  if (!delta.subset_of(simplex.labels()) || !simplex.labels().contains(i))
    throw std::invalid_argument("outer_normal: labels outside simplex");
  Vector v = sub(simplex.subsimplex_centroid(delta), simplex.vertex(i));
  std::vector<Vector> tangent;
  const Vector& base = simplex.vertex(delta.label(0));
  for (std::size_t j = 1; j < delta.card(); ++j)
    tangent.push_back(sub(simplex.vertex(delta.label(j)), base));
  Vector w = project_out(v, tangent);
  if (is_zero_vec(w)) throw std::logic_error("outer_normal: degenerate configuration");
  return w;
}

Rational gram_measure_sq(const Simplex& simplex, const IndexSet& delta) {
  const std::size_t t = delta.card() - 1;
  if (t == 0) return Rational(1);  // counting measure on a point
  Matrix<Rational> gram(t, t);
  const Vector& base = simplex.vertex(delta.label(0));
  std::vector<Vector> edges;
  for (std::size_t j = 1; j < delta.card(); ++j)
    edges.push_back(sub(simplex.vertex(delta.label(j)), base));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) gram(i, j) = dot(edges[i], edges[j]);
  Rational det = det_bareiss(std::move(gram));
  Integer f = factorial_int(static_cast<unsigned>(t));
  return det / Rational(f * f);
}

std::vector<Vector> dual_lambda_frame(const Simplex& simplex,
                                      const IndexSet& N) {
  NormalFrame frame = perpendicular_frame(simplex, N);
  const std::size_t m = N.card();
  Matrix<Rational> mat(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const Vector& grad = simplex.gradient(N.label(j));
    for (std::size_t c = 0; c < m; ++c) mat(j, c) = dot(grad, frame.vectors[c]);
  }
  std::vector<Vector> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Rational> rhs(m, Rational(0));
    rhs[i] = 1;
    auto coef = solve_exact_small(mat, rhs);
    Vector v(static_cast<std::size_t>(simplex.dim()), Rational(0));
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t x = 0; x < v.size(); ++x)
        v[x] += coef[c] * frame.vectors[c][x];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace crfem
