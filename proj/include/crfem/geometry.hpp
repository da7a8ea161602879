#ifndef CRFEM_GEOMETRY_HPP
#define CRFEM_GEOMETRY_HPP

#include <vector>

#include "crfem/multiindex.hpp"
#include "crfem/rational.hpp"

namespace crfem {

/// Full-dimensional simplex with rational vertex coordinates. Vertices are
/// stored sorted by global id, so local index i always refers to the i-th
/// smallest id; lambda_i is the barycentric coordinate of that vertex.
class Simplex {
 public:
  Simplex(std::vector<int> ids, std::vector<Vector> vertices);

  /// Reference simplex: x_0 = 0, x_i = e_i, ids 0..d.
  static Simplex reference(int d);

  int dim() const { return dim_; }
  const IndexSet& labels() const { return labels_; }
  const Vector& vertex(int label) const {
    return vertices_[labels_.position(label)];
  }
  const std::vector<Vector>& vertices() const { return vertices_; }

  /// Barycentric coordinates of a point, aligned with labels(). Sum to one.
  Vector barycentric(const Vector& point) const;
  /// Cartesian point of barycentric coordinates aligned with labels().
  Vector point_of(const Vector& bary) const;
  /// dlambda_label(v) for every label, aligned with labels().
  Vector derivative_weights(const Vector& v) const;
  /// Gradient vector of lambda_label.
  const Vector& gradient(int label) const {
    return gradients_[labels_.position(label)];
  }

  Vector centroid() const;
  Vector subsimplex_centroid(const IndexSet& delta) const;

 private:
  int dim_;
  IndexSet labels_;
  std::vector<Vector> vertices_;   // aligned with labels_
  std::vector<Vector> gradients_;  // aligned with labels_
};

/// Identified sub-simplex of a parent simplex: the convex hull of the vertices
/// with labels in delta.
struct SubsimplexRef {
  const Simplex* parent = nullptr;
  IndexSet delta;

  int dim() const { return static_cast<int>(delta.card()) - 1; }
  int codim() const { return parent->dim() - dim(); }
};

enum class FrameKind { orthogonal_perpendicular, outer_facewise };

/// Rational, unnormalized direction vectors attached to a sub-simplex. The
/// orthogonal kind is canonical per sub-simplex: identical when rebuilt from
/// either neighbouring element.
struct NormalFrame {
  FrameKind kind = FrameKind::orthogonal_perpendicular;
  std::vector<Vector> vectors;
};

/// Canonical orthogonal frame spanning the perpendicular space of the
/// sub-simplex complementary to N. Built by projecting the standard basis
/// vectors onto the perpendicular space in order, Gram-Schmidt without
/// normalization, each vector rescaled to a primitive integer vector with
/// positive leading component. Depends only on the sub-simplex geometry.
NormalFrame perpendicular_frame(const Simplex& simplex, const IndexSet& N);

/// Outer normal of subsimplex delta with respect to delta u {i}: the component
/// of (centroid(delta) - x_i) orthogonal to the tangent of delta. Unnormalized.
Vector outer_normal(const Simplex& simplex, const IndexSet& delta, int i);

/// Squared t-dimensional measure of the sub-simplex, i.e. det(Gram(edges))
/// divided by (t!)^2. Zero signals a degenerate sub-simplex.
Rational gram_measure_sq(const Simplex& simplex, const IndexSet& delta);

/// Dual frame of the lambda differentials: vectors v_i (i in N, sorted) with
/// dlambda_j(v_i) = delta_ij for j in N and v_i orthogonal to the tangent of
/// the complementary sub-simplex. Realizes the d/d lambda_i convention.
std::vector<Vector> dual_lambda_frame(const Simplex& simplex,
                                      const IndexSet& N);

/// Rescales a rational vector to integer entries with gcd one; flips the sign
/// so the first nonzero entry is positive. Zero vector is rejected.
Vector primitive_vector(const Vector& v);

/// Component of v orthogonal to span(basis); exact.
Vector project_out(const Vector& v, const std::vector<Vector>& basis);

}  // namespace crfem

#endif
