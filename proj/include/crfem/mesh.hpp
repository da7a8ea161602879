#ifndef CRFEM_MESH_HPP
#define CRFEM_MESH_HPP

#include <map>
#include <string>
#include <vector>

#include "crfem/geometry.hpp"
#include "crfem/multiindex.hpp"
#include "crfem/rational.hpp"

namespace crfem {

struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Conforming simplicial complex with rational vertex coordinates. Vertex ids
/// are positions in the vertex array.
class Mesh {
 public:
  Mesh(int dim, std::vector<Vector> vertices,
       std::vector<std::vector<int>> cells);

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  Simplex cell_simplex(std::size_t c) const;

  /// Sub-simplices of every dimension, deduplicated, sorted id tuples.
  const std::vector<std::vector<IndexSet>>& subsimplices() const {
    return subsimplices_;
  }
  std::vector<long long> subsimplex_counts() const;
  long long euler_characteristic() const;

  /// Structural and geometric validation: nondegenerate cells, no duplicate
  /// vertices/cells, facets shared by at most two cells, no vertex inside a
  /// foreign cell, pairwise interior overlap test (d <= 3).
  void validate() const;

 private:
  int dim_;
  std::vector<Vector> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<std::vector<IndexSet>> subsimplices_;  // by dimension
};

/// Parses the mesh JSON document
/// {"dim": d, "vertices": [["p/q", ...], ...], "cells": [[ids], ...]};
/// validates before returning.
Mesh parse_mesh(const std::string& text);

/// Dimension of the global FE space: per-sub-simplex DOF counts summed over
/// the sub-simplex table.
long long global_dim(const Mesh& mesh, const SmoothnessVector& r, int k);

/// 2D closed-form dimension a_V V + a_E E + a_F F used as a cross check.
long long global_dim_2d_closed_form(long long V, long long E, long long F,
                                    const SmoothnessVector& r, int k);

struct DerhamReport {
  long long dim_r = 0;    // D(r, k)
  long long dim_r1 = 0;   // D(r - 1, k - 1)
  long long dim_r2 = 0;   // D(r - 2, k - 2)
  long long identity_value = 0;  // dim_r - 2 dim_r1 + dim_r2
  long long euler = 0;           // V - E + F
  bool matches_euler = false;
};

/// The 2D dimension identity of the smooth de-Rham sequence, compared to the
/// Euler characteristic. The identity equals 1 on simply connected meshes; for
/// other topologies the values are reported without asserting the match.
DerhamReport derham_check(const Mesh& mesh, const SmoothnessVector& r, int k);

}  // namespace crfem

#endif
