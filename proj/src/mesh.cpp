#include "crfem/mesh.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace crfem {

namespace {

std::vector<std::vector<int>> id_subsets(const std::vector<int>& ids,
                                         std::size_t pick) {
  std::vector<std::vector<int>> out;
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> idx(pick);
  for (std::size_t i = 0; i < pick; ++i) idx[i] = i;
  if (pick > sorted.size()) return out;
  for (;;) {
    std::vector<int> s;
    for (auto i : idx) s.push_back(sorted[i]);
    out.push_back(std::move(s));
    std::size_t i = pick;
    bool advanced = false;
    while (i-- > 0) {
      if (idx[i] + (pick - i) <= sorted.size() - 1) {
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

Vector sub(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector cross3(const Vector& a, const Vector& b) {
  return Vector{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0]};
}

bool is_zero_vec(const Vector& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Rational& x) { return x == 0; });
}

// Strict separating-axis test: true when the interiors of the two cells are
// disjoint. Axis candidates: facet normals of both cells, plus edge-edge cross
// products in 3D (the standard complete axis set for convex polytopes).
bool interiors_disjoint(const Mesh& mesh, const std::vector<int>& ca,
                        const std::vector<int>& cb) {
  const int d = mesh.dim();
  std::vector<Vector> axes;
  auto add_facet_normals = [&](const std::vector<int>& cell) {
    Simplex s(cell, [&] {
      std::vector<Vector> pts;
      for (int id : cell) pts.push_back(mesh.vertices()[static_cast<std::size_t>(id)]);
      return pts;
    }());
    for (int off : s.labels())
      axes.push_back(perpendicular_frame(s, IndexSet({off})).vectors[0]);
  };
  if (d == 1) {
    axes.push_back(Vector{Rational(1)});
  } else {
    add_facet_normals(ca);
    add_facet_normals(cb);
    if (d == 3) {
      auto edges = [&](const std::vector<int>& cell) {
        std::vector<Vector> out;
        for (auto& pair : id_subsets(cell, 2))
          out.push_back(sub(mesh.vertices()[static_cast<std::size_t>(pair[1])],
                            mesh.vertices()[static_cast<std::size_t>(pair[0])]));
        return out;
      };
      for (const auto& ea : edges(ca))
        for (const auto& eb : edges(cb)) {
          Vector c = cross3(ea, eb);
          if (!is_zero_vec(c)) axes.push_back(std::move(c));
        }
    }
  }
  for (const auto& axis : axes) {
    auto project = [&](const std::vector<int>& cell) {
      Rational lo, hi;
      bool first = true;
      for (int id : cell) {
        Rational v = dot(axis, mesh.vertices()[static_cast<std::size_t>(id)]);
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
        first = false;
      }
      return std::pair<Rational, Rational>(lo, hi);
    };
    auto [alo, ahi] = project(ca);
    auto [blo, bhi] = project(cb);
    if (ahi <= blo || bhi <= alo) return true;  // separated (touching allowed)
  }
  return false;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Vector> vertices,
           std::vector<std::vector<int>> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ < 1) throw MeshError("mesh dimension must be at least 1");
  for (const auto& v : vertices_)
    if (static_cast<int>(v.size()) != dim_)
      throw MeshError("vertex coordinate count differs from dim");
  std::set<std::vector<int>> seen;
  for (auto& cell : cells_) {
    if (cell.size() != static_cast<std::size_t>(dim_) + 1)
      throw MeshError("cell must list dim+1 vertex ids");
    for (int id : cell)
      if (id < 0 || static_cast<std::size_t>(id) >= vertices_.size())
        throw MeshError("cell references unknown vertex id " +
                        std::to_string(id));
    std::vector<int> sorted = cell;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError("cell repeats a vertex id");
    if (!seen.insert(sorted).second) throw MeshError("duplicate cell");
    cell = std::move(sorted);
  }
  // sub-simplex tables
  subsimplices_.assign(static_cast<std::size_t>(dim_) + 1, {});
  for (int t = 0; t <= dim_; ++t) {
    std::set<std::vector<int>> unique;
    for (const auto& cell : cells_)
      for (auto& s : id_subsets(cell, static_cast<std::size_t>(t) + 1))
        unique.insert(std::move(s));
    for (const auto& s : unique)
      subsimplices_[static_cast<std::size_t>(t)].emplace_back(s);
  }
}

Simplex Mesh::cell_simplex(std::size_t c) const {
  std::vector<Vector> pts;
  for (int id : cells_[c]) pts.push_back(vertices_[static_cast<std::size_t>(id)]);
  return Simplex(cells_[c], std::move(pts));
}

std::vector<long long> Mesh::subsimplex_counts() const {
  std::vector<long long> out;
  for (const auto& list : subsimplices_)
    out.push_back(static_cast<long long>(list.size()));
  return out;
}

long long Mesh::euler_characteristic() const {
  long long chi = 0;
  int sign = 1;
  for (const auto& list : subsimplices_) {
    chi += sign * static_cast<long long>(list.size());
    sign = -sign;
  }
  return chi;
}

void Mesh::validate() const {
  if (cells_.empty()) throw MeshError("mesh has no cells");
  // duplicate coordinates
  for (std::size_t a = 0; a < vertices_.size(); ++a)
    for (std::size_t b = a + 1; b < vertices_.size(); ++b)
      if (vertices_[a] == vertices_[b])
        throw MeshError("vertices " + std::to_string(a) + " and " +
                        std::to_string(b) + " coincide");
  // nondegenerate cells (Simplex construction checks affine independence)
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    try {
      cell_simplex(c);
    } catch (const std::invalid_argument& e) {
      throw MeshError("cell " + std::to_string(c) + ": " + e.what());
    }
  }
  // facet incidence
  std::map<std::vector<int>, int> facet_count;
  for (const auto& cell : cells_)
    for (auto& f : id_subsets(cell, static_cast<std::size_t>(dim_)))
      ++facet_count[f];
  for (const auto& [f, cnt] : facet_count)
    if (cnt > 2) throw MeshError("facet shared by more than two cells");
  // foreign vertex containment (catches hanging nodes)
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    Simplex s = cell_simplex(c);
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (std::find(cells_[c].begin(), cells_[c].end(), static_cast<int>(v)) !=
          cells_[c].end())
        continue;
      Vector bary = s.barycentric(vertices_[v]);
      bool inside = std::all_of(bary.begin(), bary.end(),
                                [](const Rational& x) { return x >= 0; });
      if (inside)
        throw MeshError("vertex " + std::to_string(v) +
                        " lies inside cell " + std::to_string(c) +
                        " without being one of its vertices");
    }
  }
  // pairwise interior overlap
  if (dim_ <= 3) {
    for (std::size_t a = 0; a < cells_.size(); ++a)
      for (std::size_t b = a + 1; b < cells_.size(); ++b)
        if (!interiors_disjoint(*this, cells_[a], cells_[b]))
          throw MeshError("cells " + std::to_string(a) + " and " +
                          std::to_string(b) + " overlap");
  }
}

Mesh parse_mesh(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("dim") || !j.contains("vertices") || !j.contains("cells"))
    throw MeshError("mesh JSON needs dim, vertices, cells");
  int dim = j["dim"].get<int>();
  std::vector<Vector> vertices;
  for (const auto& vj : j["vertices"]) {
    Vector v;
    for (const auto& cj : vj) {
      if (cj.is_string())
        v.push_back(rational_from_string(cj.get<std::string>()));
      else if (cj.is_number_integer())
        v.push_back(Rational(cj.get<long>()));
      else
        throw MeshError("vertex coordinates must be rational strings or integers");
    }
    vertices.push_back(std::move(v));
  }
  std::vector<std::vector<int>> cells;
  for (const auto& cj : j["cells"]) cells.push_back(cj.get<std::vector<int>>());
  Mesh mesh(dim, std::move(vertices), std::move(cells));
  mesh.validate();
  return mesh;
}

namespace {

// DOF count on one sub-simplex of dimension t inside a d-dimensional element.
long long per_subsimplex_count(int d, int t, const SmoothnessVector& r, int k) {
  const int m = d - t;
  if (m == 0)
    return static_cast<long long>(
        enumerate_sigma0(IndexSet::range(d + 1), k, r).size());
  const int rm = r.at(m);
  long long count = 0;
  for (int td = 0; td <= rm; ++td) {
    long long n_theta = binomial(td + m - 1, m - 1);
    count += n_theta * static_cast<long long>(
                           enumerate_sigma0(IndexSet::range(t + 1), k - td,
                                            q_vector(r, m, td))
                               .size());
  }
  return count;
}

}  // namespace

long long global_dim(const Mesh& mesh, const SmoothnessVector& r, int k) {
  std::string why = assumption_violation(r, k);
  if (!why.empty())
    throw std::invalid_argument("global_dim: assumption violated: " + why);
  const int d = mesh.dim();
  if (r.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("global_dim: r must have length d");
  long long total = 0;
  auto counts = mesh.subsimplex_counts();
  for (int t = 0; t <= d; ++t)
    total += counts[static_cast<std::size_t>(t)] *
             per_subsimplex_count(d, t, r, k);
  return total;
}

long long global_dim_2d_closed_form(long long V, long long E, long long F,
                                    const SmoothnessVector& r, int k) {
  const int r1 = r.at(1), r2 = r.at(2);
  long long a_v = r2 >= 0 ? binomial(r2 + 2, 2) : 0;
  long long a_e = 0;
  if (r1 >= 0)
    a_e = static_cast<long long>(k - 2 * r2 - 1) * (r1 + 1) + binomial(r1 + 1, 2);
  long long interior = binomial(k + 2, 2) - 3 * a_v - 3 * a_e;
  return a_v * V + a_e * E + interior * F;
}

DerhamReport derham_check(const Mesh& mesh, const SmoothnessVector& r, int k) {
  if (mesh.dim() != 2) throw std::invalid_argument("derham_check needs a 2D mesh");
  if (k < 2) throw std::invalid_argument("derham_check needs k >= 2");
  const char* leg_names[3] = {"r", "r'", "r''"};
  long long dims[3];
  for (int leg = 0; leg < 3; ++leg) {
    SmoothnessVector rl = r.shifted(leg);
    std::string why = assumption_violation(rl, k - leg);
    if (!why.empty())
      throw std::invalid_argument(std::string("derham leg ") + leg_names[leg] +
                                  " invalid: " + why);
    dims[leg] = global_dim(mesh, rl, k - leg);
  }
  DerhamReport report;
  report.dim_r = dims[0];
  report.dim_r1 = dims[1];
  report.dim_r2 = dims[2];
  report.identity_value = dims[0] - 2 * dims[1] + dims[2];
  report.euler = mesh.euler_characteristic();
  report.matches_euler = report.identity_value == report.euler;
  return report;
}

}  // namespace crfem
