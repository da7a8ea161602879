// crfem - construction and exact verification of C^r conforming simplicial
// finite elements: decompositions, DOF counts, unisolvency certificates,
// nodal bases, continuity patch checks, interpolation, and the 2D de-Rham
// dimension identity. All verification arithmetic is exact rational.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "crfem/continuity.hpp"
#include "crfem/fe_element.hpp"
#include "crfem/interp_element.hpp"
#include "crfem/json_io.hpp"
#include "crfem/mesh.hpp"
#include "crfem/version.hpp"

namespace {

using namespace crfem;
using ordered_json = nlohmann::ordered_json;

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Simplex simplex_from_file_or_reference(const std::string& path, int d) {
  if (path.empty()) return Simplex::reference(d);
  ordered_json j = ordered_json::parse(read_file(path));
  std::vector<Vector> pts;
  for (const auto& vj : j.at("vertices")) {
    Vector v;
    for (const auto& cj : vj)
      v.push_back(cj.is_string() ? rational_from_string(cj.get<std::string>())
                                 : Rational(cj.get<long>()));
    pts.push_back(std::move(v));
  }
  std::vector<int> ids;
  if (j.contains("ids"))
    ids = j["ids"].get<std::vector<int>>();
  else
    for (std::size_t i = 0; i < pts.size(); ++i) ids.push_back(static_cast<int>(i));
  return Simplex(ids, pts);
}

ordered_json report_header(const std::string& command, const ordered_json& params,
                           std::uint64_t seed) {
  ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["params"] = params;
  j["seed"] = seed;
  return j;
}

void emit(const ordered_json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    out << report.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
}

struct CommonOpts {
  int d = 2;
  int k = 5;
  std::string r_csv = "1,2";
  std::string family = "fe";
  std::string mode = "exact";
  std::string format = "json";
  std::string out;
  std::string simplex_file;
  std::uint64_t seed = 0;
};

SmoothnessVector smoothness_of(const CommonOpts& opt) {
  return SmoothnessVector(parse_int_list(opt.r_csv));
}

int run_check_assumption(const CommonOpts& opt) {
  SmoothnessVector r = smoothness_of(opt);
  std::string why = assumption_violation(r, opt.k);
  ordered_json params{{"r", r.r}, {"k", opt.k}};
  ordered_json rep = report_header("check-assumption", params, opt.seed);
  rep["valid"] = why.empty();
  if (!why.empty()) {
    rep["reason"] = why;
    rep["message"] = "invalid: " + why;
  }
  if (opt.format == "text")
    std::cout << (why.empty() ? std::string("valid") : "invalid: " + why) << "\n";
  else
    emit(rep, opt.out);
  return why.empty() ? 0 : 1;
}

int run_counts(const CommonOpts& opt, const std::string& kind) {
  SmoothnessVector r = smoothness_of(opt);
  auto table = counts_by_codim(opt.d, opt.k, r,
                               kind == "dual" ? DecompositionKind::dual
                                              : DecompositionKind::primal);
  ordered_json params{{"d", opt.d}, {"k", opt.k}, {"r", r.r}, {"kind", kind}};
  ordered_json rep = report_header("counts", params, opt.seed);
  rep["counts"] = counts_to_json(table);
  if (opt.format == "text") {
    std::cout << "codim  dim  #sub  per-sub  total\n";
    for (const auto& cc : table.by_codim)
      std::cout << cc.codim << "      " << cc.subsimplex_dim << "    "
                << cc.num_subsimplices << "     " << cc.per_subsimplex
                << "       " << cc.total << "\n";
    std::cout << "total " << table.total << "\n";
  } else {
    emit(rep, opt.out);
  }
  return 0;
}

int run_decompose(const CommonOpts& opt, const std::string& kind,
                  const std::string& alpha_csv) {
  SmoothnessVector r = smoothness_of(opt);
  DecompositionKind dk =
      kind == "dual" ? DecompositionKind::dual : DecompositionKind::primal;
  IndexSet labels = IndexSet::range(opt.d + 1);
  ordered_json params{{"d", opt.d}, {"k", opt.k}, {"r", r.r}, {"kind", kind}};
  ordered_json rep = report_header("decompose", params, opt.seed);
  if (!alpha_csv.empty()) {
    MultiIndex alpha(labels, parse_int_list(alpha_csv));
    rep["classification"] = classification_to_json(alpha, classify(alpha, r, dk));
  } else {
    ordered_json list = ordered_json::array();
    for (const auto& alpha : enumerate_sigma(labels, opt.k))
      list.push_back(classification_to_json(alpha, classify(alpha, r, dk)));
    rep["classifications"] = std::move(list);
  }
  emit(rep, opt.out);
  return 0;
}

int run_unisolvency(const CommonOpts& opt) {
  SmoothnessVector r = smoothness_of(opt);
  Simplex sx = simplex_from_file_or_reference(opt.simplex_file, opt.d);
  std::mt19937_64 rng(opt.seed);
  UnisolvencyCertificate cert;
  if (opt.family == "interp") {
    InterpElement el(sx, r, opt.k);
    cert = el.check_unisolvent(opt.mode == "exact", rng);
  } else {
    FeElement el(sx, r, opt.k);
    cert = el.check_unisolvent(opt.mode == "exact", rng);
  }
  ordered_json params{{"d", opt.d},       {"k", opt.k},
                      {"r", r.r},         {"family", opt.family},
                      {"mode", opt.mode}, {"simplex", opt.simplex_file}};
  ordered_json rep = report_header("unisolvency", params, opt.seed);
  rep["certificate"] = certificate_to_json(cert);
  rep["verdict"] = cert.nonsingular ? "nonsingular" : "singular";
  if (opt.format == "text")
    std::cout << (cert.nonsingular ? "nonsingular" : "singular") << "\n";
  else
    emit(rep, opt.out);
  return cert.nonsingular ? 0 : 1;
}

int run_basis(const CommonOpts& opt) {
  SmoothnessVector r = smoothness_of(opt);
  Simplex sx = simplex_from_file_or_reference(opt.simplex_file, opt.d);
  ordered_json params{{"d", opt.d}, {"k", opt.k}, {"r", r.r},
                      {"family", opt.family}};
  ordered_json rep = report_header("basis", params, opt.seed);
  ordered_json manifest = ordered_json::array();
  std::vector<BaryPoly<Rational>> basis;
  std::vector<MultiIndex> monomials;
  if (opt.family == "interp") {
    InterpElement el(sx, r, opt.k);
    basis = el.dual_basis();
    monomials = el.monomials();
    for (const auto& dof : el.dofs()) {
      ordered_json dj;
      dj["alpha"] = dof.alpha.entries;
      dj["class_s"] = dof.cls.s;
      ordered_json node = ordered_json::array();
      for (const auto& x : dof.fn.node) node.push_back(to_string(x));
      dj["node"] = std::move(node);
      manifest.push_back(std::move(dj));
    }
  } else {
    FeElement el(sx, r, opt.k);
    basis = el.dual_basis();
    monomials = el.monomials();
    for (const auto& dof : el.dofs()) {
      ordered_json dj;
      dj["owner"] = dof.owner.labels();
      dj["theta"] = dof.theta;
      dj["sigma"] = dof.sigma.entries;
      dj["alpha"] = dof.alpha.entries;
      manifest.push_back(std::move(dj));
    }
  }
  rep["dofs"] = std::move(manifest);
  ordered_json monos = ordered_json::array();
  for (const auto& m : monomials) monos.push_back(m.entries);
  rep["monomials"] = std::move(monos);
  ordered_json coeffs = ordered_json::array();
  for (const auto& p : basis) {
    ordered_json cj = ordered_json::array();
    for (const auto& m : monomials)
      cj.push_back(to_string(p.coefficient(m.entries)));
    coeffs.push_back(std::move(cj));
  }
  rep["dual_basis_coefficients"] = std::move(coeffs);
  emit(rep, opt.out);
  return 0;
}

// identical Cartesian polynomial realized on each element's label set
BaryPoly<Rational> realize_cartesian(
    const Simplex& sx,
    const std::vector<std::pair<std::vector<int>, Rational>>& terms) {
  IndexSet L = sx.labels();
  const int d = sx.dim();
  std::vector<BaryPoly<Rational>> coords;
  for (int c = 0; c < d; ++c) {
    std::vector<Rational> values;
    for (int l : L) values.push_back(sx.vertex(l)[static_cast<std::size_t>(c)]);
    coords.push_back(BaryPoly<Rational>::affine(L, values));
  }
  BaryPoly<Rational> acc = BaryPoly<Rational>::zero(L, 0);
  for (const auto& [exps, coeff] : terms) {
    BaryPoly<Rational> m =
        BaryPoly<Rational>::monomial(L, std::vector<int>(L.card(), 0), coeff);
    for (int c = 0; c < d; ++c)
      for (int rep = 0; rep < exps[static_cast<std::size_t>(c)]; ++rep)
        m = m * coords[static_cast<std::size_t>(c)];
    acc += m;
  }
  return acc;
}

int run_continuity(const CommonOpts& opt, const std::string& patch_file,
                   int trials, int t_max_flag) {
  SmoothnessVector r = smoothness_of(opt);
  Mesh mesh = parse_mesh(read_file(patch_file));
  if (mesh.num_cells() != 2)
    throw std::runtime_error("patch file must contain exactly two cells");
  Patch patch = build_patch(mesh.cell_simplex(0), mesh.cell_simplex(1));
  const int r1 = r.at(1);
  const int t_max = t_max_flag >= 0 ? t_max_flag : r1 + 1;
  std::mt19937_64 rng(opt.seed);

  ordered_json params{{"k", opt.k},           {"r", r.r},
                      {"family", opt.family}, {"patch", patch_file},
                      {"trials", trials},     {"t_max", t_max}};
  ordered_json rep = report_header("check-continuity", params, opt.seed);
  bool all_zero_up_to_r1 = true;
  bool sharp_seen = false;
  ordered_json trial_reports = ordered_json::array();

  auto record = [&](const std::vector<BaryPoly<Rational>>& jumps) {
    ordered_json tj = ordered_json::array();
    for (std::size_t order = 0; order < jumps.size(); ++order) {
      bool zero = jumps[order].is_zero();
      tj.push_back(ordered_json{{"order", order}, {"jump_zero", zero}});
      if (static_cast<int>(order) <= r1 && !zero) all_zero_up_to_r1 = false;
      if (static_cast<int>(order) == r1 + 1 && !zero) sharp_seen = true;
    }
    trial_reports.push_back(std::move(tj));
  };

  if (opt.family == "interp") {
    const int d = mesh.dim();
    InterpElement ip(patch.plus, r, opt.k), im(patch.minus, r, opt.k);
    std::uniform_int_distribution<long> num(-20, 20);
    std::uniform_int_distribution<long> den(1, 5);
    for (int t = 0; t < trials; ++t) {
      std::vector<std::pair<std::vector<int>, Rational>> terms;
      for (const auto& mono : enumerate_sigma(IndexSet::range(d), opt.k + 2))
        terms.emplace_back(mono.entries, rat(num(rng), den(rng)));
      auto up = ip.interpolate(realize_cartesian(patch.plus, terms));
      auto um = im.interpolate(realize_cartesian(patch.minus, terms));
      record(jump_check(up, um, patch, t_max));
    }
  } else {
    FeElement ep(patch.plus, r, opt.k), em(patch.minus, r, opt.k);
    for (const auto& jumps : fe_patch_trials(ep, em, patch, rng, trials))
      record(jumps);
  }
  rep["trials"] = std::move(trial_reports);
  rep["all_jumps_zero_up_to_r1"] = all_zero_up_to_r1;
  rep["nonzero_jump_seen_at_r1_plus_1"] = sharp_seen;
  rep["verdict"] = all_zero_up_to_r1 ? "pass" : "fail";
  emit(rep, opt.out);
  return all_zero_up_to_r1 ? 0 : 1;
}

int run_interpolate(const CommonOpts& opt, const std::string& poly_file) {
  SmoothnessVector r = smoothness_of(opt);
  Simplex sx = simplex_from_file_or_reference(opt.simplex_file, opt.d);
  ordered_json pj = ordered_json::parse(read_file(poly_file));
  BaryPoly<Rational> u = cartesian_poly_from_json(pj, sx);
  InterpElement el(sx, r, opt.k);
  BaryPoly<Rational> interp = el.interpolate(u);
  ordered_json params{{"d", opt.d}, {"k", opt.k}, {"r", r.r}, {"poly", poly_file}};
  ordered_json rep = report_header("interpolate", params, opt.seed);
  rep["input_degree"] = u.degree();
  rep["interpolant"] = poly_to_json(interp);
  if (u.degree() <= opt.k) {
    bool reproduced = interp == u;
    rep["reproduced_exactly"] = reproduced;
    emit(rep, opt.out);
    return reproduced ? 0 : 1;
  }
  // higher degree input: the interpolant must share every DOF value
  auto vu = el.dof_values(u);
  auto vi = el.dof_values(interp);
  bool dofs_match = vu == vi;
  rep["dof_values_match"] = dofs_match;
  emit(rep, opt.out);
  return dofs_match ? 0 : 1;
}

int run_derham(const CommonOpts& opt, const std::string& mesh_file) {
  SmoothnessVector r = smoothness_of(opt);
  Mesh mesh = parse_mesh(read_file(mesh_file));
  auto report = derham_check(mesh, r, opt.k);
  ordered_json params{{"k", opt.k}, {"r", r.r}, {"mesh", mesh_file}};
  ordered_json rep = report_header("derham", params, opt.seed);
  rep["dim_r_k"] = report.dim_r;
  rep["dim_r1_k1"] = report.dim_r1;
  rep["dim_r2_k2"] = report.dim_r2;
  rep["identity_value"] = report.identity_value;
  rep["euler_characteristic"] = report.euler;
  rep["verdict"] = report.matches_euler
                       ? "identity matches Euler characteristic"
                       : "identity differs from Euler characteristic";
  if (opt.format == "text")
    std::cout << report.dim_r << " - 2*" << report.dim_r1 << " + "
              << report.dim_r2 << " = " << report.identity_value
              << " vs chi = " << report.euler << "\n";
  else
    emit(rep, opt.out);
  return report.matches_euler ? 0 : 1;
}

int run_mesh_info(const CommonOpts& opt, const std::string& mesh_file) {
  ordered_json rep = report_header("mesh-info", {{"mesh", mesh_file}}, opt.seed);
  try {
    Mesh mesh = parse_mesh(read_file(mesh_file));
    rep["valid"] = true;
    rep["dim"] = mesh.dim();
    ordered_json counts = ordered_json::array();
    for (auto c : mesh.subsimplex_counts()) counts.push_back(c);
    rep["subsimplex_counts"] = std::move(counts);
    rep["euler_characteristic"] = mesh.euler_characteristic();
    emit(rep, opt.out);
    return 0;
  } catch (const MeshError& e) {
    rep["valid"] = false;
    rep["error"] = e.what();
    emit(rep, opt.out);
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact construction and verification of C^r conforming simplicial "
      "finite elements"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string kind = "primal";
  std::string alpha_csv;
  std::string patch_file, poly_file, mesh_file;
  int trials = 20;
  int t_max_flag = -1;

  auto add_common = [&](CLI::App* sub, bool with_family = false) {
    sub->add_option("--d", opt.d, "simplex dimension");
    sub->add_option("--k", opt.k, "polynomial degree");
    sub->add_option("--r", opt.r_csv, "smoothness vector r_1,...,r_d");
    sub->add_option("--seed", opt.seed, "seed for randomized parts");
    sub->add_option("--format", opt.format, "json or text");
    sub->add_option("--out", opt.out, "write the JSON report to this file");
    if (with_family) sub->add_option("--family", opt.family, "fe or interp");
  };

  auto* c_decomp = app.add_subcommand("decompose", "classify multi-indices");
  add_common(c_decomp);
  c_decomp->add_option("--kind", kind, "primal or dual");
  c_decomp->add_option("--alpha", alpha_csv, "single multi-index a_0,...,a_d");

  auto* c_counts = app.add_subcommand("counts", "DOF counts per codimension");
  add_common(c_counts);
  c_counts->add_option("--kind", kind, "primal or dual");

  auto* c_assume = app.add_subcommand(
      "check-assumption", "validate the smoothness growth conditions");
  add_common(c_assume);

  auto* c_unis = app.add_subcommand("unisolvency", "certify DOF unisolvency");
  add_common(c_unis, true);
  c_unis->add_option("--mode", opt.mode, "exact or modular");
  c_unis->add_option("--simplex", opt.simplex_file, "simplex JSON file");

  auto* c_basis = app.add_subcommand("basis", "nodal dual basis coefficients");
  add_common(c_basis, true);
  c_basis->add_option("--simplex", opt.simplex_file, "simplex JSON file");

  auto* c_cont = app.add_subcommand("check-continuity",
                                    "two-element patch jump verification");
  add_common(c_cont, true);
  c_cont->add_option("--patch", patch_file, "patch JSON file (two cells)")
      ->required();
  c_cont->add_option("--trials", trials, "number of random trials");
  c_cont->add_option("--t-max", t_max_flag, "highest derivative order checked");

  auto* c_interp = app.add_subcommand("interpolate", "local interpolation");
  add_common(c_interp);
  c_interp->add_option("--poly", poly_file, "polynomial JSON file")->required();
  c_interp->add_option("--simplex", opt.simplex_file, "simplex JSON file");

  auto* c_derham = app.add_subcommand("derham", "2D de-Rham dimension identity");
  add_common(c_derham);
  c_derham->add_option("--mesh", mesh_file, "mesh JSON file")->required();

  auto* c_mesh = app.add_subcommand("mesh-info", "mesh validation and tables");
  add_common(c_mesh);
  c_mesh->add_option("--mesh", mesh_file, "mesh JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_decomp)) return run_decompose(opt, kind, alpha_csv);
    if (app.got_subcommand(c_counts)) return run_counts(opt, kind);
    if (app.got_subcommand(c_assume)) return run_check_assumption(opt);
    if (app.got_subcommand(c_unis)) return run_unisolvency(opt);
    if (app.got_subcommand(c_basis)) return run_basis(opt);
    if (app.got_subcommand(c_cont))
      return run_continuity(opt, patch_file, trials, t_max_flag);
    if (app.got_subcommand(c_interp)) return run_interpolate(opt, poly_file);
    if (app.got_subcommand(c_derham)) return run_derham(opt, mesh_file);
    if (app.got_subcommand(c_mesh)) return run_mesh_info(opt, mesh_file);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
