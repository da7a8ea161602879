#include "crfem/json_io.hpp"

namespace crfem {

ordered_json classification_to_json(const MultiIndex& alpha,
                                    const Classification& c) {
  ordered_json j;
  j["alpha"] = alpha.entries;
  j["kind"] = c.kind == DecompositionKind::primal ? "primal" : "dual";
  j["s"] = c.s;
  j["N"] = c.N.labels();
  j["n"] = c.n;
  j["Delta"] = c.Delta.labels();
  j["delta"] = c.delta;
  return j;
}

ordered_json counts_to_json(const CountsTable& table) {
  ordered_json j;
  j["d"] = table.d;
  j["k"] = table.k;
  j["r"] = table.r.r;
  j["kind"] = table.kind == DecompositionKind::primal ? "primal" : "dual";
  j["total"] = table.total;
  ordered_json rows = ordered_json::array();
  for (const auto& cc : table.by_codim) {
    ordered_json row;
    row["codim"] = cc.codim;
    row["dim"] = cc.subsimplex_dim;
    row["num_subsimplices"] = cc.num_subsimplices;
    row["per_subsimplex"] = cc.per_subsimplex;
    row["total"] = cc.total;
    if (!cc.theta_series.empty()) row["theta_series"] = cc.theta_series;
    rows.push_back(std::move(row));
  }
  j["by_codim"] = std::move(rows);
  return j;
}

ordered_json certificate_to_json(const UnisolvencyCertificate& cert) {
  ordered_json j;
  j["verdict"] = cert.nonsingular ? "nonsingular" : "singular";
  j["mode"] = cert.mode;
  j["size"] = cert.size;
  if (cert.mode == "exact" || cert.exact_fallback)
    j["det"] = to_string(cert.det);
  if (cert.mode == "modular") {
    j["prime"] = cert.prime;
    j["rank"] = cert.rank;
    j["primes_tried"] = cert.primes_tried;
    j["exact_fallback"] = cert.exact_fallback;
  }
  if (!cert.kernel.empty()) {
    ordered_json kv = ordered_json::array();
    for (const auto& q : cert.kernel) kv.push_back(to_string(q));
    j["kernel"] = std::move(kv);
  }
  return j;
}

ordered_json poly_to_json(const BaryPoly<Rational>& p) {
  ordered_json j;
  j["labels"] = p.labels().labels();
  j["degree"] = p.degree();
  ordered_json terms = ordered_json::array();
  for (const auto& [e, c] : p.terms()) {
    ordered_json term;
    term["exponents"] = e;
    term["coefficient"] = to_string(c);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

BaryPoly<Rational> cartesian_poly_from_json(const ordered_json& j,
                                            const Simplex& simplex) {
  if (!j.is_array())
    throw std::invalid_argument("polynomial file must be a JSON array");
  const IndexSet& labels = simplex.labels();
  const int d = simplex.dim();
  // coordinate functions x_c as degree-1 barycentric polynomials
  std::vector<BaryPoly<Rational>> coords;
  for (int c = 0; c < d; ++c) {
    std::vector<Rational> values;
    for (int l : labels) values.push_back(simplex.vertex(l)[static_cast<std::size_t>(c)]);
    coords.push_back(BaryPoly<Rational>::affine(labels, values));
  }
  BaryPoly<Rational> acc = BaryPoly<Rational>::zero(labels, 0);
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2)
      throw std::invalid_argument("each term must be [exponents, coefficient]");
    std::vector<int> exps = term[0].get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != d)
      throw std::invalid_argument("term exponent count differs from dim");
    Rational coeff = term[1].is_string()
                         ? rational_from_string(term[1].get<std::string>())
                         : Rational(term[1].get<long>());
    BaryPoly<Rational> mono =
        BaryPoly<Rational>::monomial(MultiIndex(labels, std::vector<int>(labels.card(), 0)), coeff);
    for (int c = 0; c < d; ++c)
      for (int rep = 0; rep < exps[static_cast<std::size_t>(c)]; ++rep)
        mono = mono * coords[static_cast<std::size_t>(c)];
    acc += mono;
  }
  return acc;
}

}  // namespace crfem
