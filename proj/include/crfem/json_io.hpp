#ifndef CRFEM_JSON_IO_HPP
#define CRFEM_JSON_IO_HPP

#include <string>

#include "json.hpp"

#include "crfem/fe_element.hpp"
#include "crfem/multiindex.hpp"
#include "crfem/polynomial.hpp"

namespace crfem {

using ordered_json = nlohmann::ordered_json;

ordered_json classification_to_json(const MultiIndex& alpha,
                                    const Classification& c);
ordered_json counts_to_json(const CountsTable& table);
ordered_json certificate_to_json(const UnisolvencyCertificate& cert);
ordered_json poly_to_json(const BaryPoly<Rational>& p);

/// Parses a polynomial given as a JSON list of [exponents, "p/q"] pairs in
/// global Cartesian monomials, and converts it to barycentric form on the
/// simplex.
BaryPoly<Rational> cartesian_poly_from_json(const ordered_json& j,
                                            const Simplex& simplex);

}  // namespace crfem

#endif
