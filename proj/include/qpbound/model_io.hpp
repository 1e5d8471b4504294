#pragma once

#include <string>

#include <json.hpp>

#include "qpbound/bias_coefficients.hpp"
#include "qpbound/lp_builder.hpp"
#include "qpbound/model.hpp"
#include "qpbound/piecewise.hpp"

namespace qpbound::io {

using ordered_json = nlohmann::ordered_json;

// Model files: either the four kernel rows keyed "horizontal", "vertical",
// "origin", "interior" with direction keys from
// {e1,e2,-e1,-e2,d1,-d1,d2,-d2,0}, or a family stanza
// {"family": "joint_departures"|"coupled_processors", ...rates}.
// Unknown keys are rejected.
RandomWalkSpec walk_from_json(const ordered_json& j);
RandomWalkSpec load_walk(const std::string& path);
ordered_json walk_to_json(const RandomWalkSpec& w);

// Measures: an alias ("indicator_origin", "n1", "n2"), a JSON object with
// keys f10..f42, or a path to a file holding such an object.
CLinearFn measure_from_json(const ordered_json& j);
CLinearFn load_measure(const std::string& id_or_path);
ordered_json measure_to_json(const CLinearFn& f);

ordered_json certificate_to_json(const BoundCertificate& cert);

// Flat object keyed "c[i][k][j][u1,u2]" for external inspection.
ordered_json coefficient_table_to_json(const CoefficientTable& c);

// Named perturbation rules: "split" (equal axis rates mu/2 on a
// joint-departures walk), "swap" (axis rates exchanged with their
// complement), "product_form" (coupled processors, vertical rate adjusted
// so the perturbed walk admits a product form).
RandomWalkSpec apply_perturbation_rule(const RandomWalkSpec& original,
                                       const std::string& rule);

}  // namespace qpbound::io
