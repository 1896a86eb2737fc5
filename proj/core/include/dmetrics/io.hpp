#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmetrics/analysis.hpp"
#include "dmetrics/domain.hpp"
#include "dmetrics/metrics.hpp"

namespace dmetrics {

/// Domain JSON objects: {"kind": ..., "n": ..., per-kind fields}.
///   ball              center, radius
///   half_space        normal, offset, scale
///   convex_polygon    vertices (list of [x, y])
///   slit_disk         center, radius, tip, end
///   tangent_disk_cusp center, outer_radius, inner_radius, direction
///   punctured_disk    center, radius, puncture, full_plane, scale
/// Missing fields take the defaults of the parameter structs (the unit disk,
/// the upper half-plane, ...); unknown fields are rejected.
Domain domain_from_json(const nlohmann::json& spec);
Domain load_domain(const std::filesystem::path& path);
nlohmann::json domain_to_json(const Domain& domain);

/// Finite numbers as JSON numbers; infinities and NaN as strings.
nlohmann::json number_json(double v);

/// {"value", "lower", "upper"} or {"value", "exact": true}.
nlohmann::json to_json(const MetricValue& m);
nlohmann::json to_json(const ConstantEntry& e);
nlohmann::json to_json(const InequalityCheck& c);
nlohmann::json to_json(const ConstantsReport& r);
nlohmann::json to_json(const ChainDiagnostics& c);

/// Columns x, y, j, jprime_lo, jprime_hi, alpha_lo, alpha_hi, k, alphatilde,
/// lambda, rho_lo, rho_hi; points are written space-separated, quoted.
void write_pairs_csv(std::ostream& os, const std::vector<PairEvaluation>& evals);

}  // namespace dmetrics
