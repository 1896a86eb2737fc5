#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmetrics/atlas.hpp"
#include "dmetrics/domain.hpp"
#include "dmetrics/grid.hpp"
#include "dmetrics/metrics.hpp"
#include "dmetrics/paths.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

enum class PairPolicy { uniform, boundary_biased, adversarial };

std::string_view to_string(PairPolicy p) noexcept;
PairPolicy parse_pair_policy(std::string_view name);

struct PairSample {
  PairPolicy policy = PairPolicy::uniform;
  std::uint64_t seed = 42;
  std::vector<std::pair<Point, Point>> pairs;
};

/// Draws `count` pairs (ignored for the adversarial policy, which returns the
/// domain's fixed sequence). Uniform points are drawn from the reference box
/// with d_D > min_depth; boundary-biased points sit at log-uniform depths
/// between min_depth and the domain scale.
PairSample sample_pairs(const Domain& domain, PairPolicy policy, std::size_t count,
                        std::uint64_t seed, double min_depth);

/// Sequences that exhibit non-uniformity: pairs straddling the slit, mirrored
/// pairs deep in the cusp horns, near-boundary pairs for the other kinds.
PairSample adversarial_pairs(const Domain& domain);

/// Smallest d_D over all points of the sample.
double min_sample_depth(const Domain& domain, const PairSample& sample);

/// Domain, atlas, grid and (optionally) Apollonian edge weights built once
/// for an analysis run. Neither copyable nor movable: the edge weights refer
/// to the atlas.
class Workspace {
 public:
  /// min_depth: smallest d_D the run must resolve; it grades the atlas and,
  /// for the cusp, refines the grid toward the tip.
  Workspace(Domain domain, double h, std::size_t m, double min_depth, bool alpha_weights = true,
            std::size_t max_nodes = 10'000'000);
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const Domain& domain() const noexcept { return domain_; }
  const BoundaryAtlas& atlas() const noexcept { return atlas_; }
  const GridGraph& grid() const noexcept { return grid_; }
  const ApollonianEdgeWeights* alpha_weights() const noexcept { return alpha_.get(); }
  double h() const noexcept { return grid_.spacing(); }

 private:
  Domain domain_;
  BoundaryAtlas atlas_;
  GridGraph grid_;
  std::unique_ptr<ApollonianEdgeWeights> alpha_;
};

struct EvaluationOptions {
  bool lambda = true;
  bool rho = true;
  bool alphatilde = true;
};

/// Every metric of one pair. Path metrics carry their grid brackets.
struct PairEvaluation {
  Point x;
  Point y;
  double separation = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  /// Finer of the grid spacings at the two snapped nodes.
  double local_h = 0.0;
  double log_density = 0.0;
  MetricValue j;
  MetricValue alpha;
  MetricValue k;
  MetricValue lambda;
  MetricValue rho;
  MetricValue jprime;
  MetricValue alphatilde;
  bool has_lambda = false;
  bool has_rho = false;
  bool has_alphatilde = false;
  /// Quasihyperbolic witness arc.
  Polyline k_path;
  /// Non-empty when a path computation failed for this pair.
  std::string failure;

  bool ok() const noexcept { return failure.empty(); }
  bool degenerate() const noexcept { return separation == 0.0; }
};

PairEvaluation evaluate_pair(const Workspace& ws, const Point& x, const Point& y,
                             const EvaluationOptions& options = {});

/// Per-pair work runs on worker_count() threads; results keep sample order.
std::vector<PairEvaluation> evaluate_pairs(const Workspace& ws, const PairSample& sample,
                                           const EvaluationOptions& options = {});

/// Cigar and turning quantities of one arc between its end points.
struct ArcRatios {
  double length = 0.0;
  double diameter = 0.0;
  /// max over vertices w of min(l(g[z1,w]), l(g[z2,w])) / d_D(w)
  double length_cigar = 0.0;
  /// max over vertices w of min(diam(g[z1,w]), diam(g[z2,w])) / d_D(w)
  double diameter_cigar = 0.0;
};

ArcRatios arc_ratios(const Domain& domain, const Polyline& path);

enum class EntryStatus { finite, unbounded, skipped };

std::string_view to_string(EntryStatus s) noexcept;

/// Estimates above this are reported as unbounded.
inline constexpr double kDivergenceThreshold = 1e3;

/// One estimated constant: the sup of a per-pair ratio over the sample. It
/// is a lower estimate of the best constant (finite sample, one arc family).
struct ConstantEntry {
  std::string name;
  EntryStatus status = EntryStatus::finite;
  /// max(1, sup ratio)
  double estimate = 1.0;
  /// Sup of the per-pair ratio bracket ends.
  double lower = 1.0;
  double upper = 1.0;
  /// Ratio at the witness pair (may be below 1 when the sup is).
  double witness_ratio = 0.0;
  std::optional<std::pair<Point, Point>> witness;
  std::size_t sample_size = 0;
  std::string note;
};

/// c (inner uniformity), c_uniform and john, over quasihyperbolic witness arcs.
std::vector<ConstantEntry> uniformity_constants(const Workspace& ws,
                                                const std::vector<PairEvaluation>& evals);

/// nu2 (diameter cigar) and c3 (the diameter condition: diameter cigar
/// together with diam(g) / rho).
std::vector<ConstantEntry> diameter_uniformity(const Workspace& ws,
                                               const std::vector<PairEvaluation>& evals);

/// c1 = k/j', c2 = alphatilde/j', L = j/alpha, K = k/alpha, mu5 = j'/alpha,
/// over pairs with |x-y| > 10 local_h. Apollonian entries are skipped on
/// non-Apollonian domains.
std::vector<ConstantEntry> ratio_constants(const Workspace& ws,
                                           const std::vector<PairEvaluation>& evals);

struct IsotropyValue {
  double ratio = 1.0;
  /// max alpha.upper / min alpha.lower over the directions
  double upper = 1.0;
};

/// max / min of alpha(x, x + r w) over `directions` unit vectors w.
IsotropyValue quasi_isotropy(const Domain& domain, const BoundaryAtlas& atlas, const Point& x,
                             double r, std::size_t directions);

struct IsotropyRow {
  int s = 0;
  double r = 0.0;
  IsotropyValue value;
};

/// Rows at r = d_D(x) / 2^s, s = 1..6, keeping r >= 10 x the local atlas
/// cover radius.
std::vector<IsotropyRow> quasi_isotropy_table(const Domain& domain, const BoundaryAtlas& atlas,
                                              const Point& x, std::size_t directions = 64);

/// mu3 over the first points of the sample.
ConstantEntry isotropy_constant(const Workspace& ws, const PairSample& sample,
                                std::size_t max_points = 16);

/// A point on a polyline: segment index and parameter in [0, 1].
struct ArcPosition {
  std::size_t segment = 0;
  double t = 0.0;
};

struct DyadicChain {
  std::vector<Point> points;
  std::vector<double> depths;
  std::vector<ArcPosition> positions;
  /// Number of doublings (points.size() - 1).
  std::size_t doublings() const noexcept { return points.empty() ? 0 : points.size() - 1; }
};

struct DyadicChains {
  /// First vertex maximizing d_D.
  std::size_t apex = 0;
  /// From the start toward the apex (m doublings).
  DyadicChain from_start;
  /// From the end toward the apex (s doublings), positions on the reversed path.
  DyadicChain from_end;
};

/// Points where d_D first reaches 2^i d_D(start), found by bisection inside
/// segments.
DyadicChains dyadic_chain(const Domain& domain, const Polyline& path);

/// Sub-arc between two positions of a polyline.
Polyline sub_arc(const Polyline& path, const ArcPosition& a, const Point& pa, const ArcPosition& b,
                 const Point& pb);

struct ChainLink {
  std::size_t index = 0;
  /// diam(g[x_i, x_i+1]) / rho(x_i, x_i+1), with rho.value in the denominator.
  double b1 = 0.0;
  /// rho(x_i, x_i+1) / d_D(x_i)
  double b2 = 0.0;
  /// max over the sub-arc of d_D(x_i) / d_D(w)
  double b3 = 0.0;
  MetricValue rho;
};

struct ChainDiagnostics {
  DyadicChains chains;
  std::vector<ChainLink> links;  // start chain, then end chain
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  bool finite() const noexcept;
};

ChainDiagnostics chain_diagnostics(const Domain& domain, const GridGraph& grid, const Polyline& path);

struct InequalityCheck {
  std::string name;
  bool skipped = false;
  std::string note;
  std::size_t checked = 0;
  std::size_t failures = 0;
  /// min over pairs of rhs - lhs (negative on failure)
  double worst_margin = 0.0;
  std::optional<std::pair<Point, Point>> worst;
  std::vector<std::pair<std::size_t, double>> failed_pairs;
};

/// log_density <= alpha.upper; alpha.lower <= 2j; j <= j'.upper;
/// j'.lower <= k; alphatilde.lower <= 2k. Apollonian checks are skipped on
/// non-Apollonian domains.
std::vector<InequalityCheck> verify_inequalities(const Workspace& ws,
                                                 const std::vector<PairEvaluation>& evals);

std::size_t total_failures(const std::vector<InequalityCheck>& checks) noexcept;

struct ConstantsReport {
  std::string domain;
  std::string policy;
  std::uint64_t seed = 0;
  double h = 0.0;
  std::size_t atlas_size = 0;
  std::size_t grid_nodes = 0;
  std::size_t pairs = 0;
  std::size_t failed_pairs = 0;
  std::vector<ConstantEntry> constants;
  std::vector<InequalityCheck> inequalities;
};

/// Full run: all constant estimators (and the inequality suite when
/// `verify` is set) over one evaluated sample.
ConstantsReport constants_report(const Workspace& ws, const PairSample& sample,
                                 const std::vector<PairEvaluation>& evals, bool verify);

}  // namespace dmetrics
