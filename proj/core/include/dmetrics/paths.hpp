#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "dmetrics/atlas.hpp"
#include "dmetrics/domain.hpp"
#include "dmetrics/grid.hpp"
#include "dmetrics/metrics.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

enum class WeightKind { euclidean, quasihyperbolic, apollonian };

std::string_view to_string(WeightKind w) noexcept;
WeightKind parse_weight_kind(std::string_view name);

/// Ordered vertex list of a path in a domain.
struct Polyline {
  std::vector<Point> vertices;

  std::size_t size() const noexcept { return vertices.size(); }
  bool empty() const noexcept { return vertices.empty(); }
  double euclidean_length() const;
  /// Euclidean length of the sub-path between vertices i <= j.
  double euclidean_length(std::size_t i, std::size_t j) const;
};

/// Throws OutsideDomain when a vertex or a segment leaves the domain.
void validate_polyline(const Domain& domain, const Polyline& path);

/// Max pairwise vertex distance.
double path_diameter(const Polyline& path);

/// Greedy shortcutting: from each kept vertex jump to the farthest later
/// vertex whose connecting segment lies in D.
Polyline straighten(const Domain& domain, const Polyline& path);

/// CSV with header "x0,x1[,x2]", one row per vertex.
void write_polyline_csv(std::ostream& os, const Polyline& path);

/// Apollonian distance of grid edges over one shared atlas. Weights are
/// computed on first use and cached; concurrent readers may compute the same
/// edge twice but always store the same value.
class ApollonianEdgeWeights {
 public:
  ApollonianEdgeWeights(const GridGraph& grid, const BoundaryAtlas& atlas);

  double operator[](std::size_t edge) const;
  /// Fills every edge up front.
  void precompute() const;
  const BoundaryAtlas& atlas() const noexcept { return *atlas_; }
  std::size_t size() const noexcept { return weights_.size(); }
  /// Edges evaluated so far.
  std::size_t computed() const noexcept;

 private:
  const GridGraph* grid_;
  const BoundaryAtlas* atlas_;
  std::unique_ptr<std::atomic<double>[]> weights_store_;
  std::span<std::atomic<double>> weights_;
  std::vector<std::uint32_t> source_;
};

struct PathResult {
  /// value: d-length of the returned path (upper bound for the infimum);
  /// lower: pointwise minorant (|x-y| for lambda, j for k, alpha for the
  /// Apollonian inner metric; the lens bound for the inner diameter).
  MetricValue metric;
  Polyline path;
  /// Largest distance from a query point to the grid node it was joined to.
  double snap_error = 0.0;
};

/// A* search (consistent heuristic, so Dijkstra-exact) between the grid
/// nodes nearest to x and y, with straight connectors from x and y joined to
/// the best of the first and last few path vertices. Euclidean results
/// are straightened afterwards. `alpha` is required for the Apollonian weight.
PathResult shortest_path(const GridGraph& grid, const Domain& domain, const Point& x, const Point& y,
                         WeightKind weight, const ApollonianEdgeWeights* alpha = nullptr);

/// Vertex-sum length of a polyline: exact segment lengths (euclidean),
/// trapezoid rule per segment (quasihyperbolic), sampled Apollonian distance
/// per segment (apollonian; atlas required).
double d_length(const Domain& domain, const Polyline& path, WeightKind weight,
                const BoundaryAtlas* atlas = nullptr);

/// Quasihyperbolic length of the segment [a, b] by composite trapezoid rule
/// with enough panels to resolve the distance function near the ends.
double quasihyperbolic_segment(const Domain& domain, const Point& a, const Point& b);

/// Inner diameter bracket [L, U]. Bisection on t for connectivity of x and y
/// through grid nodes in the lens D n B(x,t) n B(y,t); U is the diameter of
/// the best witness (lens path or its straightening), L = max(|x-y|, t_lo - h).
PathResult inner_diameter(const Domain& domain, const Point& x, const Point& y,
                          const GridGraph& grid);

}  // namespace dmetrics
