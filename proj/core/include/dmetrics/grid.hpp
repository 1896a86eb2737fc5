#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmetrics/domain.hpp"
#include "dmetrics/kdtree.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

/// Local refinement toward a focus point. Level l (1 <= l <= levels) adds the
/// lattice of spacing h / 2^l inside B(focus, radius0 * 2^(-l/2)), restricted
/// to the boundary band d_D <= band * h / 2^l. The square-root shrinkage
/// matches quadratic cusps, whose width at distance s from the tip is ~ s^2.
struct GridRefinement {
  Point focus;
  double radius0 = 0.0;
  std::size_t levels = 0;
  double band = 8.0;
};

struct GridOptions {
  std::size_t max_nodes = 10'000'000;
  std::optional<GridRefinement> refinement;
};

/// Lattice discretization of a domain. Nodes are lattice points (spacing h,
/// aligned to the origin) with d_D > h_l / 2 for their level spacing h_l;
/// edges join lattice neighbours under the 16-point stencil in the plane
/// (8 neighbours plus knight moves) or the 26-point stencil in space, and
/// only when the whole segment lies in D. Immutable after construction.
class GridGraph {
 public:
  GridGraph() = default;

  std::size_t dim() const noexcept { return dim_; }
  double spacing() const noexcept { return h_; }
  double finest_spacing() const noexcept { return h_finest_; }
  std::size_t levels() const noexcept { return levels_; }

  std::size_t node_count() const noexcept { return depth_.size(); }
  /// Directed edge count (each undirected edge appears twice).
  std::size_t edge_count() const noexcept { return targets_.size(); }

  std::span<const double> node(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  Point node_point(std::size_t i) const { return Point(node(i)); }
  double depth(std::size_t i) const noexcept { return depth_[i]; }
  double inverse_depth(std::size_t i) const noexcept { return inv_depth_[i]; }
  /// Finest level the node belongs to.
  std::uint8_t level(std::size_t i) const noexcept { return level_[i]; }
  std::uint32_t component(std::size_t i) const noexcept { return component_[i]; }
  std::size_t component_count() const noexcept { return component_count_; }

  std::size_t edges_begin(std::size_t i) const noexcept { return offsets_[i]; }
  std::size_t edges_end(std::size_t i) const noexcept { return offsets_[i + 1]; }
  std::uint32_t target(std::size_t e) const noexcept { return targets_[e]; }
  double length(std::size_t e) const noexcept { return lengths_[e]; }
  /// Index of the opposite directed edge.
  std::size_t reverse(std::size_t e) const noexcept { return reverse_[e]; }

  /// Node nearest to x whose segment to x lies in D.
  std::size_t snap(const Domain& domain, const Point& x) const;

  std::vector<std::size_t> nearest_nodes(std::span<const double> q, std::size_t k) const {
    return tree_.nearest(q, k);
  }

 private:
  friend GridGraph build_grid(const Domain&, double, const Box&, const GridOptions&);

  std::size_t dim_ = 0;
  double h_ = 0.0;
  double h_finest_ = 0.0;
  std::size_t levels_ = 0;
  std::vector<double> coords_;
  std::vector<double> depth_;
  std::vector<double> inv_depth_;
  std::vector<std::uint8_t> level_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> lengths_;
  std::vector<std::uint32_t> reverse_;
  std::vector<std::uint32_t> component_;
  std::size_t component_count_ = 0;
  KdTree tree_;
};

/// Builds the grid over `window`. Throws NumericalFailure when no admissible
/// node exists ("grid too coarse") or the node cap is exceeded.
GridGraph build_grid(const Domain& domain, double h, const Box& window,
                     const GridOptions& options = {});

/// Refinement toward the cusp tip deep enough to place nodes at depth
/// ~min_depth inside the horns; std::nullopt for kinds without a cusp.
std::optional<GridRefinement> cusp_refinement(const Domain& domain, double h, double min_depth);

}  // namespace dmetrics
