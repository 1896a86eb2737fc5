#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "dmetrics/kdtree.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

/// The two one-point suprema whose sum is the Apollonian distance:
///   toward_x = sup_a log(|a-x| / |a-y|),  toward_y = sup_b log(|b-y| / |b-x|).
struct OnePointSups {
  double toward_x = 0.0;
  double toward_y = 0.0;
  double sum() const noexcept { return toward_x + toward_y; }
};

/// A finite sample of the boundary of a domain, optionally augmented by the
/// point at infinity. Each sample carries a cover radius: every boundary
/// point lies within that arc distance of some sample, which is what turns a
/// sampled supremum into a certified bracket.
class BoundaryAtlas {
 public:
  BoundaryAtlas() = default;
  BoundaryAtlas(std::size_t dim, std::vector<double> samples, std::vector<double> cover_radii,
                bool includes_infinity, Point far_center = {},
                double far_radius = std::numeric_limits<double>::infinity());

  std::size_t size() const noexcept { return radii_.size(); }
  bool empty() const noexcept { return radii_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  bool includes_infinity() const noexcept { return includes_infinity_; }

  Point sample(std::size_t i) const { return Point(sample_coords(i)); }
  std::span<const double> sample_coords(std::size_t i) const noexcept {
    return {samples_.data() + i * dim_, dim_};
  }
  std::span<const double> flat_samples() const noexcept { return samples_; }
  double cover_radius(std::size_t i) const noexcept { return radii_[i]; }
  double max_cover_radius() const noexcept { return max_radius_; }
  /// Cover radius of the sample closest to q.
  double cover_radius_near(std::span<const double> q) const;

  /// Radius of the truncation window for unbounded boundaries (infinite when
  /// the whole boundary is sampled).
  double far_radius() const noexcept { return far_radius_; }

  /// Exact suprema over the samples (plus the infinity term when flagged).
  /// Branch and bound on a k-d tree: a sample at distance R from the midpoint
  /// of [x, y] contributes at most log((R + r) / (R - r)), r = |x - y| / 2.
  OnePointSups sampled_sups(std::span<const double> x, std::span<const double> y) const;

  /// Certified upper bounds for the continuous suprema, given d_D(x), d_D(y).
  /// Per sample, the gradient of a -> log(|a-x|/|a-y|) is bounded by
  /// min(|x-y| / (|a-x||a-y|), 1/|a-x| + 1/|a-y|) over the sample's cover
  /// ball. O(size()).
  OnePointSups certified_sups(std::span<const double> x, std::span<const double> y, double dx,
                              double dy) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> samples_;
  std::vector<double> radii_;
  double max_radius_ = 0.0;
  bool includes_infinity_ = false;
  Point far_center_;
  double far_radius_ = std::numeric_limits<double>::infinity();
  KdTree tree_;
};

}  // namespace dmetrics
