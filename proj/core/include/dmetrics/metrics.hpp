#pragma once

#include "dmetrics/atlas.hpp"
#include "dmetrics/domain.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

/// A distance estimate with a certification bracket lower <= value <= upper.
/// Exact quantities have lower == value == upper.
struct MetricValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Set on Apollonian values of non-Apollonian domains, where the
  /// Apollonian distance is only a pseudometric.
  bool pseudometric = false;

  static MetricValue exact(double v) { return {v, v, v, false}; }
  bool is_exact() const noexcept { return lower == upper; }
  double width() const noexcept { return upper - lower; }
};

/// Apollonian distance over the atlas (plus infinity when flagged), computed
/// as the sum of the two one-point suprema. value = lower = sampled supremum;
/// upper adds the certified sampling gap.
MetricValue apollonian(const Domain& domain, const Point& x, const Point& y,
                       const BoundaryAtlas& atlas);

/// Sampled Apollonian distance only, without membership checks or bracket.
double apollonian_sampled(const BoundaryAtlas& atlas, std::span<const double> x,
                          std::span<const double> y);

/// log(1 + |x - y| / min(d_D(x), d_D(y))).
MetricValue j_metric(const Domain& domain, const Point& x, const Point& y);

/// log(1 + rho / min(d_D(x), d_D(y))) with the bracket carried over from the
/// inner diameter bracket.
MetricValue j_prime(const Domain& domain, const Point& x, const Point& y, const MetricValue& rho);

/// |log(d_D(x) / d_D(y))|.
double log_density_ratio(const Domain& domain, const Point& x, const Point& y);

}  // namespace dmetrics
