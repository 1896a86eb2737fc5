#include "dmetrics/atlas.hpp"

#include <algorithm>
#include <cmath>

#include "dmetrics/error.hpp"

namespace dmetrics {

BoundaryAtlas::BoundaryAtlas(std::size_t dim, std::vector<double> samples,
                             std::vector<double> cover_radii, bool includes_infinity,
                             Point far_center, double far_radius)
    : dim_(dim),
      samples_(std::move(samples)),
      radii_(std::move(cover_radii)),
      includes_infinity_(includes_infinity),
      far_center_(std::move(far_center)),
      far_radius_(far_radius) {
  if (dim_ == 0 || samples_.size() != radii_.size() * dim_) {
    throw InvalidArgument("boundary atlas: sample/radius count mismatch");
  }
  for (double r : radii_) max_radius_ = std::max(max_radius_, r);
  tree_ = KdTree(samples_, dim_);
}

double BoundaryAtlas::cover_radius_near(std::span<const double> q) const {
  if (empty()) throw InvalidArgument("boundary atlas is empty");
  return radii_[tree_.nearest(q, 1).front()];
}

OnePointSups BoundaryAtlas::sampled_sups(std::span<const double> x,
                                         std::span<const double> y) const {
  if (empty()) throw InvalidArgument("boundary atlas is empty");
  const double r = 0.5 * distance(x, y);
  if (r == 0.0) return {};

  // Coordinates relative to the midpoint m, with e = (x - m) / r:
  //   |a-x|^2 / |a-y|^2 = (A + r^2 - 2 r t) / (A + r^2 + 2 r t),
  // A = |a-m|^2, t = <a-m, e>. Over a box both A and the range of t are
  // bounded, which gives a direction-aware pruning bound.
  std::vector<double> mid(dim_), e(dim_);
  for (std::size_t d = 0; d < dim_; ++d) {
    mid[d] = 0.5 * (x[d] + y[d]);
    e[d] = (x[d] - mid[d]) / r;
  }
  const double r2 = r * r;
  auto box_terms = [&](std::span<const double> lo, std::span<const double> hi, double& a_min,
                       double& t_min, double& t_max) {
    a_min = 0.0;
    t_min = t_max = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double l = lo[d] - mid[d];
      const double h = hi[d] - mid[d];
      const double g = l > 0.0 ? l : (h < 0.0 ? -h : 0.0);
      a_min += g * g;
      t_min += std::min(e[d] * l, e[d] * h);
      t_max += std::max(e[d] * l, e[d] * h);
    }
  };
  // Upper bound of (A + r^2 + 2 r tau) / (A + r^2 - 2 r tau) over points with
  // A >= a_min, 0 <= tau <= big_t and A >= tau^2.
  auto ratio_bound = [&](double a_min, double big_t) {
    const double inf = std::numeric_limits<double>::infinity();
    const double root = std::sqrt(a_min);
    auto g = [&](double a, double tau) {
      const double den = a + r2 - 2.0 * r * tau;
      return den > 0.0 ? (a + r2 + 2.0 * r * tau) / den : inf;
    };
    double b = g(a_min, std::min(big_t, root));
    if (big_t > root) {
      // On A = tau^2 the ratio is ((tau + r) / (tau - r))^2, unbounded at tau = r.
      if (root <= r && r <= big_t) return inf;
      if (big_t < r) b = std::max(b, g(big_t * big_t, big_t));
    }
    return b;
  };

  // Squared distance ratios; the log is taken once at the end.
  double best_x = includes_infinity_ ? 1.0 : 0.0;
  double best_y = best_x;
  tree_.max_first(
      [&](std::span<const double> lo, std::span<const double> hi) {
        double a_min, t_min, t_max;
        box_terms(lo, hi, a_min, t_min, t_max);
        return t_min < 0.0 ? ratio_bound(a_min, -t_min) : 1.0;
      },
      best_x,
      [&](std::size_t i) {
        const auto a = sample_coords(i);
        best_x = std::max(best_x, squared_distance(a, x) / squared_distance(a, y));
      });
  tree_.max_first(
      [&](std::span<const double> lo, std::span<const double> hi) {
        double a_min, t_min, t_max;
        box_terms(lo, hi, a_min, t_min, t_max);
        return t_max > 0.0 ? ratio_bound(a_min, t_max) : 1.0;
      },
      best_y,
      [&](std::size_t i) {
        const auto a = sample_coords(i);
        best_y = std::max(best_y, squared_distance(a, y) / squared_distance(a, x));
      });
  return {0.5 * std::log(best_x), 0.5 * std::log(best_y)};
}

OnePointSups BoundaryAtlas::certified_sups(std::span<const double> x, std::span<const double> y,
                                           double dx, double dy) const {
  if (empty()) throw InvalidArgument("boundary atlas is empty");
  const double sep = distance(x, y);
  if (sep == 0.0) return {};
  double up_x = -std::numeric_limits<double>::infinity();
  double up_y = up_x;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto a = sample_coords(i);
    const double ax = distance(a, x);
    const double ay = distance(a, y);
    const double v = std::log(ax / ay);
    const double r = radii_[i];
    const double near_x = std::max(dx, ax - r);
    const double near_y = std::max(dy, ay - r);
    const double grad = std::min(sep / (near_x * near_y), 1.0 / near_x + 1.0 / near_y);
    up_x = std::max(up_x, v + r * grad);
    up_y = std::max(up_y, -v + r * grad);
  }
  if (includes_infinity_) {
    up_x = std::max(up_x, 0.0);
    up_y = std::max(up_y, 0.0);
  }
  if (std::isfinite(far_radius_)) {
    const double cx = distance(x, far_center_.coords());
    const double cy = distance(y, far_center_.coords());
    const double w = far_radius_;
    if (w > std::max(cx, cy)) {
      up_x = std::max(up_x, std::log((w + cx) / (w - cy)));
      up_y = std::max(up_y, std::log((w + cy) / (w - cx)));
    } else {
      up_x = up_y = std::numeric_limits<double>::infinity();
    }
  }
  return {up_x, up_y};
}

}  // namespace dmetrics
