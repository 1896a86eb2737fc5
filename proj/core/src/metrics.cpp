#include "dmetrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dmetrics/error.hpp"

namespace dmetrics {

MetricValue apollonian(const Domain& domain, const Point& x, const Point& y,
                       const BoundaryAtlas& atlas) {
  if (atlas.empty()) throw InvalidArgument("apollonian: empty boundary atlas");
  if (atlas.dim() != domain.dim()) throw InvalidArgument("apollonian: atlas dimension mismatch");
  const double dx = domain.dist_to_boundary(x);
  const double dy = domain.dist_to_boundary(y);
  MetricValue out;
  out.pseudometric = !domain.apollonian();
  if (x == y) return out;

  const OnePointSups lo = atlas.sampled_sups(x.coords(), y.coords());
  const OnePointSups hi = atlas.certified_sups(x.coords(), y.coords(), dx, dy);
  out.value = std::max(0.0, lo.sum());
  out.lower = out.value;
  out.upper = std::max(out.value, hi.sum());
  return out;
}

double apollonian_sampled(const BoundaryAtlas& atlas, std::span<const double> x,
                          std::span<const double> y) {
  return std::max(0.0, atlas.sampled_sups(x, y).sum());
}

MetricValue j_metric(const Domain& domain, const Point& x, const Point& y) {
  const double dmin = std::min(domain.dist_to_boundary(x), domain.dist_to_boundary(y));
  return MetricValue::exact(std::log1p(distance(x, y) / dmin));
}

MetricValue j_prime(const Domain& domain, const Point& x, const Point& y, const MetricValue& rho) {
  const double dmin = std::min(domain.dist_to_boundary(x), domain.dist_to_boundary(y));
  if (!(rho.lower >= 0.0) || rho.lower > rho.value || rho.value > rho.upper) {
    throw InvalidArgument("j_prime: inner diameter bracket is inconsistent");
  }
  return {std::log1p(rho.value / dmin), std::log1p(rho.lower / dmin), std::log1p(rho.upper / dmin),
          false};
}

double log_density_ratio(const Domain& domain, const Point& x, const Point& y) {
  return std::abs(std::log(domain.dist_to_boundary(x) / domain.dist_to_boundary(y)));
}

}  // namespace dmetrics
