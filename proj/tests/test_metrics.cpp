#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dmetrics/domain.hpp"
#include "dmetrics/error.hpp"
#include "dmetrics/metrics.hpp"

namespace dmetrics {
namespace {

// Independent O(m^2) pair supremum over an explicit boundary sample; the
// point at infinity contributes a ratio of 1.
double brute_alpha(const std::vector<Point>& boundary, bool with_infinity, const Point& x,
                   const Point& y) {
  double best = with_infinity ? 0.0 : -INFINITY;
  for (const auto& a : boundary) {
    for (const auto& b : boundary) {
      best = std::max(best, std::log(distance(a, x) * distance(b, y) /
                                     (distance(a, y) * distance(b, x))));
    }
    if (with_infinity) {
      best = std::max(best, std::log(distance(a, x) / distance(a, y)));
      best = std::max(best, std::log(distance(a, y) / distance(a, x)));
    }
  }
  return best;
}

std::vector<Point> atlas_points(const BoundaryAtlas& atlas) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < atlas.size(); ++i) out.push_back(atlas.sample(i));
  return out;
}

double hyperbolic_disk(const Point& x, const Point& y) {
  const double num = 2.0 * std::pow(distance(x, y), 2);
  const double den = (1.0 - dot(x, x)) * (1.0 - dot(y, y));
  return std::acosh(1.0 + num / den);
}

TEST(Apollonian, MatchesBruteForcePairSupremum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& d : {Domain::ball({0.0, 0.0}, 1.0),
                        Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0}),
                        Domain::convex_polygon({{-1.0, -1.0}, {1.0, -1.0}, {0.0, 1.0}}),
                        Domain::half_space({0.0, 1.0}, -1.0)}) {
    const auto atlas = d.boundary_samples(400);
    const auto pts = atlas_points(atlas);
    int checked = 0;
    while (checked < 20) {
      const Point x{u(rng), u(rng)};
      const Point y{u(rng), u(rng)};
      if (!d.contains(x) || !d.contains(y)) continue;
      ++checked;
      const double fast = apollonian(d, x, y, atlas).value;
      EXPECT_NEAR(fast, brute_alpha(pts, atlas.includes_infinity(), x, y), 1e-12) << d.describe();
    }
  }
}

TEST(Apollonian, DiskEqualsHyperbolicDistance) {
  const auto d = Domain::ball({0.0, 0.0}, 1.0);
  const auto atlas = d.boundary_samples(10'000);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int i = 0; i < 50; ++i) {
    const Point x{u(rng), u(rng)};
    const Point y{u(rng), u(rng)};
    if (norm(x) > 0.95 || norm(y) > 0.95) continue;
    const auto a = apollonian(d, x, y, atlas);
    const double exact = hyperbolic_disk(x, y);
    EXPECT_LE(a.lower, exact + 1e-12);
    EXPECT_GE(a.upper, exact - 1e-12);
    EXPECT_NEAR(a.value, exact, 1e-3);
  }
}

TEST(Apollonian, HalfPlaneUsesInfinity) {
  const auto d = Domain::half_space({0.0, 1.0}, 0.0);
  const auto atlas = d.boundary_samples(10'000);
  const auto a = apollonian(d, {0.0, 1.0}, {0.0, 2.0}, atlas);
  EXPECT_NEAR(a.value, std::log(2.0), 1e-3);
  EXPECT_LE(a.lower, std::log(2.0) + 1e-12);
  EXPECT_GE(a.upper, std::log(2.0) - 1e-12);
}

TEST(Apollonian, IsAPseudometricOnSamples) {
  const auto d = Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0});
  const auto atlas = d.boundary_samples(2000);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  while (pts.size() < 30) {
    Point p{u(rng), u(rng)};
    if (d.contains(p)) pts.push_back(p);
  }
  for (const auto& x : pts) {
    EXPECT_NEAR(apollonian_sampled(atlas, x.coords(), x.coords()), 0.0, 1e-15);
    for (const auto& y : pts) {
      const double xy = apollonian_sampled(atlas, x.coords(), y.coords());
      EXPECT_NEAR(xy, apollonian_sampled(atlas, y.coords(), x.coords()), 1e-12);
      for (const auto& z : pts) {
        EXPECT_LE(xy, apollonian_sampled(atlas, x.coords(), z.coords()) +
                          apollonian_sampled(atlas, z.coords(), y.coords()) + 1e-12);
      }
    }
  }
}

TEST(Apollonian, NonApollonianDomainFlagged) {
  const auto d = Domain::punctured_plane({0.0, 0.0});
  const auto atlas = d.boundary_samples(10);
  const auto a = apollonian(d, {1.0, 0.0}, {2.0, 0.0}, atlas);
  EXPECT_TRUE(a.pseudometric);
}

TEST(Apollonian, RejectsOutsidePoints) {
  const auto d = Domain::ball({0.0, 0.0}, 1.0);
  const auto atlas = d.boundary_samples(100);
  EXPECT_THROW(apollonian(d, {2.0, 0.0}, {0.0, 0.0}, atlas), OutsideDomain);
}

TEST(JMetric, ClosedForm) {
  const auto d = Domain::half_space({0.0, 1.0}, 0.0);
  const auto j = j_metric(d, {0.0, 1.0}, {3.0, 2.0});
  EXPECT_TRUE(j.is_exact());
  EXPECT_DOUBLE_EQ(j.value, std::log1p(std::sqrt(10.0) / 1.0));
  EXPECT_DOUBLE_EQ(log_density_ratio(d, {0.0, 1.0}, {3.0, 2.0}), std::log(2.0));
}

TEST(JMetric, TriangleInequality) {
  const auto d = Domain::convex_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  while (pts.size() < 25) {
    Point p{u(rng), u(rng)};
    if (d.contains(p)) pts.push_back(p);
  }
  for (const auto& x : pts) {
    for (const auto& y : pts) {
      for (const auto& z : pts) {
        EXPECT_LE(j_metric(d, x, y).value,
                  j_metric(d, x, z).value + j_metric(d, z, y).value + 1e-12);
      }
    }
  }
}

TEST(JMetric, JPrimeCarriesRhoBracket) {
  const auto d = Domain::ball({0.0, 0.0}, 1.0);
  const MetricValue rho{0.5, 0.45, 0.55, false};
  const auto jp = j_prime(d, {0.0, 0.0}, {0.5, 0.0}, rho);
  EXPECT_DOUBLE_EQ(jp.lower, std::log1p(0.45 / 0.5));
  EXPECT_DOUBLE_EQ(jp.upper, std::log1p(0.55 / 0.5));
  EXPECT_DOUBLE_EQ(jp.value, std::log1p(1.0));
}

}  // namespace
}  // namespace dmetrics
