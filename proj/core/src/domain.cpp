#include "dmetrics/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dmetrics/error.hpp"

namespace dmetrics {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTruncationFactor = 1e6;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

double cross2(std::span<const double> o, std::span<const double> a, std::span<const double> b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool on_segment(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
         std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

// Closed segments [p1, p2] and [q1, q2] in the plane share a point.
bool segments_intersect(std::span<const double> p1, std::span<const double> p2,
                        std::span<const double> q1, std::span<const double> q2) {
  const double d1 = cross2(q1, q2, p1);
  const double d2 = cross2(q1, q2, p2);
  const double d3 = cross2(p1, p2, q1);
  const double d4 = cross2(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

double segment_distance(std::span<const double> p, std::span<const double> a,
                        std::span<const double> b) {
  double ab2 = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ab2 += (b[i] - a[i]) * (b[i] - a[i]);
    t += (p[i] - a[i]) * (b[i] - a[i]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = a[i] + t * (b[i] - a[i]) - p[i];
    s += q * q;
  }
  return std::sqrt(s);
}

Point normalized(const Point& v) {
  const double n = norm(v);
  return v * (1.0 / n);
}

Point perp(const Point& u) { return Point{-u[1], u[0]}; }

// Samples collected per boundary component, then packed into an atlas.
struct AtlasBuilder {
  std::size_t dim;
  std::vector<double> coords;
  std::vector<double> radii;

  void add(const Point& p, double r) {
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    radii.push_back(r);
  }

  // Circle samples at the given angles (radians, measured from `axis`).
  void add_circle(const Point& c, double radius, const Point& axis, std::vector<double> angles) {
    for (double& a : angles) a = std::remainder(a, 2.0 * kPi);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    const std::size_t k = angles.size();
    const Point v = perp(axis);
    for (std::size_t i = 0; i < k; ++i) {
      const double prev = i == 0 ? angles[0] - (angles[k - 1] - 2.0 * kPi) : angles[i] - angles[i - 1];
      const double next = i + 1 == k ? angles[0] + 2.0 * kPi - angles[i] : angles[i + 1] - angles[i];
      const double r = 0.5 * radius * std::max(prev, next);
      add(c + radius * std::cos(angles[i]) * axis + radius * std::sin(angles[i]) * v, r);
    }
  }

  void add_uniform_circle(const Point& c, double radius, const Point& axis, std::size_t m) {
    std::vector<double> angles(m);
    for (std::size_t i = 0; i < m; ++i) angles[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    add_circle(c, radius, axis, std::move(angles));
  }

  // k >= 2 points on [a, b] including both ends.
  void add_segment(const Point& a, const Point& b, std::size_t k) {
    k = std::max<std::size_t>(k, 2);
    const double step = distance(a, b) / static_cast<double>(k - 1);
    for (std::size_t j = 0; j < k; ++j) {
      add(lerp(a, b, static_cast<double>(j) / static_cast<double>(k - 1)), 0.5 * step);
    }
  }

  // Radius from the k nearest neighbours; used for surfaces (n >= 3) where
  // no arc-length parametrization is at hand.
  void fill_radii_from_neighbours(std::size_t first, std::size_t k) {
    const std::size_t count = radii.size() - first;
    std::span<const double> block(coords.data() + first * dim, count * dim);
    const KdTree tree(block, dim);
    for (std::size_t i = 0; i < count; ++i) {
      const auto nn = tree.nearest(tree.point(i), k + 1);
      radii[first + i] = distance(tree.point(i), tree.point(nn.back()));
    }
  }

  BoundaryAtlas finish(bool infinity, Point far_center = {},
                       double far_radius = std::numeric_limits<double>::infinity()) {
    return BoundaryAtlas(dim, std::move(coords), std::move(radii), infinity, std::move(far_center),
                         far_radius);
  }
};

// Quasi-uniform unit vectors on S^{n-1}: Fibonacci lattice for n = 3, seeded
// Gaussian directions otherwise.
std::vector<Point> sphere_directions(std::size_t n, std::size_t m) {
  std::vector<Point> out;
  out.reserve(m);
  if (n == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < m; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      out.push_back(Point{rho * std::cos(phi), rho * std::sin(phi), z});
    }
    return out;
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (out.size() < m) {
    Point p(n);
    for (std::size_t d = 0; d < n; ++d) p[d] = gauss(rng);
    const double len = norm(p);
    if (len > 1e-9) out.push_back(p * (1.0 / len));
  }
  return out;
}

// Orthonormal basis of the hyperplane orthogonal to the unit vector u.
std::vector<Point> complement_basis(const Point& u) {
  const std::size_t n = u.dim();
  std::vector<Point> basis;
  for (std::size_t k = 0; k < n && basis.size() + 1 < n; ++k) {
    Point e(n);
    e[k] = 1.0;
    Point v = e - dot(e, u) * u;
    for (const Point& b : basis) v -= dot(v, b) * b;
    if (norm(v) > 1e-8) basis.push_back(normalized(v));
  }
  return basis;
}

double polygon_depth(const ConvexPolygonParams& p, std::span<const double> x) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t k = p.vertices.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Point& a = p.vertices[i];
    const Point& b = p.vertices[(i + 1) % k];
    const double ex = b[0] - a[0];
    const double ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    // counter-clockwise orientation: interior on the left
    d = std::min(d, (ex * (x[1] - a[1]) - ey * (x[0] - a[0])) / len);
  }
  return d;
}

Box centered_box(const Point& c, double half) {
  Point lo = c;
  Point hi = c;
  for (std::size_t i = 0; i < c.dim(); ++i) {
    lo[i] -= half;
    hi[i] += half;
  }
  return {lo, hi};
}

// Reference (or grid) box of a half-space: `tangential` half-width along the
// boundary, `depth` extent into the domain.
Box half_space_box(const HalfSpaceParams& p, double tangential, double depth) {
  const std::size_t n = p.normal.dim();
  const Point foot = p.offset * p.normal;
  std::size_t axis = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(std::abs(p.normal[i]) - 1.0) < 1e-14) axis = i;
  }
  if (axis == n) return centered_box(foot + 0.5 * depth * p.normal, std::max(tangential, 0.5 * depth));
  Point lo = foot;
  Point hi = foot;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == axis) {
      if (p.normal[i] > 0) {
        hi[i] += depth;
      } else {
        lo[i] -= depth;
      }
    } else {
      lo[i] -= tangential;
      hi[i] += tangential;
    }
  }
  return {lo, hi};
}

}  // namespace

std::string_view to_string(DomainKind kind) noexcept {
  switch (kind) {
    case DomainKind::ball: return "ball";
    case DomainKind::half_space: return "half_space";
    case DomainKind::convex_polygon: return "convex_polygon";
    case DomainKind::slit_disk: return "slit_disk";
    case DomainKind::tangent_disk_cusp: return "tangent_disk_cusp";
    case DomainKind::punctured_disk: return "punctured_disk";
  }
  return "unknown";
}

DomainKind parse_domain_kind(std::string_view name) {
  for (auto k : {DomainKind::ball, DomainKind::half_space, DomainKind::convex_polygon,
                 DomainKind::slit_disk, DomainKind::tangent_disk_cusp, DomainKind::punctured_disk}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown domain kind \"" + std::string(name) + "\"");
}

Domain Domain::make(DomainParams params) {
  std::size_t dim = 0;
  std::visit(
      Overloaded{
          [&](BallParams& p) {
            dim = p.center.dim();
            require(dim >= 2, "ball: dimension must be at least 2");
            require(p.center.finite(), "ball: center must be finite");
            require(finite_positive(p.radius), "ball: radius must be positive");
          },
          [&](HalfSpaceParams& p) {
            dim = p.normal.dim();
            require(dim >= 2, "half_space: dimension must be at least 2");
            require(p.normal.finite() && norm(p.normal) > 0.0, "half_space: normal must be nonzero");
            require(std::isfinite(p.offset), "half_space: offset must be finite");
            require(finite_positive(p.scale), "half_space: scale must be positive");
            const double len = norm(p.normal);
            p.normal = p.normal * (1.0 / len);
            p.offset /= len;
          },
          [&](ConvexPolygonParams& p) {
            dim = 2;
            auto& v = p.vertices;
            require(v.size() >= 3, "convex_polygon: at least 3 vertices required");
            for (const Point& q : v) {
              require(q.dim() == 2, "convex_polygon: vertices must be 2-dimensional");
              require(q.finite(), "convex_polygon: vertices must be finite");
            }
            const std::size_t k = v.size();
            int sign = 0;
            double turning = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
              const Point& a = v[i];
              const Point& b = v[(i + 1) % k];
              const Point& c = v[(i + 2) % k];
              const double cr = cross2(a.coords(), b.coords(), c.coords());
              const int s = cr > 0 ? 1 : (cr < 0 ? -1 : 0);
              require(s != 0, "polygon not convex (collinear or repeated vertices)");
              if (sign == 0) sign = s;
              require(s == sign, "polygon not convex");
              const double t1 = std::atan2(b[1] - a[1], b[0] - a[0]);
              const double t2 = std::atan2(c[1] - b[1], c[0] - b[0]);
              turning += std::remainder(t2 - t1, 2.0 * kPi);
            }
            require(std::abs(std::abs(turning) - 2.0 * kPi) < 1e-6, "polygon not simple");
            if (sign < 0) std::reverse(v.begin(), v.end());
          },
          [&](SlitDiskParams& p) {
            dim = 2;
            require(p.center.dim() == 2 && p.tip.dim() == 2 && p.end.dim() == 2,
                    "slit_disk: points must be 2-dimensional");
            require(finite_positive(p.radius), "slit_disk: radius must be positive");
            require(distance(p.tip, p.center) < p.radius, "slit_disk: slit tip must lie inside the disk");
            require(distance(p.end, p.center) <= p.radius * (1.0 + 1e-12),
                    "slit_disk: slit end must lie in the closed disk");
            require(distance(p.tip, p.end) > 0.0, "slit_disk: slit must have positive length");
          },
          [&](TangentDiskCuspParams& p) {
            dim = 2;
            require(p.center.dim() == 2 && p.direction.dim() == 2,
                    "tangent_disk_cusp: points must be 2-dimensional");
            require(finite_positive(p.outer_radius), "tangent_disk_cusp: outer radius must be positive");
            require(finite_positive(p.inner_radius) && p.inner_radius < p.outer_radius,
                    "tangent_disk_cusp: inner radius must lie in (0, outer radius)");
            require(norm(p.direction) > 0.0, "tangent_disk_cusp: direction must be nonzero");
            p.direction = normalized(p.direction);
          },
          [&](PuncturedDiskParams& p) {
            dim = 2;
            require(p.center.dim() == 2 && p.puncture.dim() == 2,
                    "punctured_disk: points must be 2-dimensional");
            require(finite_positive(p.scale), "punctured_disk: scale must be positive");
            if (!p.full_plane) {
              require(finite_positive(p.radius), "punctured_disk: radius must be positive");
              require(distance(p.puncture, p.center) < p.radius,
                      "punctured_disk: puncture must lie inside the disk");
            }
          },
      },
      params);
  return Domain(std::move(params), dim);
}

Domain Domain::ball(Point center, double radius) { return make(BallParams{std::move(center), radius}); }

Domain Domain::half_space(Point normal, double offset, double scale) {
  return make(HalfSpaceParams{std::move(normal), offset, scale});
}

Domain Domain::convex_polygon(std::vector<Point> vertices) {
  return make(ConvexPolygonParams{std::move(vertices)});
}

Domain Domain::slit_disk(Point center, double radius, Point tip, Point end) {
  return make(SlitDiskParams{std::move(center), radius, std::move(tip), std::move(end)});
}

Domain Domain::tangent_disk_cusp(Point center, double outer_radius, double inner_radius,
                                 Point direction) {
  return make(TangentDiskCuspParams{std::move(center), outer_radius, inner_radius, std::move(direction)});
}

Domain Domain::punctured_disk(Point center, double radius, Point puncture) {
  return make(PuncturedDiskParams{std::move(center), radius, std::move(puncture), false, radius});
}

Domain Domain::punctured_plane(Point puncture, double scale) {
  Point c = puncture;
  return make(PuncturedDiskParams{std::move(c), 0.0, std::move(puncture), true, scale});
}

DomainKind Domain::kind() const noexcept {
  return static_cast<DomainKind>(params_.index());
}

bool Domain::bounded() const noexcept {
  if (std::holds_alternative<HalfSpaceParams>(params_)) return false;
  if (const auto* p = std::get_if<PuncturedDiskParams>(&params_)) return !p->full_plane;
  return true;
}

bool Domain::apollonian() const noexcept {
  if (const auto* p = std::get_if<PuncturedDiskParams>(&params_)) return !p->full_plane;
  return true;
}

bool Domain::inner_degenerate() const noexcept {
  if (const auto* p = std::get_if<PuncturedDiskParams>(&params_)) return p->full_plane;
  return false;
}

double Domain::scale() const noexcept {
  return std::visit(
      Overloaded{
          [](const BallParams& p) { return p.radius; },
          [](const HalfSpaceParams& p) { return p.scale; },
          [](const ConvexPolygonParams& p) {
            double d = 0.0;
            for (const Point& a : p.vertices) {
              for (const Point& b : p.vertices) d = std::max(d, distance(a, b));
            }
            return 0.5 * d;
          },
          [](const SlitDiskParams& p) { return p.radius; },
          [](const TangentDiskCuspParams& p) { return p.outer_radius; },
          [](const PuncturedDiskParams& p) { return p.full_plane ? p.scale : p.radius; },
      },
      params_);
}

Box Domain::reference_box() const {
  return std::visit(
      Overloaded{
          [](const BallParams& p) { return centered_box(p.center, p.radius); },
          [](const HalfSpaceParams& p) { return half_space_box(p, 2.0 * p.scale, 4.0 * p.scale); },
          [](const ConvexPolygonParams& p) {
            Box b{p.vertices.front(), p.vertices.front()};
            for (const Point& v : p.vertices) {
              for (std::size_t i = 0; i < 2; ++i) {
                b.lo[i] = std::min(b.lo[i], v[i]);
                b.hi[i] = std::max(b.hi[i], v[i]);
              }
            }
            return b;
          },
          [](const SlitDiskParams& p) { return centered_box(p.center, p.radius); },
          [](const TangentDiskCuspParams& p) { return centered_box(p.center, p.outer_radius); },
          [](const PuncturedDiskParams& p) {
            return p.full_plane ? centered_box(p.puncture, 2.0 * p.scale)
                                : centered_box(p.center, p.radius);
          },
      },
      params_);
}

Box Domain::grid_window() const {
  if (const auto* p = std::get_if<HalfSpaceParams>(&params_)) {
    return half_space_box(*p, 3.0 * p->scale, 6.0 * p->scale);
  }
  if (const auto* p = std::get_if<PuncturedDiskParams>(&params_); p && p->full_plane) {
    return centered_box(p->puncture, 4.0 * p->scale);
  }
  return reference_box();
}

void Domain::check_dim(const Point& x) const {
  if (x.dim() != dim_) {
    throw InvalidArgument("dimension mismatch: point has " + std::to_string(x.dim()) +
                          " coordinates, domain has n = " + std::to_string(dim_));
  }
}

bool Domain::contains(const Point& x) const {
  check_dim(x);
  return x.finite() && depth(x.coords()) > 0.0;
}

double Domain::dist_to_boundary(const Point& x) const {
  check_dim(x);
  const double d = x.finite() ? depth(x.coords()) : 0.0;
  if (!(d > 0.0)) throw OutsideDomain("point outside domain: (" + to_string(x) + ")");
  return d;
}

double Domain::depth(std::span<const double> x) const noexcept {
  const double d = std::visit(
      Overloaded{
          [&](const BallParams& p) { return p.radius - distance(x, p.center.coords()); },
          [&](const HalfSpaceParams& p) { return dot(p.normal.coords(), x) - p.offset; },
          [&](const ConvexPolygonParams& p) { return polygon_depth(p, x); },
          [&](const SlitDiskParams& p) {
            return std::min(p.radius - distance(x, p.center.coords()),
                            segment_distance(x, p.tip.coords(), p.end.coords()));
          },
          [&](const TangentDiskCuspParams& p) {
            const double r_in = p.inner_radius;
            double ci[2] = {p.center[0] + (p.outer_radius - r_in) * p.direction[0],
                            p.center[1] + (p.outer_radius - r_in) * p.direction[1]};
            return std::min(p.outer_radius - distance(x, p.center.coords()),
                            distance(x, std::span<const double>(ci, 2)) - r_in);
          },
          [&](const PuncturedDiskParams& p) {
            const double to_puncture = distance(x, p.puncture.coords());
            if (p.full_plane) return to_puncture;
            return std::min(p.radius - distance(x, p.center.coords()), to_puncture);
          },
      },
      params_);
  return d > 0.0 ? d : 0.0;
}

bool Domain::segment_inside(std::span<const double> a, std::span<const double> b) const noexcept {
  if (!(depth(a) > 0.0) || !(depth(b) > 0.0)) return false;
  return std::visit(
      Overloaded{
          [](const BallParams&) { return true; },
          [](const HalfSpaceParams&) { return true; },
          [](const ConvexPolygonParams&) { return true; },
          [&](const SlitDiskParams& p) {
            return !segments_intersect(a, b, p.tip.coords(), p.end.coords());
          },
          [&](const TangentDiskCuspParams& p) {
            const double r_in = p.inner_radius;
            double ci[2] = {p.center[0] + (p.outer_radius - r_in) * p.direction[0],
                            p.center[1] + (p.outer_radius - r_in) * p.direction[1]};
            return segment_distance(std::span<const double>(ci, 2), a, b) > r_in;
          },
          [&](const PuncturedDiskParams& p) {
            return segment_distance(p.puncture.coords(), a, b) > 0.0;
          },
      },
      params_);
}

BoundaryAtlas Domain::boundary_samples(std::size_t m) const {
  if (m < 8) throw InvalidArgument("boundary_samples: m must be at least 8");
  AtlasBuilder out{dim_, {}, {}};
  return std::visit(
      Overloaded{
          [&](const BallParams& p) {
            if (dim_ == 2) {
              out.add_uniform_circle(p.center, p.radius, Point{1.0, 0.0}, m);
            } else {
              for (const Point& u : sphere_directions(dim_, m)) out.add(p.center + p.radius * u, 0.0);
              out.fill_radii_from_neighbours(0, 2 * dim_);
            }
            return out.finish(false);
          },
          [&](const HalfSpaceParams& p) {
            const Point foot = p.offset * p.normal;
            const double s = p.scale;
            const double w = kTruncationFactor * s;
            if (dim_ == 2) {
              const Point t = perp(p.normal);
              // Cells of length ~ s + min(b^2 / s, kappa |b|): the tangent-angle
              // density near the foot, switching to log-uniform spacing far out
              // so every cell stays short relative to its distance.
              constexpr double kappa = 20.0;
              const double atan_k = std::atan(kappa);
              auto u_of = [&](double b) {
                return b <= kappa * s ? std::atan(b / s)
                                      : atan_k + std::log((s + kappa * b) / (s + kappa * kappa * s)) / kappa;
              };
              auto b_of = [&](double u) {
                return u <= atan_k ? s * std::tan(u)
                                   : ((s + kappa * kappa * s) * std::exp(kappa * (u - atan_k)) - s) / kappa;
              };
              const double u_max = u_of(w);
              auto add_side = [&](std::size_t n, double sign) {
                for (std::size_t i = 0; i < n; ++i) {
                  const double b0 = b_of(u_max * static_cast<double>(i) / static_cast<double>(n));
                  const double b1 = i + 1 == n ? w : b_of(u_max * static_cast<double>(i + 1) / static_cast<double>(n));
                  out.add(foot + (sign * 0.5 * (b0 + b1)) * t, 0.5 * (b1 - b0));
                }
              };
              add_side(m / 2, -1.0);
              add_side(m - m / 2, 1.0);
            } else {
              // Stereographic image of a quasi-uniform sphere sample.
              const auto basis = complement_basis(p.normal);
              for (const Point& u : sphere_directions(dim_, m)) {
                const double z = u[dim_ - 1];
                if (1.0 - z < 1e-12) continue;
                Point b = foot;
                bool inside_window = true;
                double r2 = 0.0;
                for (std::size_t k = 0; k + 1 < dim_; ++k) r2 += u[k] * u[k];
                if (std::sqrt(r2) / (1.0 - z) * s > w) inside_window = false;
                if (!inside_window) continue;
                for (std::size_t k = 0; k + 1 < dim_; ++k) b += (s * u[k] / (1.0 - z)) * basis[k];
                out.add(b, 0.0);
              }
              out.fill_radii_from_neighbours(0, 2 * dim_);
            }
            return out.finish(true, foot, w);
          },
          [&](const ConvexPolygonParams& p) {
            const std::size_t k = p.vertices.size();
            double perimeter = 0.0;
            for (std::size_t i = 0; i < k; ++i) perimeter += distance(p.vertices[i], p.vertices[(i + 1) % k]);
            for (std::size_t i = 0; i < k; ++i) {
              const Point& a = p.vertices[i];
              const Point& b = p.vertices[(i + 1) % k];
              const double len = distance(a, b);
              const auto cnt = std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::llround(static_cast<double>(m) * len / perimeter)));
              const double step = len / static_cast<double>(cnt);
              for (std::size_t j = 0; j < cnt; ++j) {
                out.add(lerp(a, b, static_cast<double>(j) / static_cast<double>(cnt)), 0.5 * step);
              }
            }
            return out.finish(false);
          },
          [&](const SlitDiskParams& p) {
            const double lc = 2.0 * kPi * p.radius;
            const double ls = 2.0 * distance(p.tip, p.end);  // both sides of the slit
            auto mc = static_cast<std::size_t>(std::llround(static_cast<double>(m) * lc / (lc + ls)));
            mc = std::clamp<std::size_t>(mc, 4, m - 2);
            out.add_uniform_circle(p.center, p.radius, Point{1.0, 0.0}, mc);
            out.add_segment(p.tip, p.end, m - mc);
            return out.finish(false);
          },
          [&](const TangentDiskCuspParams& p) {
            const double lo = p.outer_radius;
            const double li = p.inner_radius;
            auto mo = static_cast<std::size_t>(std::llround(static_cast<double>(m) * lo / (lo + li)));
            mo = std::clamp<std::size_t>(mo, 4, m - 4);
            const Point ci = p.center + (p.outer_radius - p.inner_radius) * p.direction;
            out.add_uniform_circle(p.center, p.outer_radius, p.direction, mo);
            out.add_uniform_circle(ci, p.inner_radius, p.direction, m - mo);
            return out.finish(false);
          },
          [&](const PuncturedDiskParams& p) {
            if (p.full_plane) {
              out.add(p.puncture, 0.0);
              return out.finish(true, p.puncture, std::numeric_limits<double>::infinity());
            }
            out.add_uniform_circle(p.center, p.radius, Point{1.0, 0.0}, m - 1);
            out.add(p.puncture, 0.0);
            return out.finish(false);
          },
      },
      params_);
}

BoundaryAtlas Domain::graded_boundary_samples(std::size_t m, double min_depth) const {
  const auto* p = std::get_if<TangentDiskCuspParams>(&params_);
  if (p == nullptr) return boundary_samples(m);
  if (m < 8) throw InvalidArgument("boundary_samples: m must be at least 8");
  if (!finite_positive(min_depth)) throw InvalidArgument("graded_boundary_samples: min_depth must be positive");

  const double ro = p->outer_radius;
  const double ri = p->inner_radius;
  auto mo = static_cast<std::size_t>(std::llround(static_cast<double>(m) * ro / (ro + ri)));
  mo = std::clamp<std::size_t>(mo, 4, m - 4);
  const std::size_t mi = m - mo;

  // Horn width ~ c s^2 at horn coordinate s; sample spacing is kept below
  // eta * width(s) from where the uniform spacing stops resolving the horn
  // down to the depth requested.
  const double c = 0.5 * (1.0 / ri - 1.0 / ro);
  const double eta = 0.5;
  const double uniform_step = 2.0 * kPi * ro / static_cast<double>(mo);
  const double s_start = std::min(0.5 * ri, std::sqrt(uniform_step / (eta * c)));
  const double s_min = 0.5 * std::sqrt(2.0 * min_depth / c);
  std::vector<double> horn;
  for (double s = s_start; s > s_min;) {
    horn.push_back(s);
    s -= eta * c * s * s;
  }

  std::vector<double> outer_angles(mo);
  std::vector<double> inner_angles(mi);
  for (std::size_t i = 0; i < mo; ++i) outer_angles[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(mo);
  for (std::size_t i = 0; i < mi; ++i) inner_angles[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(mi);
  for (double s : horn) {
    for (double sign : {-1.0, 1.0}) {
      outer_angles.push_back(sign * std::asin(s / ro));
      inner_angles.push_back(sign * std::asin(s / ri));
    }
  }
  AtlasBuilder out{dim_, {}, {}};
  out.add_circle(p->center, ro, p->direction, std::move(outer_angles));
  out.add_circle(p->center + (ro - ri) * p->direction, ri, p->direction, std::move(inner_angles));
  return out.finish(false);
}

Domain Domain::transformed(double s, const Point& t) const {
  if (!finite_positive(s)) throw InvalidArgument("similarity: scale factor must be positive");
  check_dim(t);
  auto map = [&](const Point& x) { return s * x + t; };
  return std::visit(
      Overloaded{
          [&](const BallParams& p) { return ball(map(p.center), s * p.radius); },
          [&](const HalfSpaceParams& p) {
            return half_space(p.normal, s * p.offset + dot(p.normal, t), s * p.scale);
          },
          [&](const ConvexPolygonParams& p) {
            std::vector<Point> v;
            for (const Point& q : p.vertices) v.push_back(map(q));
            return convex_polygon(std::move(v));
          },
          [&](const SlitDiskParams& p) {
            return slit_disk(map(p.center), s * p.radius, map(p.tip), map(p.end));
          },
          [&](const TangentDiskCuspParams& p) {
            return tangent_disk_cusp(map(p.center), s * p.outer_radius, s * p.inner_radius, p.direction);
          },
          [&](const PuncturedDiskParams& p) {
            if (p.full_plane) return punctured_plane(map(p.puncture), s * p.scale);
            return punctured_disk(map(p.center), s * p.radius, map(p.puncture));
          },
      },
      params_);
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind()) << "(n=" << dim_;
  std::visit(
      Overloaded{
          [&](const BallParams& p) { os << ", center=(" << to_string(p.center) << "), radius=" << p.radius; },
          [&](const HalfSpaceParams& p) {
            os << ", normal=(" << to_string(p.normal) << "), offset=" << p.offset;
          },
          [&](const ConvexPolygonParams& p) { os << ", vertices=" << p.vertices.size(); },
          [&](const SlitDiskParams& p) {
            os << ", radius=" << p.radius << ", slit=(" << to_string(p.tip) << ")-(" << to_string(p.end) << ")";
          },
          [&](const TangentDiskCuspParams& p) {
            os << ", outer=" << p.outer_radius << ", inner=" << p.inner_radius;
          },
          [&](const PuncturedDiskParams& p) {
            os << (p.full_plane ? ", plane" : ", radius=" + std::to_string(p.radius)) << ", puncture=("
               << to_string(p.puncture) << ")";
          },
      },
      params_);
  os << ")";
  return os.str();
}

Point sphere_inversion(const Point& x, const Point& center, double radius) {
  if (x.dim() != center.dim()) throw InvalidArgument("sphere_inversion: dimension mismatch");
  if (!finite_positive(radius)) throw InvalidArgument("sphere_inversion: radius must be positive");
  const Point v = x - center;
  const double r2 = dot(v, v);
  if (r2 == 0.0) throw InvalidArgument("inversion pole");
  return center + (radius * radius / r2) * v;
}

CuspFrame cusp_frame(const TangentDiskCuspParams& p) {
  CuspFrame f;
  f.center = p.center;
  f.axis = p.direction;
  f.tangent = perp(p.direction);
  f.outer_radius = p.outer_radius;
  f.inner_radius = p.inner_radius;
  f.tip = p.center + p.outer_radius * p.direction;
  return f;
}

Point CuspFrame::centerline(double s) const {
  const double xo = std::sqrt(outer_radius * outer_radius - s * s);
  const double xi = (outer_radius - inner_radius) + std::sqrt(inner_radius * inner_radius - s * s);
  return center + (0.5 * (xo + xi)) * axis + s * tangent;
}

double CuspFrame::width(double s) const {
  const double xo = std::sqrt(outer_radius * outer_radius - s * s);
  const double xi = (outer_radius - inner_radius) + std::sqrt(inner_radius * inner_radius - s * s);
  return xo - xi;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) noexcept {
  return segment_distance(p.coords(), a.coords(), b.coords());
}

std::string to_string(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) os << ' ';
    os << p[i];
  }
  return os.str();
}

Point parse_point(const std::string& text) {
  std::vector<double> c;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
        throw InvalidArgument("bad coordinate");
      }
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse point \"" + text + "\"");
    }
  }
  if (c.empty()) throw InvalidArgument("cannot parse point \"" + text + "\"");
  return Point(std::move(c));
}

}  // namespace dmetrics
