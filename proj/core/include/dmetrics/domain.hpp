#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dmetrics/atlas.hpp"
#include "dmetrics/point.hpp"

namespace dmetrics {

enum class DomainKind {
  ball,
  half_space,
  convex_polygon,
  slit_disk,
  tangent_disk_cusp,
  punctured_disk,
};

std::string_view to_string(DomainKind kind) noexcept;
DomainKind parse_domain_kind(std::string_view name);

/// Open ball B(center, radius) in R^n.
struct BallParams {
  Point center;
  double radius = 1.0;
};

/// Open half-space {x : <normal, x> > offset}; `scale` sets the
/// characteristic length used for windows and boundary sampling.
struct HalfSpaceParams {
  Point normal;
  double offset = 0.0;
  double scale = 1.0;
};

/// Interior of a convex polygon in R^2 (either orientation).
struct ConvexPolygonParams {
  std::vector<Point> vertices;
};

/// Disk minus the closed segment [tip, end]; tip strictly inside the disk.
struct SlitDiskParams {
  Point center{0.0, 0.0};
  double radius = 1.0;
  Point tip{0.0, 0.0};
  Point end{1.0, 0.0};
};

/// B(center, outer_radius) minus the closed disk of radius inner_radius that
/// is internally tangent at center + outer_radius * direction. The two horns
/// meeting at the tangency point form an outward cusp.
struct TangentDiskCuspParams {
  Point center{0.0, 0.0};
  double outer_radius = 1.0;
  double inner_radius = 0.9;
  Point direction{1.0, 0.0};
};

/// Disk minus one point, or (full_plane) the plane minus one point.
struct PuncturedDiskParams {
  Point center{0.0, 0.0};
  double radius = 1.0;
  Point puncture{0.0, 0.0};
  bool full_plane = false;
  double scale = 1.0;
};

using DomainParams = std::variant<BallParams, HalfSpaceParams, ConvexPolygonParams, SlitDiskParams,
                                  TangentDiskCuspParams, PuncturedDiskParams>;

/// A proper subdomain of R^n with an exact distance-to-boundary oracle.
/// Immutable after construction; every member is safe to call concurrently.
class Domain {
 public:
  /// Validates the parameters; throws InvalidArgument naming the failing
  /// constraint.
  static Domain make(DomainParams params);

  static Domain ball(Point center, double radius);
  static Domain half_space(Point normal, double offset, double scale = 1.0);
  static Domain convex_polygon(std::vector<Point> vertices);
  static Domain slit_disk(Point center, double radius, Point tip, Point end);
  static Domain tangent_disk_cusp(Point center, double outer_radius, double inner_radius,
                                  Point direction);
  static Domain punctured_disk(Point center, double radius, Point puncture);
  static Domain punctured_plane(Point puncture, double scale = 1.0);

  DomainKind kind() const noexcept;
  const DomainParams& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return dim_; }
  bool bounded() const noexcept;
  /// Complement not contained in a hyperplane, so the Apollonian distance is
  /// a metric.
  bool apollonian() const noexcept;
  /// Complement contained in an (n-2)-dimensional plane, so the Apollonian
  /// inner metric degenerates.
  bool inner_degenerate() const noexcept;

  /// Characteristic length (radius, polygon diameter, or the given scale).
  double scale() const noexcept;
  /// Bounded domains: the bounding box. Unbounded: the reference region used
  /// for sampling query points.
  Box reference_box() const;
  /// Window for grid construction; for unbounded kinds it encloses the
  /// reference box with room for geodesics between reference points.
  Box grid_window() const;

  bool contains(const Point& x) const;
  /// Exact d_D(x); throws OutsideDomain when x is not in D.
  double dist_to_boundary(const Point& x) const;
  /// d_D(x) for x in D and 0 otherwise. No dimension check.
  double depth(std::span<const double> x) const noexcept;
  /// True when the closed segment [a, b] lies in D.
  bool segment_inside(std::span<const double> a, std::span<const double> b) const noexcept;
  bool segment_inside(const Point& a, const Point& b) const noexcept {
    return segment_inside(a.coords(), b.coords());
  }

  /// m boundary points, arc-length uniform per component with components
  /// weighted by length; unbounded boundaries are sampled uniformly in the
  /// stereographic angle out to a truncation radius of 1e6 * scale().
  BoundaryAtlas boundary_samples(std::size_t m) const;

  /// boundary_samples(m) plus extra samples graded toward thin features
  /// (the cusp horns), fine enough to resolve points with d_D down to
  /// min_depth. Identical to boundary_samples(m) for kinds without a cusp.
  BoundaryAtlas graded_boundary_samples(std::size_t m, double min_depth) const;

  /// The domain mapped by x -> s x + t (s > 0).
  Domain transformed(double s, const Point& t) const;

  std::string describe() const;

 private:
  Domain(DomainParams params, std::size_t dim) : params_(std::move(params)), dim_(dim) {}

  void check_dim(const Point& x) const;

  DomainParams params_;
  std::size_t dim_ = 0;
};

/// c + r^2 (x - c) / |x - c|^2; throws InvalidArgument at the pole x = c.
Point sphere_inversion(const Point& x, const Point& center, double radius);

/// Local geometry of a cusp domain: horn coordinate s along the tangent line
/// through the tangency point and the matching centerline point.
struct CuspFrame {
  Point tip;
  Point axis;     // unit, from center toward the tip
  Point tangent;  // unit, perpendicular to axis
  double outer_radius = 1.0;
  double inner_radius = 0.9;
  Point center;

  /// Point midway between the two circles at signed horn coordinate s.
  Point centerline(double s) const;
  /// Width of the horn at horn coordinate s.
  double width(double s) const;
};

CuspFrame cusp_frame(const TangentDiskCuspParams& p);

}  // namespace dmetrics
