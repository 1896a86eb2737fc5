#include "dmetrics/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dmetrics/error.hpp"
#include "dmetrics/parallel.hpp"

namespace dmetrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

// Platform-independent uniform double in [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

Point random_direction(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    Point u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = uniform(rng, -1.0, 1.0);
    const double r = norm(u);
    if (r > 1e-3 && r <= 1.0) return u * (1.0 / r);
  }
}

Point uniform_point(const Domain& domain, std::mt19937_64& rng, double min_depth) {
  const Box box = domain.reference_box();
  for (std::size_t attempt = 0; attempt < 1'000'000; ++attempt) {
    Point p(domain.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = uniform(rng, box.lo[i], box.hi[i]);
    if (domain.depth(p.coords()) > min_depth) return p;
  }
  throw NumericalFailure("sample_pairs: no point with d_D > " + std::to_string(min_depth) +
                         " found in the reference box");
}

// Uniform start point, pushed along a random ray toward its exit point so
// that the remaining gap is log-uniform in [2 min_depth, exit distance].
Point boundary_biased_point(const Domain& domain, std::mt19937_64& rng, double min_depth) {
  const double reach = 2.0 * domain.reference_box().diagonal();
  for (std::size_t attempt = 0; attempt < 100'000; ++attempt) {
    const Point u = uniform_point(domain, rng, min_depth);
    const Point w = random_direction(rng, domain.dim());
    if (domain.segment_inside(u, u + reach * w)) continue;
    double lo = 0.0;
    double hi = reach;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (domain.segment_inside(u, u + mid * w) ? lo : hi) = mid;
    }
    const double floor = 2.0 * min_depth;
    if (!(lo > floor)) continue;
    const double gap = std::exp(uniform(rng, std::log(floor), std::log(lo)));
    const Point p = u + (lo - gap) * w;
    if (domain.depth(p.coords()) > min_depth) return p;
  }
  throw NumericalFailure("sample_pairs: boundary-biased sampling failed");
}

Point axis(std::size_t n, std::size_t i) {
  Point e(n);
  e[i] = 1.0;
  return e;
}

Point perp2(const Point& v) { return Point{-v[1], v[0]}; }

double local_spacing(const GridGraph& grid, std::size_t node) {
  return std::ldexp(grid.spacing(), -static_cast<int>(grid.level(node)));
}

// Running sup of a per-pair ratio with its bracket.
class RatioSup {
 public:
  explicit RatioSup(std::string name) { entry_.name = std::move(name); }

  void add(double value, double lo, double hi, const PairEvaluation& ev) {
    ++entry_.sample_size;
    if (value > best_) {
      best_ = value;
      entry_.witness = std::make_pair(ev.x, ev.y);
    }
    lo_ = std::max(lo_, lo);
    hi_ = std::max(hi_, hi);
  }

  ConstantEntry finish() {
    if (entry_.sample_size == 0) {
      entry_.status = EntryStatus::skipped;
      entry_.note = "no admissible pairs";
      return entry_;
    }
    entry_.witness_ratio = best_;
    entry_.estimate = std::max(1.0, best_);
    entry_.lower = std::max(1.0, lo_);
    entry_.upper = std::max(entry_.estimate, hi_);
    entry_.status = entry_.estimate > kDivergenceThreshold ? EntryStatus::unbounded : EntryStatus::finite;
    return entry_;
  }

  static ConstantEntry skipped(std::string name, std::string note) {
    ConstantEntry e;
    e.name = std::move(name);
    e.status = EntryStatus::skipped;
    e.note = std::move(note);
    return e;
  }

 private:
  ConstantEntry entry_;
  double best_ = -kInf;
  double lo_ = -kInf;
  double hi_ = -kInf;
};

double safe_div(double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? kInf : 0.0); }

std::vector<Point> sphere_directions3(std::size_t count) {
  std::vector<Point> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    out.push_back(Point{r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

std::vector<Point> unit_directions(std::size_t n, std::size_t count) {
  if (n == 2) {
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      out.push_back(Point{std::cos(a), std::sin(a)});
    }
    return out;
  }
  if (n == 3) return sphere_directions3(count);
  std::mt19937_64 rng(0x5eed);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_direction(rng, n));
  return out;
}

}  // namespace

std::string_view to_string(PairPolicy p) noexcept {
  switch (p) {
    case PairPolicy::uniform: return "uniform";
    case PairPolicy::boundary_biased: return "boundary_biased";
    case PairPolicy::adversarial: return "adversarial";
  }
  return "unknown";
}

PairPolicy parse_pair_policy(std::string_view name) {
  for (auto p : {PairPolicy::uniform, PairPolicy::boundary_biased, PairPolicy::adversarial}) {
    if (to_string(p) == name) return p;
  }
  if (name == "boundary-biased") return PairPolicy::boundary_biased;
  throw InvalidArgument("unknown pair policy \"" + std::string(name) + "\"");
}

PairSample sample_pairs(const Domain& domain, PairPolicy policy, std::size_t count,
                        std::uint64_t seed, double min_depth) {
  if (policy == PairPolicy::adversarial) {
    PairSample s = adversarial_pairs(domain);
    s.seed = seed;
    return s;
  }
  if (!(min_depth > 0.0)) throw InvalidArgument("sample_pairs: min_depth must be positive");
  PairSample s;
  s.policy = policy;
  s.seed = seed;
  s.pairs.reserve(count);
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    return policy == PairPolicy::uniform ? uniform_point(domain, rng, min_depth)
                                         : boundary_biased_point(domain, rng, min_depth);
  };
  for (std::size_t i = 0; i < count; ++i) {
    Point x = draw();
    Point y = draw();
    s.pairs.emplace_back(std::move(x), std::move(y));
  }
  return s;
}

PairSample adversarial_pairs(const Domain& domain) {
  PairSample s;
  s.policy = PairPolicy::adversarial;
  const std::vector<double> eps{0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
  const std::size_t n = domain.dim();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SlitDiskParams>) {
          const Point mid = lerp(p.tip, p.end, 0.5);
          const Point dir = (p.end - p.tip) * (1.0 / distance(p.tip, p.end));
          const Point nrm = perp2(dir);
          for (double e : eps) s.pairs.emplace_back(mid + (e * p.radius) * nrm, mid - (e * p.radius) * nrm);
        } else if constexpr (std::is_same_v<T, TangentDiskCuspParams>) {
          const CuspFrame f = cusp_frame(p);
          for (double t : {0.3, 0.1, 0.03, 0.01, 0.005, 0.003}) {
            const double sc = t * p.outer_radius;
            s.pairs.emplace_back(f.centerline(sc), f.centerline(-sc));
          }
        } else if constexpr (std::is_same_v<T, BallParams>) {
          const Point e0 = axis(n, 0);
          const Point e1 = axis(n, 1);
          for (double e : eps) {
            const double r = p.radius * (1.0 - e);
            s.pairs.emplace_back(p.center + r * e0,
                                 p.center + (r * std::cos(0.5)) * e0 + (r * std::sin(0.5)) * e1);
          }
        } else if constexpr (std::is_same_v<T, HalfSpaceParams>) {
          const Point foot = p.offset * p.normal;
          Point t = n == 2 ? perp2(p.normal) : axis(n, std::abs(p.normal[0]) < 0.9 ? 0 : 1);
          t = t - dot(t, p.normal) * p.normal;
          t = t * (1.0 / norm(t));
          for (double e : eps) {
            const Point base = foot + (e * p.scale) * p.normal;
            s.pairs.emplace_back(base - (0.5 * p.scale) * t, base + (0.5 * p.scale) * t);
          }
        } else if constexpr (std::is_same_v<T, ConvexPolygonParams>) {
          // Near the first vertex, one point above each of its two edges.
          const std::size_t k = p.vertices.size();
          const Point& v = p.vertices[0];
          const Point a = lerp(v, p.vertices[1], 0.5);
          const Point b = lerp(v, p.vertices[k - 1], 0.5);
          const Point c = lerp(lerp(v, p.vertices[1], 0.5), p.vertices[k - 1], 0.5);
          for (double e : eps) {
            s.pairs.emplace_back(lerp(a, c, e), lerp(b, c, e));
          }
        } else if constexpr (std::is_same_v<T, PuncturedDiskParams>) {
          const double sc = p.full_plane ? p.scale : p.radius;
          const Point e0 = axis(n, 0);
          for (double e : eps) s.pairs.emplace_back(p.puncture + (e * sc) * e0, p.puncture - (e * sc) * e0);
        }
      },
      domain.params());
  for (const auto& [x, y] : s.pairs) {
    if (!domain.contains(x) || !domain.contains(y)) {
      throw NumericalFailure("adversarial_pairs: generated point outside " + domain.describe());
    }
  }
  return s;
}

double min_sample_depth(const Domain& domain, const PairSample& sample) {
  double d = kInf;
  for (const auto& [x, y] : sample.pairs) d = std::min({d, domain.dist_to_boundary(x), domain.dist_to_boundary(y)});
  return d;
}

Workspace::Workspace(Domain domain, double h, std::size_t m, double min_depth, bool alpha_weights,
                     std::size_t max_nodes)
    : domain_(std::move(domain)) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("workspace: h must be positive");
  if (!(min_depth > 0.0)) throw InvalidArgument("workspace: min_depth must be positive");
  atlas_ = domain_.graded_boundary_samples(m, min_depth);
  GridOptions options;
  options.max_nodes = max_nodes;
  if (auto ref = cusp_refinement(domain_, h, min_depth); ref && ref->levels > 0) options.refinement = ref;
  grid_ = build_grid(domain_, h, domain_.grid_window(), options);
  if (alpha_weights) alpha_ = std::make_unique<ApollonianEdgeWeights>(grid_, atlas_);
}

PairEvaluation evaluate_pair(const Workspace& ws, const Point& x, const Point& y,
                             const EvaluationOptions& options) {
  const Domain& D = ws.domain();
  PairEvaluation ev;
  ev.x = x;
  ev.y = y;
  ev.dx = D.dist_to_boundary(x);
  ev.dy = D.dist_to_boundary(y);
  ev.separation = distance(x, y);
  ev.log_density = log_density_ratio(D, x, y);
  ev.j = j_metric(D, x, y);
  ev.alpha = apollonian(D, x, y, ws.atlas());
  ev.has_lambda = options.lambda;
  ev.has_rho = options.rho;
  ev.has_alphatilde = options.alphatilde && ws.alpha_weights() != nullptr;
  if (ev.degenerate()) {
    ev.k_path.vertices = {x};
    ev.jprime = MetricValue::exact(0.0);
    return ev;
  }
  try {
    const GridGraph& G = ws.grid();
    ev.local_h = std::min(local_spacing(G, G.snap(D, x)), local_spacing(G, G.snap(D, y)));
    PathResult k = shortest_path(G, D, x, y, WeightKind::quasihyperbolic);
    ev.k = k.metric;
    ev.k_path = std::move(k.path);
    if (ev.has_lambda) ev.lambda = shortest_path(G, D, x, y, WeightKind::euclidean).metric;
    if (ev.has_rho) {
      ev.rho = inner_diameter(D, x, y, G).metric;
      ev.jprime = j_prime(D, x, y, ev.rho);
    }
    if (ev.has_alphatilde) {
      ev.alphatilde = shortest_path(G, D, x, y, WeightKind::apollonian, ws.alpha_weights()).metric;
    }
  } catch (const NumericalFailure& e) {
    ev.failure = e.what();
  }
  return ev;
}

std::vector<PairEvaluation> evaluate_pairs(const Workspace& ws, const PairSample& sample,
                                           const EvaluationOptions& options) {
  std::vector<PairEvaluation> out(sample.pairs.size());
  parallel_for(sample.pairs.size(), [&](std::size_t i) {
    out[i] = evaluate_pair(ws, sample.pairs[i].first, sample.pairs[i].second, options);
  });
  return out;
}

ArcRatios arc_ratios(const Domain& domain, const Polyline& path) {
  ArcRatios r;
  const auto& v = path.vertices;
  const std::size_t n = v.size();
  if (n < 2) return r;
  std::vector<double> len(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) len[i] = len[i - 1] + distance(v[i - 1], v[i]);
  r.length = len[n - 1];
  // Prefix and suffix diameters.
  std::vector<double> pre(n, 0.0), suf(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double m = pre[i - 1];
    for (std::size_t j = 0; j < i; ++j) m = std::max(m, distance(v[i], v[j]));
    pre[i] = m;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    double m = suf[i + 1];
    for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, distance(v[i], v[j]));
    suf[i] = m;
  }
  r.diameter = pre[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = domain.depth(v[i].coords());
    r.length_cigar = std::max(r.length_cigar, safe_div(std::min(len[i], r.length - len[i]), d));
    r.diameter_cigar = std::max(r.diameter_cigar, safe_div(std::min(pre[i], suf[i]), d));
  }
  return r;
}

std::string_view to_string(EntryStatus s) noexcept {
  switch (s) {
    case EntryStatus::finite: return "finite";
    case EntryStatus::unbounded: return "no finite constant at this resolution";
    case EntryStatus::skipped: return "skipped";
  }
  return "unknown";
}

std::vector<ConstantEntry> uniformity_constants(const Workspace& ws,
                                                const std::vector<PairEvaluation>& evals) {
  RatioSup c("c"), cu("c_uniform"), john("john");
  for (const auto& ev : evals) {
    if (!ev.ok() || ev.degenerate()) continue;
    const ArcRatios a = arc_ratios(ws.domain(), ev.k_path);
    const double turn_u = a.length / ev.separation;
    cu.add(std::max(a.length_cigar, turn_u), std::max(a.length_cigar, turn_u),
           std::max(a.length_cigar, turn_u), ev);
    john.add(a.diameter_cigar, a.diameter_cigar, a.diameter_cigar, ev);
    if (ev.has_lambda) {
      const double turn = safe_div(a.length, ev.lambda.value);
      c.add(std::max(a.length_cigar, turn), std::max(a.length_cigar, safe_div(a.length, ev.lambda.upper)),
            std::max(a.length_cigar, safe_div(a.length, ev.lambda.lower)), ev);
    }
  }
  return {c.finish(), cu.finish(), john.finish()};
}

std::vector<ConstantEntry> diameter_uniformity(const Workspace& ws,
                                               const std::vector<PairEvaluation>& evals) {
  RatioSup nu2("nu2"), c3("c3");
  for (const auto& ev : evals) {
    if (!ev.ok() || ev.degenerate()) continue;
    const ArcRatios a = arc_ratios(ws.domain(), ev.k_path);
    nu2.add(a.diameter_cigar, a.diameter_cigar, a.diameter_cigar, ev);
    if (ev.has_rho) {
      c3.add(std::max(a.diameter_cigar, safe_div(a.diameter, ev.rho.value)),
             std::max(a.diameter_cigar, safe_div(a.diameter, ev.rho.upper)),
             std::max(a.diameter_cigar, safe_div(a.diameter, ev.rho.lower)), ev);
    }
  }
  return {nu2.finish(), c3.finish()};
}

std::vector<ConstantEntry> ratio_constants(const Workspace& ws,
                                           const std::vector<PairEvaluation>& evals) {
  const bool apollonian = ws.domain().apollonian();
  RatioSup c1("c1"), c2("c2"), L("L"), K("K"), mu5("mu5");
  for (const auto& ev : evals) {
    if (!ev.ok() || ev.degenerate() || ev.separation <= 10.0 * ev.local_h) continue;
    if (ev.has_rho) {
      c1.add(safe_div(ev.k.value, ev.jprime.value), safe_div(ev.k.lower, ev.jprime.upper),
             safe_div(ev.k.upper, ev.jprime.lower), ev);
    }
    if (!apollonian) continue;
    if (ev.has_rho && ev.has_alphatilde) {
      c2.add(safe_div(ev.alphatilde.value, ev.jprime.value),
             safe_div(ev.alphatilde.lower, ev.jprime.upper),
             safe_div(ev.alphatilde.upper, ev.jprime.lower), ev);
    }
    L.add(safe_div(ev.j.value, ev.alpha.value), safe_div(ev.j.value, ev.alpha.upper),
          safe_div(ev.j.value, ev.alpha.lower), ev);
    K.add(safe_div(ev.k.value, ev.alpha.value), safe_div(ev.k.lower, ev.alpha.upper),
          safe_div(ev.k.upper, ev.alpha.lower), ev);
    if (ev.has_rho) {
      mu5.add(safe_div(ev.jprime.value, ev.alpha.value), safe_div(ev.jprime.lower, ev.alpha.upper),
              safe_div(ev.jprime.upper, ev.alpha.lower), ev);
    }
  }
  if (!apollonian) {
    const char* note = "pseudometric, skipped";
    return {c1.finish(), RatioSup::skipped("c2", note), RatioSup::skipped("L", note),
            RatioSup::skipped("K", note), RatioSup::skipped("mu5", note)};
  }
  return {c1.finish(), c2.finish(), L.finish(), K.finish(), mu5.finish()};
}

IsotropyValue quasi_isotropy(const Domain& domain, const BoundaryAtlas& atlas, const Point& x,
                             double r, std::size_t directions) {
  const double d = domain.dist_to_boundary(x);
  if (!(r > 0.0) || !(r < d)) {
    throw InvalidArgument("quasi_isotropy: radius must satisfy 0 < r < d_D(x)");
  }
  if (directions < 16) throw InvalidArgument("quasi_isotropy: at least 16 directions required");
  double lo = kInf, hi = 0.0, lo_cert = kInf, hi_cert = 0.0;
  for (const Point& w : unit_directions(domain.dim(), directions)) {
    const MetricValue a = apollonian(domain, x, x + r * w, atlas);
    lo = std::min(lo, a.value);
    hi = std::max(hi, a.value);
    lo_cert = std::min(lo_cert, a.lower);
    hi_cert = std::max(hi_cert, a.upper);
  }
  return {safe_div(hi, lo), safe_div(hi_cert, lo_cert)};
}

std::vector<IsotropyRow> quasi_isotropy_table(const Domain& domain, const BoundaryAtlas& atlas,
                                              const Point& x, std::size_t directions) {
  const double d = domain.dist_to_boundary(x);
  const double floor = 10.0 * atlas.cover_radius_near(x.coords());
  std::vector<IsotropyRow> rows;
  for (int s = 1; s <= 6; ++s) {
    const double r = std::ldexp(d, -s);
    if (r < floor) break;
    rows.push_back({s, r, quasi_isotropy(domain, atlas, x, r, directions)});
  }
  return rows;
}

ConstantEntry isotropy_constant(const Workspace& ws, const PairSample& sample, std::size_t max_points) {
  if (!ws.domain().apollonian()) return RatioSup::skipped("mu3", "pseudometric, skipped");
  RatioSup mu3("mu3");
  for (std::size_t i = 0; i < std::min(max_points, sample.pairs.size()); ++i) {
    const Point& x = sample.pairs[i].first;
    PairEvaluation ev;
    ev.x = ev.y = x;
    for (const auto& row : quasi_isotropy_table(ws.domain(), ws.atlas(), x)) {
      mu3.add(row.value.ratio, row.value.ratio, row.value.upper, ev);
    }
  }
  ConstantEntry e = mu3.finish();
  if (e.status != EntryStatus::skipped) e.note = "finite-radius proxy; witness is the centre point";
  return e;
}

namespace {

DyadicChain walk_chain(const Domain& domain, const std::vector<Point>& v, std::size_t apex) {
  DyadicChain c;
  const double d0 = domain.depth(v[0].coords());
  c.points.push_back(v[0]);
  c.depths.push_back(d0);
  c.positions.push_back({0, 0.0});
  const double dmax = domain.depth(v[apex].coords());
  double target = 2.0 * d0;
  std::size_t k = 0;
  double t0 = 0.0;
  while (target <= dmax * (1.0 + 1e-12)) {
    // A target that rounds just past the apex depth is the apex itself.
    const double level = std::min(target, dmax);
    while (k < apex && domain.depth(v[k + 1].coords()) < level) {
      ++k;
      t0 = 0.0;
    }
    if (k >= apex) break;
    double lo = t0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (domain.depth(lerp(v[k], v[k + 1], mid).coords()) < level ? lo : hi) = mid;
    }
    Point p = lerp(v[k], v[k + 1], hi);
    c.depths.push_back(domain.depth(p.coords()));
    c.points.push_back(std::move(p));
    c.positions.push_back({k, hi});
    t0 = hi;
    target *= 2.0;
  }
  return c;
}

}  // namespace

DyadicChains dyadic_chain(const Domain& domain, const Polyline& path) {
  validate_polyline(domain, path);
  const auto& v = path.vertices;
  DyadicChains out;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = domain.depth(v[i].coords());
    if (d > best) {
      best = d;
      out.apex = i;
    }
  }
  out.from_start = walk_chain(domain, v, out.apex);
  std::vector<Point> rev(v.rbegin(), v.rend());
  out.from_end = walk_chain(domain, rev, v.size() - 1 - out.apex);
  return out;
}

Polyline sub_arc(const Polyline& path, const ArcPosition& a, const Point& pa, const ArcPosition& b,
                 const Point& pb) {
  Polyline out;
  out.vertices.push_back(pa);
  for (std::size_t i = a.segment + 1; i <= b.segment && i < path.size(); ++i) {
    if (!(path.vertices[i] == out.vertices.back())) out.vertices.push_back(path.vertices[i]);
  }
  if (!(pb == out.vertices.back())) out.vertices.push_back(pb);
  return out;
}

bool ChainDiagnostics::finite() const noexcept {
  return std::isfinite(b1) && std::isfinite(b2) && std::isfinite(b3);
}

ChainDiagnostics chain_diagnostics(const Domain& domain, const GridGraph& grid, const Polyline& path) {
  ChainDiagnostics out;
  out.chains = dyadic_chain(domain, path);
  const Polyline reversed{std::vector<Point>(path.vertices.rbegin(), path.vertices.rend())};
  std::size_t index = 0;
  auto run = [&](const DyadicChain& c, const Polyline& p) {
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      ChainLink link;
      link.index = index++;
      const Polyline sub = sub_arc(p, c.positions[i], c.points[i], c.positions[i + 1], c.points[i + 1]);
      link.rho = inner_diameter(domain, c.points[i], c.points[i + 1], grid).metric;
      link.b1 = safe_div(path_diameter(sub), link.rho.value);
      link.b2 = link.rho.value / c.depths[i];
      for (const Point& w : sub.vertices) link.b3 = std::max(link.b3, safe_div(c.depths[i], domain.depth(w.coords())));
      out.b1 = std::max(out.b1, link.b1);
      out.b2 = std::max(out.b2, link.b2);
      out.b3 = std::max(out.b3, link.b3);
      out.links.push_back(link);
    }
  };
  run(out.chains.from_start, path);
  run(out.chains.from_end, reversed);
  return out;
}

std::vector<InequalityCheck> verify_inequalities(const Workspace& ws,
                                                 const std::vector<PairEvaluation>& evals) {
  const bool apollonian = ws.domain().apollonian();
  std::vector<InequalityCheck> checks(5);
  checks[0].name = "log_density <= alpha";
  checks[1].name = "alpha <= 2j";
  checks[2].name = "j <= j'";
  checks[3].name = "j' <= k";
  checks[4].name = "alphatilde <= 2k";
  for (auto& c : checks) c.worst_margin = kInf;
  if (!apollonian) {
    for (std::size_t i : {0u, 1u, 4u}) {
      checks[i].skipped = true;
      checks[i].note = "pseudometric, skipped";
    }
  }
  auto check = [&](InequalityCheck& c, std::size_t idx, const PairEvaluation& ev, double lhs, double rhs) {
    if (c.skipped) return;
    ++c.checked;
    const double margin = rhs - lhs;
    if (margin < c.worst_margin) {
      c.worst_margin = margin;
      c.worst = std::make_pair(ev.x, ev.y);
    }
    if (lhs > rhs + kTol * (1.0 + std::abs(rhs))) {
      ++c.failures;
      c.failed_pairs.emplace_back(idx, margin);
    }
  };
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const auto& ev = evals[i];
    check(checks[0], i, ev, ev.log_density, ev.alpha.upper);
    check(checks[1], i, ev, ev.alpha.lower, 2.0 * ev.j.value);
    if (!ev.ok()) continue;
    if (ev.has_rho) {
      check(checks[2], i, ev, ev.j.value, ev.jprime.upper);
      check(checks[3], i, ev, ev.jprime.lower, ev.k.value);
    }
    if (ev.has_alphatilde) check(checks[4], i, ev, ev.alphatilde.lower, 2.0 * ev.k.value);
  }
  for (auto& c : checks) {
    if (c.checked == 0) c.worst_margin = 0.0;
  }
  return checks;
}

std::size_t total_failures(const std::vector<InequalityCheck>& checks) noexcept {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.failures;
  return n;
}

ConstantsReport constants_report(const Workspace& ws, const PairSample& sample,
                                 const std::vector<PairEvaluation>& evals, bool verify) {
  ConstantsReport r;
  r.domain = ws.domain().describe();
  r.policy = std::string(to_string(sample.policy));
  r.seed = sample.seed;
  r.h = ws.h();
  r.atlas_size = ws.atlas().size();
  r.grid_nodes = ws.grid().node_count();
  r.pairs = evals.size();
  for (const auto& ev : evals) r.failed_pairs += ev.ok() ? 0 : 1;
  for (auto&& group : {uniformity_constants(ws, evals), diameter_uniformity(ws, evals),
                       ratio_constants(ws, evals)}) {
    r.constants.insert(r.constants.end(), group.begin(), group.end());
  }
  r.constants.push_back(isotropy_constant(ws, sample));
  if (verify) r.inequalities = verify_inequalities(ws, evals);
  return r;
}

}  // namespace dmetrics
