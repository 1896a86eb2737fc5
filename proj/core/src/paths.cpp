#include "dmetrics/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>

#include "dmetrics/error.hpp"

namespace dmetrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// A* from `source` until `target` is settled; `heuristic(v)` must be a
// consistent lower bound of the remaining cost (zero gives Dijkstra). Nodes
// are reopened if rounding makes the heuristic slightly inconsistent. Ties in
// the queue break toward the smaller node index.
template <class Weight, class Heuristic>
std::vector<std::uint32_t> astar(const GridGraph& g, std::uint32_t source, std::uint32_t target,
                                 Weight&& weight, Heuristic&& heuristic, double& out_distance) {
  const std::size_t n = g.node_count();
  std::vector<double> dist(n, kInf);
  std::vector<double> hval(n, -1.0);
  std::vector<std::uint32_t> prev(n, kNone);
  auto h = [&](std::uint32_t v) {
    if (hval[v] < 0.0) hval[v] = heuristic(v);
    return hval[v];
  };
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[source] = 0.0;
  open.emplace(h(source), source);
  while (!open.empty()) {
    const auto [fu, u] = open.top();
    open.pop();
    if (fu > dist[u] + h(u)) continue;
    if (u == target) break;
    const double du = dist[u];
    for (std::size_t e = g.edges_begin(u); e < g.edges_end(u); ++e) {
      const std::uint32_t v = g.target(e);
      const double nd = du + weight(u, v, e);
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        open.emplace(nd + h(v), v);
      }
    }
  }
  out_distance = dist[target];
  std::vector<std::uint32_t> nodes;
  if (!std::isfinite(out_distance)) return nodes;
  for (std::uint32_t v = target; v != kNone; v = prev[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

double apollonian_segment(const Domain& domain, const BoundaryAtlas& atlas, const Point& a,
                          const Point& b) {
  const double len = distance(a, b);
  if (len == 0.0) return 0.0;
  const double dmin = std::min(domain.depth(a.coords()), domain.depth(b.coords()));
  const auto pieces = static_cast<std::size_t>(std::clamp(std::ceil(len / (0.25 * dmin)), 1.0, 64.0));
  double sum = 0.0;
  Point prev = a;
  for (std::size_t i = 1; i <= pieces; ++i) {
    Point cur = lerp(a, b, static_cast<double>(i) / static_cast<double>(pieces));
    sum += apollonian_sampled(atlas, prev.coords(), cur.coords());
    prev = std::move(cur);
  }
  return sum;
}

Polyline assemble(const GridGraph& g, const Point& x, const Point& y,
                  const std::vector<std::uint32_t>& nodes) {
  Polyline out;
  out.vertices.reserve(nodes.size() + 2);
  out.vertices.push_back(x);
  for (std::uint32_t v : nodes) {
    Point p = g.node_point(v);
    if (!(p == out.vertices.back())) out.vertices.push_back(std::move(p));
  }
  if (!(y == out.vertices.back())) out.vertices.push_back(y);
  return out;
}

}  // namespace

std::string_view to_string(WeightKind w) noexcept {
  switch (w) {
    case WeightKind::euclidean: return "euclidean";
    case WeightKind::quasihyperbolic: return "quasihyperbolic";
    case WeightKind::apollonian: return "apollonian";
  }
  return "unknown";
}

WeightKind parse_weight_kind(std::string_view name) {
  for (auto w : {WeightKind::euclidean, WeightKind::quasihyperbolic, WeightKind::apollonian}) {
    if (to_string(w) == name) return w;
  }
  throw InvalidArgument("unknown weight kind \"" + std::string(name) + "\"");
}

double Polyline::euclidean_length() const {
  return vertices.empty() ? 0.0 : euclidean_length(0, vertices.size() - 1);
}

double Polyline::euclidean_length(std::size_t i, std::size_t j) const {
  double s = 0.0;
  for (std::size_t k = i; k < j; ++k) s += distance(vertices[k], vertices[k + 1]);
  return s;
}

void validate_polyline(const Domain& domain, const Polyline& path) {
  if (path.empty()) throw InvalidArgument("polyline is empty");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!domain.contains(path.vertices[i])) {
      throw OutsideDomain("polyline vertex " + std::to_string(i) + " outside domain");
    }
    if (i + 1 < path.size() && !domain.segment_inside(path.vertices[i], path.vertices[i + 1])) {
      throw OutsideDomain("polyline segment " + std::to_string(i) + " leaves the domain");
    }
  }
}

double path_diameter(const Polyline& path) {
  double best = 0.0;
  const auto& v = path.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      best = std::max(best, squared_distance(v[i].coords(), v[j].coords()));
    }
  }
  return std::sqrt(best);
}

Polyline straighten(const Domain& domain, const Polyline& path) {
  if (path.size() <= 2) return path;
  Polyline out;
  const auto& v = path.vertices;
  std::size_t i = 0;
  out.vertices.push_back(v[0]);
  while (i + 1 < v.size()) {
    std::size_t j = v.size() - 1;
    while (j > i + 1 && !domain.segment_inside(v[i], v[j])) --j;
    out.vertices.push_back(v[j]);
    i = j;
  }
  return out;
}

void write_polyline_csv(std::ostream& os, const Polyline& path) {
  const std::size_t n = path.empty() ? 2 : path.vertices.front().dim();
  for (std::size_t d = 0; d < n; ++d) os << (d ? "," : "") << 'x' << d;
  os << '\n';
  char buf[64];
  for (const Point& p : path.vertices) {
    for (std::size_t d = 0; d < p.dim(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", p[d]);
      os << (d ? "," : "") << buf;
    }
    os << '\n';
  }
}

ApollonianEdgeWeights::ApollonianEdgeWeights(const GridGraph& grid, const BoundaryAtlas& atlas)
    : grid_(&grid), atlas_(&atlas) {
  if (atlas.empty()) throw InvalidArgument("apollonian edge weights: empty atlas");
  if (atlas.dim() != grid.dim()) throw InvalidArgument("apollonian edge weights: dimension mismatch");
  const std::size_t n = grid.edge_count();
  weights_store_ = std::make_unique<std::atomic<double>[]>(n);
  weights_ = {weights_store_.get(), n};
  for (auto& w : weights_) w.store(std::numeric_limits<double>::quiet_NaN(), std::memory_order_relaxed);
  source_.resize(n);
  for (std::size_t u = 0; u < grid.node_count(); ++u) {
    for (std::size_t e = grid.edges_begin(u); e < grid.edges_end(u); ++e) source_[e] = static_cast<std::uint32_t>(u);
  }
}

double ApollonianEdgeWeights::operator[](std::size_t e) const {
  double w = weights_[e].load(std::memory_order_relaxed);
  if (!std::isnan(w)) return w;
  // Evaluate with the smaller node first so both directions agree bitwise.
  std::size_t u = source_[e];
  std::size_t v = grid_->target(e);
  if (v < u) std::swap(u, v);
  w = apollonian_sampled(*atlas_, grid_->node(u), grid_->node(v));
  weights_[e].store(w, std::memory_order_relaxed);
  weights_[grid_->reverse(e)].store(w, std::memory_order_relaxed);
  return w;
}

void ApollonianEdgeWeights::precompute() const {
  for (std::size_t e = 0; e < weights_.size(); ++e) (void)(*this)[e];
}

std::size_t ApollonianEdgeWeights::computed() const noexcept {
  std::size_t n = 0;
  for (const auto& w : weights_) n += std::isnan(w.load(std::memory_order_relaxed)) ? 0 : 1;
  return n;
}

double quasihyperbolic_segment(const Domain& domain, const Point& a, const Point& b) {
  const double len = distance(a, b);
  if (len == 0.0) return 0.0;
  const double da = domain.depth(a.coords());
  if (!(da > 0.0) || !(domain.depth(b.coords()) > 0.0)) {
    throw OutsideDomain("quasihyperbolic segment leaves the domain");
  }
  // Trapezoid rule with steps of 1% of the local depth; d is 1-Lipschitz, so
  // it changes by at most 1% across a step. The floor keeps grazing segments
  // at no more than 1e5 steps.
  const double floor_step = len * 1e-5;
  double t = 0.0;
  double sum = 0.0;
  double prev = 1.0 / da;
  double d = da;
  while (t < len) {
    double next = t + std::max(0.01 * d, floor_step);
    if (next > len * (1.0 - 1e-12)) next = len;
    const double step = next - t;
    t = next;
    d = domain.depth(lerp(a, b, t / len).coords());
    if (!(d > 0.0)) throw OutsideDomain("quasihyperbolic segment leaves the domain");
    const double cur = 1.0 / d;
    sum += 0.5 * step * (prev + cur);
    prev = cur;
  }
  return sum;
}

double d_length(const Domain& domain, const Polyline& path, WeightKind weight,
                const BoundaryAtlas* atlas) {
  for (const Point& v : path.vertices) {
    if (!domain.contains(v)) throw OutsideDomain("d_length: vertex outside domain");
  }
  if (weight == WeightKind::apollonian && atlas == nullptr) {
    throw InvalidArgument("d_length: apollonian weight requires an atlas");
  }
  double sum = 0.0;
  const auto& v = path.vertices;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double len = distance(v[i], v[i + 1]);
    switch (weight) {
      case WeightKind::euclidean:
        sum += len;
        break;
      case WeightKind::quasihyperbolic:
        sum += 0.5 * len * (1.0 / domain.depth(v[i].coords()) + 1.0 / domain.depth(v[i + 1].coords()));
        break;
      case WeightKind::apollonian:
        sum += apollonian_sampled(*atlas, v[i].coords(), v[i + 1].coords());
        break;
    }
  }
  return sum;
}

PathResult shortest_path(const GridGraph& grid, const Domain& domain, const Point& x, const Point& y,
                         WeightKind weight, const ApollonianEdgeWeights* alpha) {
  if (weight == WeightKind::apollonian && alpha == nullptr) {
    throw InvalidArgument("shortest_path: apollonian weight requires edge weights");
  }
  domain.dist_to_boundary(x);
  domain.dist_to_boundary(y);
  PathResult out;
  if (x == y) {
    out.path.vertices = {x};
    return out;
  }
  const auto sx = static_cast<std::uint32_t>(grid.snap(domain, x));
  const auto sy = static_cast<std::uint32_t>(grid.snap(domain, y));
  if (grid.component(sx) != grid.component(sy)) {
    throw NumericalFailure("points not connected at this resolution: (" + to_string(x) + ") and (" +
                           to_string(y) + ")");
  }
  out.snap_error = std::max(distance(grid.node(sx), x.coords()), distance(grid.node(sy), y.coords()));

  double core = 0.0;
  std::vector<std::uint32_t> nodes;
  const auto target = grid.node(sy);
  const double target_depth = grid.depth(sy);
  switch (weight) {
    case WeightKind::euclidean:
      nodes = astar(
          grid, sx, sy, [&](std::uint32_t, std::uint32_t, std::size_t e) { return grid.length(e); },
          [&](std::uint32_t v) { return distance(grid.node(v), target); }, core);
      break;
    case WeightKind::quasihyperbolic:
      nodes = astar(
          grid, sx, sy,
          [&](std::uint32_t u, std::uint32_t v, std::size_t e) {
            return 0.5 * grid.length(e) * (grid.inverse_depth(u) + grid.inverse_depth(v));
          },
          [&](std::uint32_t v) {
            // j(v, target) never exceeds the trapezoid length of any edge
            // path, since d is 1-Lipschitz.
            return std::log1p(distance(grid.node(v), target) / std::min(grid.depth(v), target_depth));
          },
          core);
      break;
    case WeightKind::apollonian:
      // The sampled Apollonian distance is a pseudometric, so its value to
      // the target is a consistent heuristic for sampled edge weights.
      nodes = astar(
          grid, sx, sy, [&](std::uint32_t, std::uint32_t, std::size_t e) { return (*alpha)[e]; },
          [&](std::uint32_t v) { return apollonian_sampled(alpha->atlas(), grid.node(v), target); }, core);
      break;
  }
  if (nodes.empty()) throw NumericalFailure("points not connected at this resolution");

  auto edge_weight = [&](std::uint32_t u, std::uint32_t v) {
    for (std::size_t e = grid.edges_begin(u); e < grid.edges_end(u); ++e) {
      if (grid.target(e) != v) continue;
      switch (weight) {
        case WeightKind::euclidean: return grid.length(e);
        case WeightKind::quasihyperbolic:
          return 0.5 * grid.length(e) * (grid.inverse_depth(u) + grid.inverse_depth(v));
        case WeightKind::apollonian: return (*alpha)[e];
      }
    }
    return kInf;
  };
  auto connector = [&](const Point& a, const Point& b) {
    switch (weight) {
      case WeightKind::euclidean: return distance(a, b);
      case WeightKind::quasihyperbolic: return quasihyperbolic_segment(domain, a, b);
      case WeightKind::apollonian: return apollonian_segment(domain, alpha->atlas(), a, b);
    }
    return 0.0;
  };

  // Cumulative cost along the node path, then let each query point join the
  // path at whichever of its first (last) few vertices is cheapest. This
  // removes the out-and-back detour when the nearest node lies beyond the
  // query point.
  constexpr std::size_t kJoin = 8;
  std::vector<double> prefix(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) prefix[i] = prefix[i - 1] + edge_weight(nodes[i - 1], nodes[i]);
  const std::size_t last = nodes.size() - 1;
  std::size_t first_i = 0;
  double head = connector(x, grid.node_point(nodes[0]));
  for (std::size_t i = 1; i <= std::min(kJoin, last); ++i) {
    const Point v = grid.node_point(nodes[i]);
    if (!domain.segment_inside(x, v)) continue;
    const double c = connector(x, v) - prefix[i];
    if (c < head) head = c, first_i = i;
  }
  std::size_t last_i = last;
  double tail = connector(grid.node_point(nodes[last]), y);
  for (std::size_t k = 1; k <= std::min(kJoin, last); ++k) {
    const std::size_t i = last - k;
    if (i < first_i) break;
    const Point v = grid.node_point(nodes[i]);
    if (!domain.segment_inside(v, y)) continue;
    const double c = connector(v, y) - (prefix[last] - prefix[i]);
    if (c < tail) tail = c, last_i = i;
  }
  const double value = head + prefix[last] + tail;
  nodes = std::vector<std::uint32_t>(nodes.begin() + static_cast<std::ptrdiff_t>(first_i),
                                     nodes.begin() + static_cast<std::ptrdiff_t>(last_i) + 1);
  out.path = assemble(grid, x, y, nodes);

  double lower = 0.0;
  switch (weight) {
    case WeightKind::euclidean: lower = distance(x, y); break;
    case WeightKind::quasihyperbolic: lower = j_metric(domain, x, y).value; break;
    case WeightKind::apollonian: lower = apollonian_sampled(alpha->atlas(), x.coords(), y.coords()); break;
  }
  out.metric = {value, std::min(lower, value), value, false};
  if (weight == WeightKind::apollonian) out.metric.pseudometric = !domain.apollonian();

  if (weight == WeightKind::euclidean) {
    Polyline taut = straighten(domain, out.path);
    const double len = taut.euclidean_length();
    if (len < out.metric.value) {
      out.metric.value = out.metric.upper = len;
      out.metric.lower = std::min(out.metric.lower, len);
      out.path = std::move(taut);
    }
  }
  return out;
}

PathResult inner_diameter(const Domain& domain, const Point& x, const Point& y, const GridGraph& grid) {
  domain.dist_to_boundary(x);
  domain.dist_to_boundary(y);
  PathResult out;
  const double sep = distance(x, y);
  if (sep == 0.0) {
    out.path.vertices = {x};
    return out;
  }
  const auto sx = static_cast<std::uint32_t>(grid.snap(domain, x));
  const auto sy = static_cast<std::uint32_t>(grid.snap(domain, y));
  if (grid.component(sx) != grid.component(sy)) {
    throw NumericalFailure("inner_diameter: points not connected at this resolution");
  }
  out.snap_error = std::max(distance(grid.node(sx), x.coords()), distance(grid.node(sy), y.coords()));

  const std::size_t n = grid.node_count();
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<std::uint32_t> prev(n, kNone);
  std::uint32_t generation = 0;
  std::vector<std::uint32_t> queue;
  queue.reserve(1024);

  auto in_lens = [&](std::uint32_t v, double t2) {
    return squared_distance(grid.node(v), x.coords()) <= t2 &&
           squared_distance(grid.node(v), y.coords()) <= t2;
  };
  // Breadth-first search from sx to sy through lens nodes.
  auto search = [&](double t) -> std::vector<std::uint32_t> {
    const double t2 = t * t;
    if (!in_lens(sx, t2) || !in_lens(sy, t2)) return {};
    ++generation;
    queue.clear();
    queue.push_back(sx);
    stamp[sx] = generation;
    prev[sx] = kNone;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t u = queue[head];
      if (u == sy) break;
      for (std::size_t e = grid.edges_begin(u); e < grid.edges_end(u); ++e) {
        const std::uint32_t v = grid.target(e);
        if (stamp[v] == generation || !in_lens(v, t2)) continue;
        stamp[v] = generation;
        prev[v] = u;
        queue.push_back(v);
      }
    }
    if (stamp[sy] != generation) return {};
    std::vector<std::uint32_t> nodes;
    for (std::uint32_t v = sy; v != kNone; v = prev[v]) nodes.push_back(v);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  };

  double t_max = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    if (grid.component(v) != grid.component(sx)) continue;
    t_max = std::max(t_max, std::max(distance(grid.node(v), x.coords()), distance(grid.node(v), y.coords())));
  }
  t_max = std::max(t_max, sep) * (1.0 + 1e-12);

  const double h = grid.spacing();
  double t_lo = sep;
  double t_hi = sep;
  auto witness = search(sep);
  if (witness.empty()) {
    double t = sep + h;
    for (;;) {
      witness = search(t);
      if (!witness.empty()) break;
      t_lo = t;
      if (t >= t_max) throw NumericalFailure("inner_diameter: points disconnected at maximal lens");
      t = std::min(t_max, sep + 2.0 * (t - sep));
    }
    t_hi = t;
    while (t_hi - t_lo > 0.5 * h) {
      const double mid = 0.5 * (t_lo + t_hi);
      auto w = search(mid);
      if (w.empty()) {
        t_lo = mid;
      } else {
        t_hi = mid;
        witness = std::move(w);
      }
    }
  }

  Polyline raw = assemble(grid, x, y, witness);
  Polyline taut = straighten(domain, raw);
  const double d_raw = path_diameter(raw);
  const double d_taut = path_diameter(taut);
  const double upper = std::min(d_raw, d_taut);
  const double lower = std::min(upper, std::max(sep, t_lo - h));
  out.metric = {upper, lower, upper, false};
  out.path = d_taut <= d_raw ? std::move(taut) : std::move(raw);
  return out;
}

}  // namespace dmetrics
