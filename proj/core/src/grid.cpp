#include "dmetrics/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "dmetrics/error.hpp"

namespace dmetrics {
namespace {

using Key = std::array<std::int64_t, 3>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<Key> stencil(std::size_t dim) {
  std::vector<Key> out;
  if (dim == 2) {
    for (std::int64_t a = -2; a <= 2; ++a) {
      for (std::int64_t b = -2; b <= 2; ++b) {
        const auto m = std::max(std::abs(a), std::abs(b));
        if (m == 0) continue;
        // 8 neighbours and the 8 knight moves
        if (m == 1 || std::abs(a) + std::abs(b) == 3) out.push_back({a, b, 0});
      }
    }
  } else {
    for (std::int64_t a = -1; a <= 1; ++a) {
      for (std::int64_t b = -1; b <= 1; ++b) {
        for (std::int64_t c = -1; c <= 1; ++c) {
          if (a != 0 || b != 0 || c != 0) out.push_back({a, b, c});
        }
      }
    }
  }
  return out;
}

std::vector<Key> flood_stencil(std::size_t dim) {
  std::vector<Key> out;
  for (std::int64_t a = -1; a <= 1; ++a) {
    for (std::int64_t b = -1; b <= 1; ++b) {
      for (std::int64_t c = (dim == 3 ? -1 : 0); c <= (dim == 3 ? 1 : 0); ++c) {
        if (a != 0 || b != 0 || c != 0) out.push_back({a, b, c});
      }
    }
  }
  return out;
}

}  // namespace

std::size_t GridGraph::snap(const Domain& domain, const Point& x) const {
  if (node_count() == 0) throw NumericalFailure("grid is empty");
  for (std::size_t k : {16u, 256u}) {
    for (std::size_t i : tree_.nearest(x.coords(), k)) {
      if (squared_distance(node(i), x.coords()) == 0.0 || domain.segment_inside(x.coords(), node(i))) {
        return i;
      }
    }
  }
  throw NumericalFailure("no grid node visible from (" + to_string(x) + ")");
}

GridGraph build_grid(const Domain& domain, double h, const Box& window, const GridOptions& options) {
  const std::size_t dim = domain.dim();
  if (dim < 2 || dim > 3) throw InvalidArgument("build_grid: only n = 2 or 3 is supported");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("build_grid: spacing must be positive");
  if (window.dim() != dim) throw InvalidArgument("build_grid: window dimension mismatch");

  const std::size_t levels = options.refinement ? options.refinement->levels : 0;
  if (levels > 30) throw InvalidArgument("build_grid: at most 30 refinement levels");
  const double hf = h / std::ldexp(1.0, static_cast<int>(levels));
  const std::int64_t unit0 = std::int64_t{1} << levels;

  std::unordered_map<Key, std::uint32_t, KeyHash> level_mask;
  auto to_point = [&](const Key& k, std::array<double, 3>& p) {
    for (std::size_t d = 0; d < dim; ++d) p[d] = static_cast<double>(k[d]) * hf;
  };
  auto in_window = [&](const std::array<double, 3>& p) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (p[d] < window.lo[d] || p[d] > window.hi[d]) return false;
    }
    return true;
  };

  // Level 0: full scan of the window lattice.
  std::array<std::int64_t, 3> lo{0, 0, 0};
  std::array<std::int64_t, 3> hi{0, 0, 0};
  double cells = 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    lo[d] = static_cast<std::int64_t>(std::ceil(window.lo[d] / h));
    hi[d] = static_cast<std::int64_t>(std::floor(window.hi[d] / h));
    cells *= static_cast<double>(std::max<std::int64_t>(0, hi[d] - lo[d] + 1));
  }
  if (cells > 20.0 * static_cast<double>(options.max_nodes)) {
    throw NumericalFailure("build_grid: memory guard exceeded (window holds " +
                           std::to_string(static_cast<long long>(cells)) + " lattice points)");
  }
  std::array<double, 3> p{0, 0, 0};
  for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
    for (std::int64_t j = lo[1]; j <= hi[1]; ++j) {
      for (std::int64_t k = (dim == 3 ? lo[2] : 0); k <= (dim == 3 ? hi[2] : 0); ++k) {
        const Key key{i * unit0, j * unit0, dim == 3 ? k * unit0 : 0};
        to_point(key, p);
        if (domain.depth(std::span<const double>(p.data(), dim)) > 0.5 * h) {
          level_mask.emplace(key, 1u);
          if (level_mask.size() > options.max_nodes) {
            throw NumericalFailure("build_grid: memory guard exceeded (node cap " +
                                   std::to_string(options.max_nodes) + ")");
          }
        }
      }
    }
  }
  if (level_mask.empty()) throw NumericalFailure("grid too coarse: no admissible node");

  // Refinement levels: flood fill of the finer lattice from the coarser nodes.
  const auto flood = flood_stencil(dim);
  for (std::size_t lvl = 1; lvl <= levels; ++lvl) {
    const GridRefinement& ref = *options.refinement;
    const double hl = h / std::ldexp(1.0, static_cast<int>(lvl));
    const double radius = ref.radius0 * std::pow(2.0, -0.5 * static_cast<double>(lvl));
    const std::int64_t unit = std::int64_t{1} << (levels - lvl);
    auto admissible = [&](const Key& key) {
      to_point(key, p);
      if (!in_window(p)) return false;
      const std::span<const double> q(p.data(), dim);
      if (distance(q, ref.focus.coords()) > radius) return false;
      const double dd = domain.depth(q);
      return dd > 0.5 * hl && dd <= ref.band * hl;
    };
    std::deque<Key> queue;
    std::unordered_map<Key, bool, KeyHash> seen;
    for (auto& [key, mask] : level_mask) {
      if (admissible(key)) {
        mask |= 1u << lvl;
        seen.emplace(key, true);
        queue.push_back(key);
      }
    }
    while (!queue.empty()) {
      const Key key = queue.front();
      queue.pop_front();
      for (const Key& o : flood) {
        const Key nb{key[0] + o[0] * unit, key[1] + o[1] * unit, key[2] + o[2] * unit};
        if (!seen.emplace(nb, true).second) continue;
        if (!admissible(nb)) continue;
        level_mask[nb] |= 1u << lvl;
        queue.push_back(nb);
        if (level_mask.size() > options.max_nodes) {
          throw NumericalFailure("build_grid: memory guard exceeded (node cap " +
                                 std::to_string(options.max_nodes) + ")");
        }
      }
    }
  }

  // Deterministic node order.
  std::vector<std::pair<Key, std::uint32_t>> nodes(level_mask.begin(), level_mask.end());
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::unordered_map<Key, std::uint32_t, KeyHash> index;
  index.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].first, static_cast<std::uint32_t>(i));

  GridGraph g;
  g.dim_ = dim;
  g.h_ = h;
  g.h_finest_ = hf;
  g.levels_ = levels;
  const std::size_t n = nodes.size();
  g.coords_.resize(n * dim);
  g.depth_.resize(n);
  g.inv_depth_.resize(n);
  g.level_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    to_point(nodes[i].first, p);
    for (std::size_t d = 0; d < dim; ++d) g.coords_[i * dim + d] = p[d];
    g.depth_[i] = domain.depth(g.node(i));
    g.inv_depth_[i] = 1.0 / g.depth_[i];
    std::uint8_t top = 0;
    for (std::size_t lvl = 0; lvl <= levels; ++lvl) {
      if (nodes[i].second & (1u << lvl)) top = static_cast<std::uint8_t>(lvl);
    }
    g.level_[i] = top;
  }

  // Undirected edges (i < j), each level on its own lattice.
  const auto offsets = stencil(dim);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const Key& key = nodes[i].first;
    const std::uint32_t mask = nodes[i].second;
    for (std::size_t lvl = 0; lvl <= levels; ++lvl) {
      if (!(mask & (1u << lvl))) continue;
      const std::int64_t unit = std::int64_t{1} << (levels - lvl);
      for (const Key& o : offsets) {
        const Key nb{key[0] + o[0] * unit, key[1] + o[1] * unit, key[2] + o[2] * unit};
        if (!(nb > key)) continue;
        const auto it = index.find(nb);
        if (it == index.end()) continue;
        if (!(nodes[it->second].second & (1u << lvl))) continue;
        if (!domain.segment_inside(g.node(i), g.node(it->second))) continue;
        edges.emplace_back(static_cast<std::uint32_t>(i), it->second);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // CSR with both directions.
  std::vector<std::uint32_t> degree(n + 1, 0);
  for (const auto& [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  const std::size_t m = g.offsets_[n];
  g.targets_.resize(m);
  g.lengths_.resize(m);
  g.reverse_.resize(m);
  std::vector<std::uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    const std::uint32_t ea = fill[a]++;
    const std::uint32_t eb = fill[b]++;
    const double len = distance(g.node(a), g.node(b));
    g.targets_[ea] = b;
    g.targets_[eb] = a;
    g.lengths_[ea] = len;
    g.lengths_[eb] = len;
    g.reverse_[ea] = eb;
    g.reverse_[eb] = ea;
  }

  // Connected components.
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  g.component_.assign(n, kUnset);
  std::vector<std::uint32_t> stack;
  std::uint32_t label = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (g.component_[s] != kUnset) continue;
    g.component_[s] = label;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      for (std::size_t e = g.offsets_[u]; e < g.offsets_[u + 1]; ++e) {
        const std::uint32_t v = g.targets_[e];
        if (g.component_[v] == kUnset) {
          g.component_[v] = label;
          stack.push_back(v);
        }
      }
    }
    ++label;
  }
  g.component_count_ = label;
  g.tree_ = KdTree(g.coords_, dim);
  return g;
}

std::optional<GridRefinement> cusp_refinement(const Domain& domain, double h, double min_depth) {
  const auto* p = std::get_if<TangentDiskCuspParams>(&domain.params());
  if (p == nullptr) return std::nullopt;
  if (!(min_depth > 0.0)) throw InvalidArgument("cusp_refinement: min_depth must be positive");
  const CuspFrame frame = cusp_frame(*p);
  // Horn half-width ~ (c/2) s^2. Level l must reach the horn coordinate where
  // level l-1 still has a few nodes across (depth ~ 2 h_{l-1}).
  const double c = 0.5 * (1.0 / p->inner_radius - 1.0 / p->outer_radius);
  GridRefinement ref;
  ref.focus = frame.tip;
  ref.band = 6.0;
  ref.radius0 = std::min(p->inner_radius, 1.25 * std::sqrt(8.0 * h / c));
  std::size_t levels = 0;
  while (h / std::ldexp(1.0, static_cast<int>(levels)) > min_depth && levels < 30) ++levels;
  ref.levels = levels;
  return ref;
}

}  // namespace dmetrics
