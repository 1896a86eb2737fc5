#include "dmetrics/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "dmetrics/point.hpp"

namespace dmetrics {

KdTree::KdTree(std::span<const double> coords, std::size_t dim)
    : dim_(dim), coords_(coords.begin(), coords.end()) {
  const std::size_t n = size();
  if (n == 0) return;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * (n / kLeafSize + 1));
  build(0, static_cast<std::uint32_t>(n));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1});
  box_lo_.resize(nodes_.size() * dim_, std::numeric_limits<double>::infinity());
  box_hi_.resize(nodes_.size() * dim_, -std::numeric_limits<double>::infinity());
  double* lo = &box_lo_[static_cast<std::size_t>(id) * dim_];
  double* hi = &box_hi_[static_cast<std::size_t>(id) * dim_];
  for (std::uint32_t k = begin; k < end; ++k) {
    const double* p = &coords_[order_[k] * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    if (hi[d] - lo[d] > widest) {
      widest = hi[d] - lo[d];
      axis = d;
    }
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = coords_[a * dim_ + axis];
                     const double vb = coords_[b * dim_ + axis];
                     return va < vb || (va == vb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double KdTree::box_distance2(std::size_t node, std::span<const double> q) const noexcept {
  const double* lo = &box_lo_[node * dim_];
  const double* hi = &box_hi_[node * dim_];
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double t = 0.0;
    if (q[d] < lo[d]) {
      t = lo[d] - q[d];
    } else if (q[d] > hi[d]) {
      t = q[d] - hi[d];
    }
    s += t * t;
  }
  return s;
}

std::vector<std::size_t> KdTree::nearest(std::span<const double> q, std::size_t k) const {
  k = std::min(k, size());
  using Cand = std::pair<double, std::size_t>;
  std::vector<Cand> best;  // max-heap on (distance, index)
  best.reserve(k + 1);
  if (k == 0) return {};
  best_first(
      q,
      [&](double box_d2) { return best.size() < k || box_d2 <= best.front().first; },
      [&](std::size_t i) {
        const Cand c{squared_distance(point(i), q), i};
        if (best.size() < k) {
          best.push_back(c);
          std::push_heap(best.begin(), best.end());
        } else if (c < best.front()) {
          std::pop_heap(best.begin(), best.end());
          best.back() = c;
          std::push_heap(best.begin(), best.end());
        }
      });
  std::sort(best.begin(), best.end());
  std::vector<std::size_t> out;
  out.reserve(best.size());
  for (const auto& c : best) out.push_back(c.second);
  return out;
}

}  // namespace dmetrics
