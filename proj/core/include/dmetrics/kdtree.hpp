#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace dmetrics {

/// Static k-d tree over a flat coordinate array (point i occupies
/// coords[i*dim .. i*dim+dim)). Leaves hold at most kLeafSize points and every
/// node stores its bounding box, so traversals can prune by box distance.
class KdTree {
 public:
  static constexpr std::size_t kLeafSize = 8;

  KdTree() = default;
  KdTree(std::span<const double> coords, std::size_t dim);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  /// Indices of the k nearest points to q, closest first (ties by index).
  std::vector<std::size_t> nearest(std::span<const double> q, std::size_t k) const;

  /// Best-first traversal. Leaves are visited in increasing order of squared
  /// box distance to q; `keep_going(box_d2)` is consulted before each node is
  /// expanded and ends the walk when it returns false. `on_point(index)` is
  /// called for every point of every visited leaf.
  template <class KeepGoing, class OnPoint>
  void best_first(std::span<const double> q, KeepGoing&& keep_going, OnPoint&& on_point) const {
    if (nodes_.empty()) return;
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    open.emplace(box_distance2(0, q), 0u);
    while (!open.empty()) {
      const auto [d2, id] = open.top();
      open.pop();
      if (!keep_going(d2)) return;
      const Node& n = nodes_[id];
      if (n.left < 0) {
        for (std::uint32_t k = n.begin; k < n.end; ++k) on_point(order_[k]);
        continue;
      }
      open.emplace(box_distance2(static_cast<std::size_t>(n.left), q),
                   static_cast<std::uint32_t>(n.left));
      open.emplace(box_distance2(static_cast<std::size_t>(n.right), q),
                   static_cast<std::uint32_t>(n.right));
    }
  }

  /// Branch and bound for a maximum. `bound(lo, hi)` must dominate the
  /// objective over every point in the box [lo, hi]; nodes are expanded in
  /// decreasing bound order until the best bound drops to `best`, which the
  /// caller updates from `on_point(index)`.
  template <class BoxBound, class OnPoint>
  void max_first(BoxBound&& bound, const double& best, OnPoint&& on_point) const {
    if (nodes_.empty()) return;
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item> open;
    auto push = [&](std::size_t id) {
      open.emplace(bound(std::span<const double>(box_lo_.data() + id * dim_, dim_),
                         std::span<const double>(box_hi_.data() + id * dim_, dim_)),
                   static_cast<std::uint32_t>(id));
    };
    push(0);
    while (!open.empty()) {
      const auto [b, id] = open.top();
      open.pop();
      if (!(b > best)) return;
      const Node& n = nodes_[id];
      if (n.left < 0) {
        for (std::uint32_t k = n.begin; k < n.end; ++k) on_point(order_[k]);
        continue;
      }
      push(static_cast<std::size_t>(n.left));
      push(static_cast<std::size_t>(n.right));
    }
  }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double box_distance2(std::size_t node, std::span<const double> q) const noexcept;

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
};

}  // namespace dmetrics
