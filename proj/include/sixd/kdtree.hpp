#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "sixd/geometry.hpp"

namespace sixd {

/// Exact nearest-neighbor search over a fixed 3-d point set.
/// Median-split tree, built once per query batch.
class KdTree3 {
 public:
  explicit KdTree3(const PointCloud& points) : pts_(points) {
    index_.resize(pts_.size());
    for (size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<int>(i);
    if (!pts_.empty()) root_ = build(0, static_cast<int>(pts_.size()));
  }

  struct Result {
    int index = -1;
    double distance = std::numeric_limits<double>::infinity();
  };

  Result nearest(const Vec3& q) const {
    Result best;
    if (root_ >= 0) search(root_, q, best);
    best.distance = std::sqrt(best.distance);
    return best;
  }

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1, right = -1;
  };

  int build(int lo, int hi) {
    if (lo >= hi) return -1;
    // split on the widest axis
    Vec3 mn = pts_[index_[lo]], mx = pts_[index_[lo]];
    for (int i = lo + 1; i < hi; ++i) {
      mn = mn.cwiseMin(pts_[index_[i]]);
      mx = mx.cwiseMax(pts_[index_[i]]);
    }
    int axis = 0;
    (mx - mn).maxCoeff(&axis);
    const int mid = lo + (hi - lo) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](int a, int b) { return pts_[a][axis] < pts_[b][axis]; });
    Node n;
    n.point = index_[mid];
    n.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    const int left = build(lo, mid);
    const int right = build(mid + 1, hi);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  void search(int node, const Vec3& q, Result& best) const {
    const Node& n = nodes_[node];
    const double d2 = (pts_[n.point] - q).squaredNorm();
    if (d2 < best.distance) {
      best.distance = d2;
      best.index = n.point;
    }
    const double delta = q[n.axis] - pts_[n.point][n.axis];
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    if (near >= 0) search(near, q, best);
    if (far >= 0 && delta * delta < best.distance) search(far, q, best);
  }

  const PointCloud& pts_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace sixd
