#pragma once

#include "vc3d/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace vc3d {

struct Neighbor {
    std::size_t index;
    double dist2;
};

// Static 3D kd-tree over a copy of the input points. All queries are exact; ties in
// distance resolve to the lower point index so results never depend on the
// tree layout.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Vec3> points);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    Neighbor nearest(const Vec3& q) const;
    // Up to k nearest points, sorted by (distance, index).
    std::vector<Neighbor> knn(const Vec3& q, std::size_t k) const;
    // All points with distance <= r, sorted by (distance, index).
    std::vector<Neighbor> radius(const Vec3& q, double r) const;

private:
    struct Node {
        std::size_t begin, end;  // range into order_
        int axis = -1;           // -1 for leaves
        double split = 0.0;
        std::size_t left = 0, right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);
    void nearest_rec(std::size_t node, const Vec3& q, Neighbor& best) const;
    void knn_rec(std::size_t node, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const;
    void radius_rec(std::size_t node, const Vec3& q, double r2, std::vector<Neighbor>& out) const;

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace vc3d
