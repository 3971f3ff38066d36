#include "vc3d/kdtree.hpp"

#include <algorithm>
#include <limits>

namespace vc3d {

namespace {

constexpr std::size_t kLeafSize = 8;

bool closer(const Neighbor& a, const Neighbor& b)
{
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end())
{
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i)
        order_[i] = i;
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, points_.size());
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end)
{
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize)
        return id;

    Vec3 lo = points_[order_[begin]], hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis])
        return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];

    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

Neighbor KdTree::nearest(const Vec3& q) const
{
    Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
    if (!nodes_.empty())
        nearest_rec(0, q, best);
    return best;
}

void KdTree::nearest_rec(std::size_t id, const Vec3& q, Neighbor& best) const
{
    const Node& n = nodes_[id];
    if (n.axis < 0) {
        for (std::size_t i = n.begin; i < n.end; ++i) {
            const Neighbor c{order_[i], (points_[order_[i]] - q).squaredNorm()};
            if (closer(c, best))
                best = c;
        }
        return;
    }
    const double diff = q[n.axis] - n.split;
    const std::size_t near = diff < 0 ? n.left : n.right;
    const std::size_t far = diff < 0 ? n.right : n.left;
    nearest_rec(near, q, best);
    // Points equal to the split value can sit on either side, hence <=.
    if (diff * diff <= best.dist2)
        nearest_rec(far, q, best);
}

std::vector<Neighbor> KdTree::knn(const Vec3& q, std::size_t k) const
{
    std::vector<Neighbor> heap;
    if (k == 0 || nodes_.empty())
        return heap;
    heap.reserve(k + 1);
    knn_rec(0, q, k, heap);
    std::sort_heap(heap.begin(), heap.end(), closer);
    return heap;
}

void KdTree::knn_rec(std::size_t id, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const
{
    const Node& n = nodes_[id];
    if (n.axis < 0) {
        for (std::size_t i = n.begin; i < n.end; ++i) {
            const Neighbor c{order_[i], (points_[order_[i]] - q).squaredNorm()};
            if (heap.size() < k) {
                heap.push_back(c);
                std::push_heap(heap.begin(), heap.end(), closer);
            } else if (closer(c, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), closer);
                heap.back() = c;
                std::push_heap(heap.begin(), heap.end(), closer);
            }
        }
        return;
    }
    const double diff = q[n.axis] - n.split;
    const std::size_t near = diff < 0 ? n.left : n.right;
    const std::size_t far = diff < 0 ? n.right : n.left;
    knn_rec(near, q, k, heap);
    if (heap.size() < k || diff * diff <= heap.front().dist2)
        knn_rec(far, q, k, heap);
}

std::vector<Neighbor> KdTree::radius(const Vec3& q, double r) const
{
    std::vector<Neighbor> out;
    if (nodes_.empty() || r < 0)
        return out;
    radius_rec(0, q, r * r, out);
    std::sort(out.begin(), out.end(), closer);
    return out;
}

void KdTree::radius_rec(std::size_t id, const Vec3& q, double r2, std::vector<Neighbor>& out) const
{
    const Node& n = nodes_[id];
    if (n.axis < 0) {
        for (std::size_t i = n.begin; i < n.end; ++i) {
            const double d2 = (points_[order_[i]] - q).squaredNorm();
            if (d2 <= r2)
                out.push_back({order_[i], d2});
        }
        return;
    }
    const double diff = q[n.axis] - n.split;
    const std::size_t near = diff < 0 ? n.left : n.right;
    const std::size_t far = diff < 0 ? n.right : n.left;
    radius_rec(near, q, r2, out);
    if (diff * diff <= r2)
        radius_rec(far, q, r2, out);
}

}  // namespace vc3d
