#pragma once

// Reference implementations used only by the tests. They share no code with
// the library.

#include "vc3d/bezier.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

using vc3d::Vec3;

inline Vec3 de_casteljau(const vc3d::CubicBezier3& c, double t)
{
    Vec3 a = c.p[0] + t * (c.p[1] - c.p[0]);
    Vec3 b = c.p[1] + t * (c.p[2] - c.p[1]);
    Vec3 d = c.p[2] + t * (c.p[3] - c.p[2]);
    a = a + t * (b - a);
    b = b + t * (d - b);
    return a + t * (b - a);
}

inline double min_dist2(const Vec3& p, std::span<const Vec3> cloud)
{
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : cloud)
        best = std::min(best, (p - q).squaredNorm());
    return best;
}

// Double-loop Chamfer distance.
inline double chamfer(std::span<const Vec3> a, std::span<const Vec3> b, double lambda, double w = 1.0)
{
    double sa = 0.0, sb = 0.0;
    for (const Vec3& p : a)
        sa += min_dist2(p, b);
    for (const Vec3& q : b)
        sb += min_dist2(q, a);
    return lambda * sa / a.size() + w * sb / b.size();
}

// Index of the nearest point, lowest index on ties.
inline std::size_t nearest(const Vec3& p, std::span<const Vec3> cloud)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < cloud.size(); ++i)
        if ((cloud[i] - p).squaredNorm() < (cloud[best] - p).squaredNorm())
            best = i;
    return best;
}

// Chamfer with every correspondence fixed up front: a point's partner is
// given by index, so the loss is a smooth function of the curve points.
struct FrozenChamfer {
    std::vector<std::size_t> a_to_b;  // nearest b for each a
    std::vector<std::size_t> b_to_a;  // nearest a for each b
    double lambda = 1.0;
    double w = 1.0;

    FrozenChamfer(std::span<const Vec3> a, std::span<const Vec3> b, double lambda_, double w_ = 1.0)
        : lambda(lambda_), w(w_)
    {
        for (const Vec3& p : a)
            a_to_b.push_back(nearest(p, b));
        for (const Vec3& q : b)
            b_to_a.push_back(nearest(q, a));
    }

    double operator()(std::span<const Vec3> a, std::span<const Vec3> b) const
    {
        double sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            sa += (a[i] - b[a_to_b[i]]).squaredNorm();
        for (std::size_t j = 0; j < b.size(); ++j)
            sb += (b[j] - a[b_to_a[j]]).squaredNorm();
        return lambda * sa / a.size() + w * sb / b.size();
    }
};

// Uniform samples t = j/(s-1) via de Casteljau.
inline std::vector<Vec3> samples(std::span<const vc3d::CubicBezier3> curves, std::size_t s)
{
    std::vector<Vec3> out;
    for (const auto& c : curves)
        for (std::size_t j = 0; j < s; ++j)
            out.push_back(de_casteljau(c, static_cast<double>(j) / (s - 1)));
    return out;
}

}  // namespace oracle
