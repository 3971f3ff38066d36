#include "vc3d/clustering.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace vc3d {

void ClusterConfig::validate() const
{
    if (!(d_thresh > 0))
        throw Error("d_thresh must be positive");
    if (!(theta_thresh_deg > 0 && theta_thresh_deg <= 90))
        throw Error("theta_thresh must lie in (0, 90] degrees");
    if (k < 3)
        throw Error("k must be at least 3");
    if (tau < 1)
        throw Error("tau must be at least 1");
}

namespace {

Vec3 canonical_sign(Vec3 v)
{
    for (int i = 0; i < 3; ++i) {
        if (v[i] > 0)
            return v;
        if (v[i] < 0)
            return -v;
    }
    return v;
}

bool lex_greater(const Vec3& a, const Vec3& b)
{
    for (int i = 0; i < 3; ++i)
        if (a[i] != b[i])
            return a[i] > b[i];
    return false;
}

}  // namespace

SalientPointCloud estimate_orientations(const SalientPointCloud& cloud, std::size_t k)
{
    if (k < 3)
        throw Error("k must be at least 3");
    if (cloud.size() < k)
        throw Error("cloud too small for orientation estimation");

    SalientPointCloud out;
    out.points = cloud.points;
    out.orientations.resize(cloud.size());
    out.degenerate.assign(cloud.size(), false);

    const KdTree tree(cloud.points);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto nbrs = tree.knn(cloud.points[i], k);
        Vec3 mean = Vec3::Zero();
        for (const auto& n : nbrs)
            mean += cloud.points[n.index];
        mean /= static_cast<double>(nbrs.size());
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (const auto& n : nbrs) {
            const Vec3 d = cloud.points[n.index] - mean;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(nbrs.size());

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        const Vec3 values = eig.eigenvalues();  // ascending
        const double top = values[2];
        if (!(top > 1e-18)) {
            out.orientations[i] = Vec3::UnitX();
            out.degenerate[i] = true;
            continue;
        }
        Vec3 best = canonical_sign(eig.eigenvectors().col(2));
        for (int c = 1; c >= 0; --c) {
            if (top - values[c] > 1e-9 * top)
                break;
            const Vec3 cand = canonical_sign(eig.eigenvectors().col(c));
            if (lex_greater(cand, best))
                best = cand;
        }
        out.orientations[i] = best.normalized();
    }
    return out;
}

double admission_angle_deg(const SalientPointCloud& cloud, std::size_t p, std::size_t q)
{
    const Vec3 pq = cloud.points[q] - cloud.points[p];
    const double len = pq.norm();
    const double c = std::abs(pq.dot(cloud.orientations[q])) / (len * cloud.orientations[q].norm());
    return rad_to_deg(std::acos(std::min(1.0, c)));
}

bool admits(const SalientPointCloud& cloud, std::size_t p, std::size_t q, const ClusterConfig& cfg)
{
    const double dist = (cloud.points[q] - cloud.points[p]).norm();
    if (!(dist > 0.0) || dist > cfg.d_thresh)
        return false;
    return admission_angle_deg(cloud, p, q) < cfg.theta_thresh_deg;
}

namespace {

// Grows from `start` and returns the admitted points in order.
std::vector<std::size_t> grow_run(const SalientPointCloud& cloud, const KdTree& tree, std::size_t start,
                                  std::vector<bool>& unassigned, const ClusterConfig& cfg)
{
    std::vector<std::size_t> run;
    std::size_t p = start;
    for (;;) {
        std::size_t next = p;
        for (const Neighbor& n : tree.radius(cloud.points[p], cfg.d_thresh)) {
            if (unassigned[n.index] && admits(cloud, p, n.index, cfg)) {
                next = n.index;
                break;
            }
        }
        if (next == p)
            return run;
        unassigned[next] = false;
        run.push_back(next);
        p = next;
    }
}

Cluster sub_cluster(const Cluster& c, std::size_t first, std::size_t last, std::size_t seed_hint)
{
    Cluster out;
    out.members.assign(c.members.begin() + first, c.members.begin() + last + 1);
    out.admitted_next.assign(c.admitted_next.begin() + first, c.admitted_next.begin() + last);
    const bool has_seed = std::find(out.members.begin(), out.members.end(), seed_hint) != out.members.end();
    if (has_seed)
        out.seed = seed_hint;
    else if (out.admitted_next.empty() || out.admitted_next.front())
        out.seed = out.members.front();
    else
        out.seed = out.members.back();
    return out;
}

std::vector<Vec3> positions(const SalientPointCloud& cloud, const Cluster& c)
{
    std::vector<Vec3> pts;
    pts.reserve(c.size());
    for (std::size_t m : c.members)
        pts.push_back(cloud.points[m]);
    return pts;
}

void split_linear(const SalientPointCloud& cloud, const Cluster& c, const ClusterConfig& cfg,
                  std::vector<Cluster>& out)
{
    if (c.size() >= 3) {
        const auto pts = positions(cloud, c);
        std::size_t worst = 0;
        double worst_angle = 0.0;
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const double a = turning_angle_deg(pts, i, cfg.d_thresh, false);
            if (a > worst_angle) {
                worst_angle = a;
                worst = i;
            }
        }
        if (worst_angle > cfg.theta_thresh_deg) {
            split_linear(cloud, sub_cluster(c, 0, worst, c.seed), cfg, out);
            split_linear(cloud, sub_cluster(c, worst + 1, c.size() - 1, c.seed), cfg, out);
            return;
        }
    }
    out.push_back(c);
}

}  // namespace

Cluster grow_cluster(const SalientPointCloud& cloud, const KdTree& tree, std::size_t seed,
                     std::vector<bool>& unassigned, const ClusterConfig& cfg)
{
    if (!cloud.has_orientations())
        throw Error("grow_cluster: orientations not estimated");
    if (seed >= cloud.size() || !unassigned[seed])
        throw Error("grow_cluster: seed is not unassigned");
    unassigned[seed] = false;

    const auto forward = grow_run(cloud, tree, seed, unassigned, cfg);
    const auto backward = grow_run(cloud, tree, seed, unassigned, cfg);

    Cluster c;
    c.seed = seed;
    c.members.assign(backward.rbegin(), backward.rend());
    c.admitted_next.assign(backward.size(), false);
    c.members.push_back(seed);
    c.members.insert(c.members.end(), forward.begin(), forward.end());
    c.admitted_next.insert(c.admitted_next.end(), forward.size(), true);
    return c;
}

Cluster grow_cluster(const SalientPointCloud& cloud, std::size_t seed, std::vector<bool>& unassigned,
                     const ClusterConfig& cfg)
{
    const KdTree tree(cloud.points);
    return grow_cluster(cloud, tree, seed, unassigned, cfg);
}

double turning_angle_deg(const std::vector<Vec3>& polyline, std::size_t i, double window, bool cyclic)
{
    const std::size_t n = polyline.size();
    if (n < 3)
        return 0.0;
    const Vec3& x = polyline[i];

    // Nearest vertex at least `window` away; a side that ends sooner falls
    // back to its last vertex so corners next to the end of a run still show.
    auto find = [&](int dir) -> const Vec3* {
        std::size_t j = i;
        const Vec3* last = nullptr;
        for (std::size_t step = 1; step < n; ++step) {
            if (cyclic) {
                j = dir < 0 ? (j + n - 1) % n : (j + 1) % n;
            } else {
                if ((dir < 0 && j == 0) || (dir > 0 && j + 1 == n))
                    break;
                j = dir < 0 ? j - 1 : j + 1;
            }
            const double d = (polyline[j] - x).norm();
            if (d >= window)
                return &polyline[j];
            if (d > 0.0)
                last = &polyline[j];
        }
        return last;
    };

    const Vec3* before = find(-1);
    const Vec3* after = find(+1);
    if (!before || !after)
        return 0.0;
    const Vec3 a = x - *before;
    const Vec3 b = *after - x;
    return rad_to_deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

std::vector<Cluster> split_at_corners(const SalientPointCloud& cloud, const Cluster& cluster,
                                      const ClusterConfig& cfg)
{
    std::vector<Cluster> out;
    Cluster c = cluster;
    const std::size_t n = c.size();

    // A run that came back to its start is a loop; cut it at its sharpest
    // corner first so the pieces meeting at the seed stay one piece.
    if (n >= 4) {
        const std::size_t first = c.members.front(), last = c.members.back();
        const bool forward_ok = admits(cloud, last, first, cfg);
        const bool backward_ok = admits(cloud, first, last, cfg);
        if (forward_ok || backward_ok) {
            const auto pts = positions(cloud, c);
            std::size_t worst = 0;
            double worst_angle = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double a = turning_angle_deg(pts, i, cfg.d_thresh, true);
                if (a > worst_angle) {
                    worst_angle = a;
                    worst = i;
                }
            }
            if (worst_angle > cfg.theta_thresh_deg && worst + 1 < n) {
                Cluster rotated;
                for (std::size_t k = 0; k < n; ++k)
                    rotated.members.push_back(c.members[(worst + 1 + k) % n]);
                for (std::size_t k = 0; k + 1 < n; ++k) {
                    const std::size_t link = (worst + 1 + k) % n;  // link from link to link+1
                    rotated.admitted_next.push_back(link == n - 1 ? forward_ok : c.admitted_next[link]);
                }
                rotated.seed = c.seed;
                c = std::move(rotated);
            }
        }
    }
    split_linear(cloud, c, cfg, out);
    return out;
}

std::vector<Cluster> cluster_all(const SalientPointCloud& cloud, const ClusterConfig& cfg)
{
    cfg.validate();
    if (!cloud.has_orientations())
        throw Error("cluster_all: orientations not estimated");

    const KdTree tree(cloud.points);
    std::vector<bool> unassigned(cloud.size(), true);
    std::vector<std::size_t> pool(cloud.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        pool[i] = i;

    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<Cluster> grown;
    while (!pool.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const std::size_t slot = pick(rng);
        const std::size_t seed = pool[slot];
        pool[slot] = pool.back();
        pool.pop_back();
        if (!unassigned[seed])
            continue;
        grown.push_back(grow_cluster(cloud, tree, seed, unassigned, cfg));
    }

    std::vector<Cluster> out;
    for (const Cluster& c : grown) {
        if (cfg.split_corners) {
            for (Cluster& piece : split_at_corners(cloud, c, cfg))
                if (piece.size() >= cfg.tau)
                    out.push_back(std::move(piece));
        } else if (c.size() >= cfg.tau) {
            out.push_back(c);
        }
    }
    return out;
}

bool satisfies_admission(const SalientPointCloud& cloud, const Cluster& cluster, const ClusterConfig& cfg)
{
    if (cluster.admitted_next.size() + 1 != cluster.members.size())
        return false;
    std::unordered_set<std::size_t> seen;
    for (std::size_t m : cluster.members)
        if (m >= cloud.size() || !seen.insert(m).second)
            return false;
    for (std::size_t i = 0; i + 1 < cluster.size(); ++i) {
        const std::size_t a = cluster.members[i], b = cluster.members[i + 1];
        const bool ok = cluster.admitted_next[i] ? admits(cloud, a, b, cfg) : admits(cloud, b, a, cfg);
        if (!ok)
            return false;
    }
    return true;
}

}  // namespace vc3d
