#pragma once

#include "vc3d/kdtree.hpp"
#include "vc3d/mesh.hpp"

#include <cstdint>
#include <vector>

namespace vc3d {

struct ClusterConfig {
    double d_thresh = 0.05;
    double theta_thresh_deg = 50.0;
    std::size_t k = 10;    // PCA neighborhood size, point included
    std::size_t tau = 10;  // clusters with fewer members are dropped
    std::uint64_t rng_seed = 0;
    // Cut grown runs where they turn by more than theta_thresh over a
    // d_thresh-long window.
    bool split_corners = true;

    void validate() const;
};

// Fills orientations with the unit principal direction of each point's k
// nearest neighbors (point included). Equal top eigenvalues resolve to the
// lexicographically largest eigenvector; the sign makes the first nonzero
// component positive. Rank-0 neighborhoods get (1,0,0) and a degenerate flag.
SalientPointCloud estimate_orientations(const SalientPointCloud& cloud, std::size_t k);

// Angle in degrees between the segment p->q and q's orientation line.
double admission_angle_deg(const SalientPointCloud& cloud, std::size_t p, std::size_t q);

// The growth test for admitting q after the most recently added point p.
// Coincident points are never admitted since the direction p->q is undefined.
bool admits(const SalientPointCloud& cloud, std::size_t p, std::size_t q, const ClusterConfig& cfg);

// Ordered run of salient points. members are in polyline order;
// admitted_next[i] is true when members[i+1] was admitted from members[i]
// and false when members[i] was admitted from members[i+1] (growth back
// from the seed). The admission test holds for every link.
struct Cluster {
    std::vector<std::size_t> members;
    std::vector<bool> admitted_next;
    std::size_t seed = 0;

    std::size_t size() const { return members.size(); }
};

// Greedy growth from seed: repeatedly admit the nearest unassigned point that
// passes admits() from the most recently added point, then restart once from
// the seed to grow the other side. Members are cleared from unassigned.
Cluster grow_cluster(const SalientPointCloud& cloud, const KdTree& tree, std::size_t seed,
                     std::vector<bool>& unassigned, const ClusterConfig& cfg);
Cluster grow_cluster(const SalientPointCloud& cloud, std::size_t seed, std::vector<bool>& unassigned,
                     const ClusterConfig& cfg);

// Turning angle (degrees) of the polyline at position i, measured between the
// chords to the nearest vertices at least `window` away on each side (or the
// last vertex of a shorter side). Zero at the ends of an open polyline.
double turning_angle_deg(const std::vector<Vec3>& polyline, std::size_t i, double window, bool cyclic);

std::vector<Cluster> split_at_corners(const SalientPointCloud& cloud, const Cluster& cluster,
                                      const ClusterConfig& cfg);

// Grows clusters from uniformly drawn unassigned seeds until every point is
// assigned, splits corners, then drops clusters with fewer than tau members.
std::vector<Cluster> cluster_all(const SalientPointCloud& cloud, const ClusterConfig& cfg);

// Replays every link of the cluster against admits(). Returns false on the
// first violated link or a duplicate member.
bool satisfies_admission(const SalientPointCloud& cloud, const Cluster& cluster, const ClusterConfig& cfg);

}  // namespace vc3d
