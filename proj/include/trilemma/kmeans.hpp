#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "trilemma/dataset.hpp"

namespace trilemma {

enum class Seeding { RandomPick, KMeansPP };

std::string_view seeding_name(Seeding s);
Seeding seeding_from_name(std::string_view name);

struct KMeansConfig {
    int k = 3;
    Seeding seeding = Seeding::KMeansPP;
    int restarts = 10;
    int max_iterations = 300;
    double tolerance = 1e-9;  // centroid-movement stopping threshold
    std::uint64_t rng_seed = 0;
};

/// Result of a clustering run. Invariants on return:
///   - every label 0..k-1 occurs at least once;
///   - centroid j is the coordinate-wise mean of its members;
///   - total_sse is the sum of per_cluster_sse.
struct Clustering {
    std::vector<int> assignments;       // length n, labels 0..k-1
    std::vector<double> centroids;      // k x dims, row-major
    std::size_t dims = 0;
    std::vector<double> per_cluster_sse;
    double total_sse = 0.0;
    int iterations = 0;
    bool converged = false;
    KMeansConfig config;                // echo of the configuration used
    std::vector<double> sse_history;    // total SSE after each update step

    int k() const { return config.k; }
    std::span<const double> centroid(int j) const {
        return std::span<const double>(centroids).subspan(static_cast<std::size_t>(j) * dims, dims);
    }
};

/// Deterministic per-restart seed stream (splitmix-style derivation).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Labels each point with its nearest centroid under squared Euclidean
/// distance; equidistant ties go to the lowest centroid index.
std::vector<int> assign_step(const FeatureMatrix& points, std::span<const double> centroids,
                             int k);

/// Recomputes centroids as coordinate-wise means. Every label 0..k-1 must
/// occur at least once.
std::vector<double> update_step(const FeatureMatrix& points, std::span<const int> labels, int k);

struct SseBreakdown {
    std::vector<double> per_cluster;
    double total = 0.0;
};

/// Per-cluster and total squared error of an assignment about the given
/// centroids.
SseBreakdown sse(const FeatureMatrix& points, std::span<const int> labels,
                 std::span<const double> centroids, int k);

/// Lloyd's iteration with seeded restarts; returns the lowest-SSE result
/// (ties broken toward the earlier restart). Deterministic in (points, cfg).
Clustering lloyd(const FeatureMatrix& points, const KMeansConfig& cfg);

/// Globally optimal 1-D k-means. Optimal 1-D clusters are contiguous runs of
/// the sorted values, so a dynamic program over run boundaries finds the
/// exact minimum-SSE partition. Among equal-SSE optima the one with
/// lexicographically smallest sorted boundaries wins. Cluster labels number
/// the runs left to right (so centroids come out ascending) and are reported
/// in original input order.
Clustering kmeans_1d_exact(std::span<const double> values, int k);

Clustering kmeans_1d_exact(const FeatureMatrix& points, int k);

}  // namespace trilemma
