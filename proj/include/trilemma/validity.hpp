#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "trilemma/dataset.hpp"
#include "trilemma/kmeans.hpp"

namespace trilemma {

enum class Engine { Lloyd, Exact1D };

std::string_view engine_name(Engine e);
Engine engine_from_name(std::string_view name);

struct CurvePoint {
    int k = 0;
    double wcss = 0.0;
};

/// Knee detection rules. SecondDifference is the classic discrete rule
/// (argmax of (w[k-1]-w[k]) - (w[k]-w[k+1])). ChordDistance picks the
/// interior point with the largest vertical gap below the straight line
/// joining the curve's endpoints; it tracks the visual elbow much more
/// closely on smoothly decaying curves. Both are invariant under
/// wcss -> a*wcss + b with a > 0.
enum class KneeMethod { SecondDifference, ChordDistance };

std::string_view knee_method_name(KneeMethod m);

struct KneeResult {
    int k = 0;
    double score = 0.0;
    bool distinct_knee = false;  // false when the curve offers no clear elbow
    KneeMethod method = KneeMethod::SecondDifference;
};

/// Finds the elbow of a WCSS-vs-k curve. Needs at least 3 points; ties break
/// toward smaller k. On a perfectly linear curve every score is 0, the
/// smallest interior k is returned, and distinct_knee is false.
KneeResult detect_knee(std::span<const CurvePoint> curve,
                       KneeMethod method = KneeMethod::SecondDifference);

struct WcssEntry {
    int k = 0;
    double wcss = 0.0;
    Clustering clustering;  // cached so callers never re-run the engine
};

struct WcssCurve {
    std::vector<WcssEntry> entries;  // k = 1..k_max
    KneeResult knee;
    Engine engine = Engine::Lloyd;
    /// k values at which wcss increased over k-1. Always empty for the exact
    /// engine; for Lloyd's a non-empty list flags restarts that missed the
    /// optimum.
    std::vector<int> increases;

    std::vector<CurvePoint> points() const;
};

/// WCSS for every k in 1..k_max using the requested engine. Exact1D demands
/// a single-column matrix. Knee detection runs when the curve has >= 3
/// entries.
WcssCurve wcss_curve(const FeatureMatrix& fm, int k_max, Engine engine, const KMeansConfig& cfg,
                     KneeMethod knee_method = KneeMethod::ChordDistance);

struct SilhouetteReport {
    std::vector<double> per_point;        // s(i) in [-1, 1]
    double mean = 0.0;
    std::vector<double> per_cluster_mean;  // length k
};

/// Silhouette values s(i) = (b(i) - a(i)) / max{a(i), b(i)} with plain
/// Euclidean distances: a(i) is the mean distance to the rest of i's
/// cluster, b(i) the smallest mean distance to another cluster. Points in
/// singleton clusters get s(i) = 0. Requires n >= 2 and at least two
/// clusters.
SilhouetteReport silhouette(const FeatureMatrix& points, std::span<const int> labels);

struct KSelection {
    struct Candidate {
        int k = 0;
        double mean_silhouette = 0.0;
        double wcss = 0.0;
    };
    int k = 0;                          // the winner
    std::vector<Candidate> candidates;  // every candidate's score, ascending k
};

/// Clusters at each candidate k and returns the k with the highest mean
/// silhouette (ties toward smaller k). Candidates must satisfy
/// 2 <= k <= n-1.
KSelection select_k(const FeatureMatrix& fm, std::span<const int> candidates, Engine engine,
                    const KMeansConfig& cfg);

}  // namespace trilemma
