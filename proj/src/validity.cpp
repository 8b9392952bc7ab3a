#include "trilemma/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "trilemma/error.hpp"

namespace trilemma {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

Clustering run_engine(const FeatureMatrix& fm, int k, Engine engine, const KMeansConfig& cfg) {
    if (engine == Engine::Exact1D) {
        return kmeans_1d_exact(fm, k);
    }
    KMeansConfig local = cfg;
    local.k = k;
    return lloyd(fm, local);
}

}  // namespace

std::string_view engine_name(Engine e) {
    return e == Engine::Exact1D ? "exact-1d" : "lloyd";
}

Engine engine_from_name(std::string_view name) {
    if (name == "lloyd") return Engine::Lloyd;
    if (name == "exact-1d" || name == "exact") return Engine::Exact1D;
    throw ValidationError("unknown engine '" + std::string(name) + "'");
}

std::string_view knee_method_name(KneeMethod m) {
    return m == KneeMethod::ChordDistance ? "max-chord-distance" : "max-second-difference";
}

KneeResult detect_knee(std::span<const CurvePoint> curve, KneeMethod method) {
    if (curve.size() < 3) throw ValidationError("knee detection needs at least 3 curve points");

    KneeResult result;
    result.method = method;
    double best = -std::numeric_limits<double>::infinity();
    int best_count = 0;

    auto consider = [&](int k, double score) {
        if (score > best) {
            best = score;
            result.k = k;
            best_count = 1;
        } else if (score == best) {
            ++best_count;  // first (smallest k) already kept
        }
    };

    if (method == KneeMethod::SecondDifference) {
        for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
            double d2 = (curve[i - 1].wcss - curve[i].wcss) - (curve[i].wcss - curve[i + 1].wcss);
            consider(curve[i].k, d2);
        }
    } else {
        // vertical gap below the endpoint chord; like the second difference
        // this is invariant under wcss -> a*wcss + b with a > 0
        const CurvePoint& lo = curve.front();
        const CurvePoint& hi = curve.back();
        double slope = (hi.wcss - lo.wcss) / static_cast<double>(hi.k - lo.k);
        for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
            double chord = lo.wcss + slope * static_cast<double>(curve[i].k - lo.k);
            consider(curve[i].k, chord - curve[i].wcss);
        }
    }

    result.score = best;
    result.distinct_knee = best > 0.0 && best_count == 1;
    return result;
}

std::vector<CurvePoint> WcssCurve::points() const {
    std::vector<CurvePoint> pts;
    pts.reserve(entries.size());
    for (const WcssEntry& e : entries) pts.push_back({e.k, e.wcss});
    return pts;
}

WcssCurve wcss_curve(const FeatureMatrix& fm, int k_max, Engine engine, const KMeansConfig& cfg,
                     KneeMethod knee_method) {
    if (k_max < 1) throw ValidationError("k_max must be >= 1");
    if (static_cast<std::size_t>(k_max) > fm.rows) {
        throw ValidationError("k_max = " + std::to_string(k_max) + " exceeds point count " +
                              std::to_string(fm.rows));
    }
    if (engine == Engine::Exact1D && fm.cols != 1) {
        throw ValidationError("exact-1d engine requires a 1-column matrix");
    }

    WcssCurve curve;
    curve.engine = engine;
    curve.entries.reserve(k_max);
    for (int k = 1; k <= k_max; ++k) {
        Clustering c = run_engine(fm, k, engine, cfg);
        curve.entries.push_back({k, c.total_sse, std::move(c)});
        if (k > 1 && curve.entries[k - 1].wcss > curve.entries[k - 2].wcss) {
            curve.increases.push_back(k);
        }
    }
    if (curve.entries.size() >= 3) {
        curve.knee = detect_knee(curve.points(), knee_method);
    } else {
        curve.knee.method = knee_method;
    }
    return curve;
}

SilhouetteReport silhouette(const FeatureMatrix& points, std::span<const int> labels) {
    const std::size_t n = points.rows;
    if (labels.size() != n) throw ValidationError("label vector shape mismatch");
    if (n < 2) throw ValidationError("silhouette needs at least 2 points");

    int k = 0;
    for (int l : labels) {
        if (l < 0) throw ValidationError("negative cluster label");
        k = std::max(k, l + 1);
    }
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    int populated = 0;
    for (int s : sizes) populated += s > 0 ? 1 : 0;
    if (populated < 2) throw ValidationError("silhouette needs at least 2 clusters");

    SilhouetteReport report;
    report.per_point.resize(n);
    std::vector<double> cluster_sum(k);

    for (std::size_t i = 0; i < n; ++i) {
        std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cluster_sum[labels[j]] += euclidean(points.row(i), points.row(j));
        }
        int own = labels[i];
        if (sizes[own] == 1) {
            report.per_point[i] = 0.0;  // singleton convention
            continue;
        }
        double a = cluster_sum[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || sizes[c] == 0) continue;
            b = std::min(b, cluster_sum[c] / static_cast<double>(sizes[c]));
        }
        double denom = std::max(a, b);
        report.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }

    double sum = 0.0;
    for (double s : report.per_point) sum += s;
    report.mean = sum / static_cast<double>(n);

    report.per_cluster_mean.assign(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) report.per_cluster_mean[labels[i]] += report.per_point[i];
    for (int c = 0; c < k; ++c) {
        if (sizes[c] > 0) report.per_cluster_mean[c] /= static_cast<double>(sizes[c]);
    }
    return report;
}

KSelection select_k(const FeatureMatrix& fm, std::span<const int> candidates, Engine engine,
                    const KMeansConfig& cfg) {
    if (candidates.empty()) throw ValidationError("empty candidate list");
    std::vector<int> ks(candidates.begin(), candidates.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
        if (k < 2 || static_cast<std::size_t>(k) + 1 > fm.rows) {
            throw ValidationError("candidate k = " + std::to_string(k) +
                                  " outside 2..n-1 for n = " + std::to_string(fm.rows));
        }
    }

    KSelection sel;
    double best = -std::numeric_limits<double>::infinity();
    for (int k : ks) {
        Clustering c = run_engine(fm, k, engine, cfg);
        SilhouetteReport rep = silhouette(fm, c.assignments);
        sel.candidates.push_back({k, rep.mean, c.total_sse});
        if (rep.mean > best) {  // strict: ties keep the smaller k
            best = rep.mean;
            sel.k = k;
        }
    }
    return sel;
}

}  // namespace trilemma
