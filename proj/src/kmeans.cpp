#include "trilemma/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trilemma/error.hpp"

namespace trilemma {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// splitmix64 stream; fully specified, so results are identical on every
/// platform (std::uniform_* distributions are not).
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() { return mix64(state += kGamma); }
};

std::size_t uniform_index(SplitMix64& rng, std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng.next()) * n) >> 64);
}

double uniform_unit(SplitMix64& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void check_finite(const FeatureMatrix& fm) {
    for (double v : fm.values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in feature matrix");
    }
}

std::vector<double> seed_random_pick(const FeatureMatrix& fm, int k, SplitMix64& rng) {
    const std::size_t n = fm.rows;
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<double> centroids;
    centroids.reserve(static_cast<std::size_t>(k) * fm.cols);
    for (int j = 0; j < k; ++j) {
        std::size_t pick = j + uniform_index(rng, n - j);
        std::swap(pool[j], pool[pick]);
        auto row = fm.row(pool[j]);
        centroids.insert(centroids.end(), row.begin(), row.end());
    }
    return centroids;
}

std::vector<double> seed_kmeanspp(const FeatureMatrix& fm, int k, SplitMix64& rng) {
    const std::size_t n = fm.rows;
    std::vector<double> centroids;
    centroids.reserve(static_cast<std::size_t>(k) * fm.cols);
    std::vector<bool> chosen(n, false);

    std::size_t first = uniform_index(rng, n);
    chosen[first] = true;
    auto row0 = fm.row(first);
    centroids.insert(centroids.end(), row0.begin(), row0.end());

    std::vector<double> dist2(n);
    for (std::size_t i = 0; i < n; ++i) dist2[i] = sq_dist(fm.row(i), row0);

    for (int j = 1; j < k; ++j) {
        double total = std::accumulate(dist2.begin(), dist2.end(), 0.0);
        std::size_t pick = n;
        if (total > 0.0) {
            double target = uniform_unit(rng) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum > target && !chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n) {
            // all remaining mass on chosen/duplicate points: take the first unused
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen[pick] = true;
        auto row = fm.row(pick);
        centroids.insert(centroids.end(), row.begin(), row.end());
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], sq_dist(fm.row(i), row));
        }
    }
    return centroids;
}

/// Moves the point farthest from its own centroid into each empty cluster
/// (lowest empty cluster first, ties toward the lowest point index), never
/// draining a cluster below one member. Returns true if anything moved.
bool repair_empty_clusters(const FeatureMatrix& fm, std::span<const double> centroids, int k,
                           std::vector<int>& labels) {
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    bool repaired = false;
    for (int empty = 0; empty < k; ++empty) {
        if (sizes[empty] > 0) continue;
        double worst = -1.0;
        std::size_t victim = fm.rows;
        for (std::size_t i = 0; i < fm.rows; ++i) {
            if (sizes[labels[i]] < 2) continue;
            double d = sq_dist(fm.row(i),
                               centroids.subspan(static_cast<std::size_t>(labels[i]) * fm.cols,
                                                 fm.cols));
            if (d > worst) {
                worst = d;
                victim = i;
            }
        }
        if (victim == fm.rows) break;  // k > n would be the only way here; guarded upstream
        --sizes[labels[victim]];
        labels[victim] = empty;
        ++sizes[empty];
        repaired = true;
    }
    return repaired;
}

Clustering run_single(const FeatureMatrix& fm, const KMeansConfig& cfg, std::uint64_t seed) {
    SplitMix64 rng{seed};
    std::vector<double> centroids = cfg.seeding == Seeding::KMeansPP
                                        ? seed_kmeanspp(fm, cfg.k, rng)
                                        : seed_random_pick(fm, cfg.k, rng);

    Clustering result;
    result.dims = fm.cols;
    result.config = cfg;

    std::vector<int> labels = assign_step(fm, centroids, cfg.k);
    repair_empty_clusters(fm, centroids, cfg.k, labels);

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        std::vector<double> updated = update_step(fm, labels, cfg.k);
        double movement = 0.0;
        for (int j = 0; j < cfg.k; ++j) {
            auto offset = static_cast<std::size_t>(j) * fm.cols;
            movement = std::max(movement,
                                std::sqrt(sq_dist(std::span<const double>(updated).subspan(offset, fm.cols),
                                                  std::span<const double>(centroids).subspan(offset, fm.cols))));
        }
        centroids = std::move(updated);
        result.iterations = iter;
        result.sse_history.push_back(sse(fm, labels, centroids, cfg.k).total);

        std::vector<int> next = assign_step(fm, centroids, cfg.k);
        repair_empty_clusters(fm, centroids, cfg.k, next);
        if (next == labels) {
            result.converged = true;
            break;
        }
        labels = std::move(next);
        if (movement < cfg.tolerance) {
            // centroids are stationary to within tolerance; re-center once so
            // the mean invariant holds for the final labels
            centroids = update_step(fm, labels, cfg.k);
            result.sse_history.push_back(sse(fm, labels, centroids, cfg.k).total);
            result.converged = true;
            break;
        }
        if (iter == cfg.max_iterations) {
            centroids = update_step(fm, labels, cfg.k);
            result.sse_history.push_back(sse(fm, labels, centroids, cfg.k).total);
        }
    }

    SseBreakdown breakdown = sse(fm, labels, centroids, cfg.k);
    result.assignments = std::move(labels);
    result.centroids = std::move(centroids);
    result.per_cluster_sse = std::move(breakdown.per_cluster);
    result.total_sse = breakdown.total;
    return result;
}

/// SSE of the half-open sorted range [a, b) via prefix sums; used only to
/// steer the dynamic program (reported SSE always comes from sse()).
double interval_cost(const std::vector<double>& pref, const std::vector<double>& pref2,
                     std::size_t a, std::size_t b) {
    double s = pref[b] - pref[a];
    double s2 = pref2[b] - pref2[a];
    double c = s2 - s * s / static_cast<double>(b - a);
    return c > 0.0 ? c : 0.0;
}

}  // namespace

std::string_view seeding_name(Seeding s) {
    return s == Seeding::KMeansPP ? "kmeanspp" : "random-pick";
}

Seeding seeding_from_name(std::string_view name) {
    if (name == "kmeanspp" || name == "kmeans++") return Seeding::KMeansPP;
    if (name == "random-pick" || name == "random") return Seeding::RandomPick;
    throw ValidationError("unknown seeding '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return mix64(root + (index + 1) * kGamma);
}

std::vector<int> assign_step(const FeatureMatrix& points, std::span<const double> centroids,
                             int k) {
    if (k <= 0) throw ValidationError("empty centroid set");
    if (centroids.size() != static_cast<std::size_t>(k) * points.cols) {
        throw ValidationError("centroid matrix shape mismatch");
    }
    std::vector<int> labels(points.rows, 0);
    for (std::size_t i = 0; i < points.rows; ++i) {
        auto row = points.row(i);
        double best = std::numeric_limits<double>::infinity();
        int best_j = 0;
        for (int j = 0; j < k; ++j) {
            double d = sq_dist(row, centroids.subspan(static_cast<std::size_t>(j) * points.cols,
                                                      points.cols));
            if (d < best) {  // strict: ties stay with the lowest index
                best = d;
                best_j = j;
            }
        }
        labels[i] = best_j;
    }
    return labels;
}

std::vector<double> update_step(const FeatureMatrix& points, std::span<const int> labels, int k) {
    if (labels.size() != points.rows) throw ValidationError("label vector shape mismatch");
    std::vector<double> sums(static_cast<std::size_t>(k) * points.cols, 0.0);
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < points.rows; ++i) {
        int l = labels[i];
        if (l < 0 || l >= k) throw ValidationError("label out of range");
        ++counts[l];
        auto row = points.row(i);
        for (std::size_t c = 0; c < points.cols; ++c) {
            sums[static_cast<std::size_t>(l) * points.cols + c] += row[c];
        }
    }
    for (int j = 0; j < k; ++j) {
        if (counts[j] == 0) {
            throw ValidationError("empty cluster " + std::to_string(j) + " in update step");
        }
        for (std::size_t c = 0; c < points.cols; ++c) {
            sums[static_cast<std::size_t>(j) * points.cols + c] /= counts[j];
        }
    }
    return sums;
}

SseBreakdown sse(const FeatureMatrix& points, std::span<const int> labels,
                 std::span<const double> centroids, int k) {
    if (labels.size() != points.rows) throw ValidationError("label vector shape mismatch");
    if (centroids.size() != static_cast<std::size_t>(k) * points.cols) {
        throw ValidationError("centroid matrix shape mismatch");
    }
    SseBreakdown out;
    out.per_cluster.assign(k, 0.0);
    for (std::size_t i = 0; i < points.rows; ++i) {
        int l = labels[i];
        if (l < 0 || l >= k) throw ValidationError("label out of range");
        out.per_cluster[l] += sq_dist(points.row(i),
                                      centroids.subspan(static_cast<std::size_t>(l) * points.cols,
                                                        points.cols));
    }
    out.total = std::accumulate(out.per_cluster.begin(), out.per_cluster.end(), 0.0);
    return out;
}

Clustering lloyd(const FeatureMatrix& points, const KMeansConfig& cfg) {
    if (points.rows == 0) throw ValidationError("empty feature matrix");
    if (cfg.k <= 0) throw ValidationError("k must be >= 1");
    if (static_cast<std::size_t>(cfg.k) > points.rows) {
        throw ValidationError("k = " + std::to_string(cfg.k) + " exceeds point count " +
                              std::to_string(points.rows));
    }
    if (cfg.restarts < 1) throw ValidationError("restarts must be >= 1");
    if (cfg.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
    if (cfg.tolerance < 0.0) throw ValidationError("tolerance must be >= 0");
    check_finite(points);

    Clustering best;
    bool have = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Clustering candidate = run_single(points, cfg, derive_seed(cfg.rng_seed, r));
        if (!have || candidate.total_sse < best.total_sse) {
            best = std::move(candidate);
            have = true;
        }
    }
    return best;
}

Clustering kmeans_1d_exact(std::span<const double> values, int k) {
    const std::size_t n = values.size();
    if (n == 0) throw ValidationError("empty input");
    if (k <= 0) throw ValidationError("k must be >= 1");
    if (static_cast<std::size_t>(k) > n) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds point count " +
                              std::to_string(n));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in input");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
    std::vector<double> pref(n + 1, 0.0), pref2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        pref[i + 1] = pref[i] + sorted[i];
        pref2[i + 1] = pref2[i] + sorted[i] * sorted[i];
    }

    // suffix[i][j]: optimal cost of splitting sorted[i..n) into j runs
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> suffix(n + 1, std::vector<double>(k + 1, inf));
    suffix[n][0] = 0.0;
    for (int j = 1; j <= k; ++j) {
        for (std::size_t i = n; i-- > 0;) {
            double best = inf;
            std::size_t hi = n - static_cast<std::size_t>(j - 1);
            for (std::size_t c = i + 1; c <= hi; ++c) {
                if (suffix[c][j - 1] == inf) continue;
                double cand = interval_cost(pref, pref2, i, c) + suffix[c][j - 1];
                if (cand < best) best = cand;
            }
            suffix[i][j] = best;
        }
    }

    // walk forward, taking the earliest cut that preserves optimality: among
    // equal-cost optima this yields the lexicographically smallest boundaries
    std::vector<int> labels_sorted(n, 0);
    std::size_t start = 0;
    for (int j = k, cluster = 0; j >= 1; --j, ++cluster) {
        if (j == 1) {
            std::fill(labels_sorted.begin() + start, labels_sorted.end(), cluster);
            break;
        }
        std::size_t hi = n - static_cast<std::size_t>(j - 1);
        for (std::size_t c = start + 1; c <= hi; ++c) {
            if (interval_cost(pref, pref2, start, c) + suffix[c][j - 1] == suffix[start][j]) {
                std::fill(labels_sorted.begin() + start, labels_sorted.begin() + c, cluster);
                start = c;
                break;
            }
        }
    }

    Clustering result;
    result.dims = 1;
    result.config = KMeansConfig{.k = k, .seeding = Seeding::KMeansPP, .restarts = 1,
                                 .max_iterations = 1, .tolerance = 0.0, .rng_seed = 0};
    result.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.assignments[order[i]] = labels_sorted[i];

    FeatureMatrix fm;
    fm.rows = n;
    fm.cols = 1;
    fm.values.assign(values.begin(), values.end());
    result.centroids = update_step(fm, result.assignments, k);
    SseBreakdown breakdown = sse(fm, result.assignments, result.centroids, k);
    result.per_cluster_sse = std::move(breakdown.per_cluster);
    result.total_sse = breakdown.total;
    result.iterations = 1;
    result.converged = true;
    result.sse_history.push_back(result.total_sse);
    return result;
}

Clustering kmeans_1d_exact(const FeatureMatrix& points, int k) {
    if (points.cols != 1) {
        throw ValidationError("exact 1-D solver requires a single-column matrix");
    }
    check_finite(points);
    return kmeans_1d_exact(std::span<const double>(points.values), k);
}

}  // namespace trilemma
