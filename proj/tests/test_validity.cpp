#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trilemma/dataset.hpp"
#include "trilemma/error.hpp"
#include "trilemma/validity.hpp"

using namespace trilemma;

namespace {

FeatureMatrix matrix_nd(std::vector<double> values, std::size_t cols) {
    FeatureMatrix fm;
    fm.rows = values.size() / cols;
    fm.cols = cols;
    fm.values = std::move(values);
    for (std::size_t c = 0; c < cols; ++c) fm.columns.push_back("x" + std::to_string(c));
    return fm;
}

std::vector<CurvePoint> curve_of(std::initializer_list<double> wcss) {
    std::vector<CurvePoint> pts;
    int k = 1;
    for (double w : wcss) pts.push_back({k++, w});
    return pts;
}

}  // namespace

TEST_CASE("detect_knee: second difference on the worked example") {
    auto pts = curve_of({100, 20, 10, 8, 7});
    KneeResult knee = detect_knee(pts, KneeMethod::SecondDifference);
    CHECK(knee.k == 2);
    CHECK(knee.score == doctest::Approx(70.0));  // (100-20) - (20-10)
    CHECK(knee.distinct_knee);

    // the chord rule agrees on this sharply elbowed curve
    KneeResult chord = detect_knee(pts, KneeMethod::ChordDistance);
    CHECK(chord.k == 2);
    CHECK(chord.score == doctest::Approx(56.75));
}

TEST_CASE("detect_knee: perfectly linear curve has no distinct knee") {
    auto pts = curve_of({100, 80, 60, 40, 20});
    for (KneeMethod m : {KneeMethod::SecondDifference, KneeMethod::ChordDistance}) {
        KneeResult knee = detect_knee(pts, m);
        CHECK(knee.k == 2);  // smallest interior k
        CHECK(knee.score == doctest::Approx(0.0));
        CHECK_FALSE(knee.distinct_knee);
    }
}

TEST_CASE("detect_knee: needs at least 3 points; ties go to smaller k") {
    auto pts = curve_of({10, 5});
    CHECK_THROWS_AS(detect_knee(pts), ValidationError);

    // constant curvature: both interior points score the same
    auto twin = curve_of({12, 6, 2, 0});
    KneeResult knee = detect_knee(twin, KneeMethod::SecondDifference);
    CHECK(knee.k == 2);
    CHECK(knee.score == doctest::Approx(2.0));
    CHECK_FALSE(knee.distinct_knee);  // tied maximum
}

TEST_CASE("detect_knee is invariant under wcss -> a*wcss + b") {
    oracles::TestRng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CurvePoint> pts;
        double w = rng.uniform(500, 1000);
        for (int k = 1; k <= 8; ++k) {
            pts.push_back({k, w});
            w -= rng.uniform(1, 100);
        }
        double a = rng.uniform(0.1, 10.0);
        double b = rng.uniform(-50, 50);
        std::vector<CurvePoint> mapped = pts;
        for (CurvePoint& p : mapped) p.wcss = a * p.wcss + b;

        for (KneeMethod m : {KneeMethod::SecondDifference, KneeMethod::ChordDistance}) {
            CHECK(detect_knee(pts, m).k == detect_knee(mapped, m).k);
        }
    }
}

TEST_CASE("wcss_curve endpoints and engine constraints") {
    const Dataset& ref = embedded_reference();
    FeatureMatrix tri = select_features(ref, {"trilemma"}, Scaling::None);
    KMeansConfig cfg{.restarts = 10, .rng_seed = 7};

    WcssCurve curve = wcss_curve(tri, 10, Engine::Exact1D, cfg);
    REQUIRE(curve.entries.size() == 10);

    // k=1: total deviation about the global mean
    double mean = 0.0;
    for (std::size_t i = 0; i < tri.rows; ++i) mean += tri.at(i, 0);
    mean /= static_cast<double>(tri.rows);
    double dev = 0.0;
    for (std::size_t i = 0; i < tri.rows; ++i) {
        dev += (tri.at(i, 0) - mean) * (tri.at(i, 0) - mean);
    }
    CHECK(curve.entries[0].wcss == doctest::Approx(dev).epsilon(1e-12));

    // exact curve is non-increasing, so no warnings
    CHECK(curve.increases.empty());
    for (std::size_t i = 1; i < curve.entries.size(); ++i) {
        CHECK(curve.entries[i].wcss <= curve.entries[i - 1].wcss);
    }

    // k = n drives the error to zero
    FeatureMatrix small = matrix_nd({1, 2, 3, 4}, 1);
    WcssCurve full = wcss_curve(small, 4, Engine::Exact1D, cfg);
    CHECK(full.entries.back().wcss == doctest::Approx(0.0));

    CHECK_THROWS_AS(wcss_curve(tri, 39, Engine::Exact1D, cfg), ValidationError);
    FeatureMatrix wide = select_features(ref, {"security", "equity"}, Scaling::None);
    CHECK_THROWS_AS(wcss_curve(wide, 5, Engine::Exact1D, cfg), ValidationError);
}

TEST_CASE("silhouette: hand-evaluated two-pair instance") {
    FeatureMatrix fm = matrix_nd({0.0, 0.1, 10.0, 10.1}, 1);
    std::vector<int> labels = {0, 0, 1, 1};
    SilhouetteReport rep = silhouette(fm, labels);

    // outer points: a = 0.1, b = (10 + 10.1)/2 = 10.05
    // inner points: a = 0.1, b = (9.9 + 10)/2 = 9.95
    CHECK(rep.per_point[0] == doctest::Approx(9.95 / 10.05).epsilon(1e-12));
    CHECK(rep.per_point[1] == doctest::Approx(9.85 / 9.95).epsilon(1e-12));
    CHECK(rep.per_point[2] == doctest::Approx(9.85 / 9.95).epsilon(1e-12));
    CHECK(rep.per_point[3] == doctest::Approx(9.95 / 10.05).epsilon(1e-12));
    CHECK(rep.mean == doctest::Approx((2 * (9.95 / 10.05) + 2 * (9.85 / 9.95)) / 4)
                          .epsilon(1e-12));
    REQUIRE(rep.per_cluster_mean.size() == 2);
}

TEST_CASE("silhouette conventions and preconditions") {
    SUBCASE("two singleton clusters score zero") {
        FeatureMatrix fm = matrix_nd({0.0, 5.0}, 1);
        std::vector<int> labels = {0, 1};
        SilhouetteReport rep = silhouette(fm, labels);
        CHECK(rep.per_point == std::vector<double>{0.0, 0.0});
        CHECK(rep.mean == 0.0);
    }
    SUBCASE("single cluster rejected") {
        FeatureMatrix fm = matrix_nd({0.0, 1.0, 2.0}, 1);
        std::vector<int> labels = {0, 0, 0};
        CHECK_THROWS_AS(silhouette(fm, labels), ValidationError);
    }
    SUBCASE("fewer than 2 points rejected") {
        FeatureMatrix fm = matrix_nd({0.0}, 1);
        std::vector<int> labels = {0};
        CHECK_THROWS_AS(silhouette(fm, labels), ValidationError);
    }
    SUBCASE("a == b gives exactly zero; misassigned points go negative") {
        // alternating labels on an even grid: the outer points see a == b,
        // the inner points sit closer to the opposite cluster
        FeatureMatrix fm = matrix_nd({0, 1, 2, 3}, 1);
        std::vector<int> labels = {0, 1, 0, 1};
        SilhouetteReport rep = silhouette(fm, labels);
        CHECK(rep.per_point[0] == 0.0);
        CHECK(rep.per_point[3] == 0.0);
        CHECK(rep.per_point[1] < 0.0);
        CHECK(rep.per_point[2] < 0.0);
    }
    SUBCASE("a < b gives positive values") {
        FeatureMatrix fm = matrix_nd({0, 1, 50, 51}, 1);
        std::vector<int> labels = {0, 0, 1, 1};
        for (double s : silhouette(fm, labels).per_point) CHECK(s > 0.0);
    }
}

TEST_CASE("silhouette matches the naive double-loop oracle") {
    oracles::TestRng rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 4 + static_cast<std::size_t>(rng.uniform_int(0, 76));
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 5));
        int k = rng.uniform_int(2, 5);
        std::vector<double> values(n * d);
        for (double& v : values) v = rng.uniform(-10, 10);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);

        FeatureMatrix fm = matrix_nd(values, d);
        SilhouetteReport rep = silhouette(fm, labels);
        std::vector<double> expected = oracles::naive_silhouette(fm.values, n, d, labels);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(rep.per_point[i] - expected[i]) <= 1e-12);
            CHECK(rep.per_point[i] >= -1.0);
            CHECK(rep.per_point[i] <= 1.0);
        }
    }
}

TEST_CASE("silhouette is invariant under rigid motion and uniform scaling") {
    oracles::TestRng rng(8080);
    std::size_t n = 30;
    std::vector<double> values(n * 2);
    for (double& v : values) v = rng.uniform(0, 10);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
    FeatureMatrix fm = matrix_nd(values, 2);
    SilhouetteReport base = silhouette(fm, labels);

    SUBCASE("translation + rotation") {
        const double angle = 0.7, tx = 100.0, ty = -40.0;
        FeatureMatrix moved = fm;
        for (std::size_t i = 0; i < n; ++i) {
            double x = fm.at(i, 0), y = fm.at(i, 1);
            moved.values[i * 2] = std::cos(angle) * x - std::sin(angle) * y + tx;
            moved.values[i * 2 + 1] = std::sin(angle) * x + std::cos(angle) * y + ty;
        }
        SilhouetteReport rep = silhouette(moved, labels);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(rep.per_point[i] - base.per_point[i]) < 1e-9);
        }
    }
    SUBCASE("uniform scaling") {
        FeatureMatrix scaled = fm;
        for (double& v : scaled.values) v *= 37.5;
        SilhouetteReport rep = silhouette(scaled, labels);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(rep.per_point[i] - base.per_point[i]) < 1e-9);
        }
    }
}

TEST_CASE("select_k picks the silhouette-optimal candidate") {
    KMeansConfig cfg{.restarts = 10, .rng_seed = 5};

    SUBCASE("two well-separated blobs prefer k=2 over k=n-1") {
        FeatureMatrix fm = matrix_nd({0, 1, 2, 100, 101, 102}, 1);
        std::vector<int> candidates = {2, 5};
        KSelection sel = select_k(fm, candidates, Engine::Exact1D, cfg);
        CHECK(sel.k == 2);
        REQUIRE(sel.candidates.size() == 2);
        CHECK(sel.candidates[0].mean_silhouette > sel.candidates[1].mean_silhouette);
    }
    SUBCASE("single candidate wins trivially") {
        FeatureMatrix fm = matrix_nd({0, 1, 2, 100, 101, 102}, 1);
        std::vector<int> candidates = {3};
        CHECK(select_k(fm, candidates, Engine::Exact1D, cfg).k == 3);
    }
    SUBCASE("empty and out-of-range candidate lists are rejected") {
        FeatureMatrix fm = matrix_nd({0, 1, 2, 100}, 1);
        std::vector<int> none;
        CHECK_THROWS_AS(select_k(fm, none, Engine::Exact1D, cfg), ValidationError);
        std::vector<int> low = {1};
        CHECK_THROWS_AS(select_k(fm, low, Engine::Exact1D, cfg), ValidationError);
        std::vector<int> high = {4};  // n-1 = 3 is the cap
        CHECK_THROWS_AS(select_k(fm, high, Engine::Exact1D, cfg), ValidationError);
    }
}
