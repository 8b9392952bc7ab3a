#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trilemma/dataset.hpp"
#include "trilemma/hier.hpp"
#include "trilemma/kmeans.hpp"
#include "trilemma/validity.hpp"

namespace trilemma {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Tier { Low, Medium, High };

std::string_view tier_name(Tier t);
Tier tier_from_name(std::string_view name);

/// Low/Medium/High assignment per dimension per country. Built from exact
/// 1-D k=3 clusterings, whose clusters are contiguous score intervals, so
/// the tiers are totally ordered by score within each dimension.
struct TierLabeling {
    std::vector<std::string> countries;  // dataset order
    std::map<std::string, std::vector<Tier>> per_index;  // dimension name -> tiers
    std::map<std::string, std::array<int, 3>> centroid_order;  // cluster ids by ascending centroid
    std::map<std::string, Clustering> clusterings;  // the underlying exact runs

    Tier tier_of(std::string_view dimension, std::size_t row) const;
};

/// Runs the exact 1-D solver per dimension and names clusters Low/Medium/
/// High by ascending centroid. Requires n >= k.
TierLabeling tier_labels(const Dataset& ds, int k = 3);

/// Tier markers published next to the reference corpus, indexed like
/// embedded_reference().records. Used to cross-check recomputed tiers.
const std::map<std::string, std::array<Tier, 38>>& reference_tier_markers();

// --- serialization -------------------------------------------------------

nlohmann::ordered_json clustering_json(const Clustering& c, const FeatureMatrix& fm,
                                       std::span<const std::string> names);
nlohmann::ordered_json wcss_curve_json(const WcssCurve& curve);
nlohmann::ordered_json silhouette_json(const SilhouetteReport& report);
nlohmann::ordered_json selection_json(const KSelection& sel);
nlohmann::ordered_json dendrogram_json(const Dendrogram& dg);
nlohmann::ordered_json tier_labeling_json(const TierLabeling& tiers);

/// Writes bytes via a temp file in the target directory plus an atomic
/// rename, so readers never observe a half-written file.
void atomic_write_file(const std::filesystem::path& path, std::string_view bytes);

// --- figure emission -----------------------------------------------------

/// SVG line chart of the WCSS curve with one marker per entry and a ring
/// around the detected knee. Byte-deterministic given identical inputs.
void emit_elbow_svg(const WcssCurve& curve, const std::filesystem::path& path);
std::string elbow_svg(const WcssCurve& curve);

/// Rectangular dendrogram, leaves along x in merge-encounter order, join
/// height along y (taller join = larger inter-cluster distance).
void emit_dendrogram_svg(const Dendrogram& dg, const std::filesystem::path& path);
std::string dendrogram_svg(const Dendrogram& dg);

/// 4x4 scatter matrix: pairwise scatterplots colored by label off the
/// diagonal, per-dimension histograms (Sturges binning) on it.
void emit_pairplot_svg(const FeatureMatrix& fm, std::span<const int> labels,
                       const std::filesystem::path& path);
std::string pairplot_svg(const FeatureMatrix& fm, std::span<const int> labels);

// --- full report ---------------------------------------------------------

/// Everything needed to re-run a bundle bit-identically (timestamp aside).
struct RunManifest {
    std::string input;  // provenance: "embedded-reference" or file path
    std::vector<std::string> columns;
    Scaling scaling = Scaling::None;
    Engine engine = Engine::Lloyd;
    std::uint64_t seed = 0;
    int restarts = 0;
    std::string tool_version{kToolVersion};
    std::string timestamp;  // ISO-8601 UTC; excluded from determinism checks

    nlohmann::ordered_json to_json() const;
};

struct ReportOptions {
    Scaling scaling = Scaling::None;
    KMeansConfig kmeans{.k = 3, .seeding = Seeding::KMeansPP, .restarts = 100};
    int k_max = 10;
    Linkage linkage = Linkage::Ward;
    KneeMethod knee_method = KneeMethod::ChordDistance;
    std::filesystem::path out_dir;
    /// Compare recomputed ranks/tiers against the published reference
    /// columns and emit a discrepancy table.
    bool reference_checks = false;
};

struct Discrepancy {
    std::string country;
    std::string dimension;
    std::string field;  // "rank" or "tier"
    std::string printed;
    std::string recomputed;
};

struct ReportResult {
    std::filesystem::path bundle_dir;
    bool self_checks_ok = true;
    std::vector<std::string> failures;       // failed self-check descriptions
    std::vector<Discrepancy> discrepancies;  // printed-vs-recomputed mismatches
    TierLabeling tiers;
    WcssCurve curve;
    KSelection selection;
};

/// Emits the consolidated report bundle: the index/rank/tier table as CSV
/// and JSON, the elbow chart, per-dimension dendrograms, the pair plot, the
/// run manifest, and (in reference mode) the printed-vs-recomputed
/// discrepancy table. The bundle is staged and renamed into place, so a
/// failed run leaves nothing behind. Self-check failures are reported in
/// the result, not thrown.
ReportResult full_report(const Dataset& ds, const ReportOptions& options);

}  // namespace trilemma
