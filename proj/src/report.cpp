#include "trilemma/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>

#include "trilemma/error.hpp"
#include "trilemma/svg.hpp"

namespace trilemma {

namespace {

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// Tier markers published with the reference corpus, dataset order.
constexpr std::array<Tier, 38> kSecurityMarkers = {
    Tier::Medium, Tier::Medium, Tier::Low,    Tier::High,   Tier::Medium, Tier::Medium,
    Tier::Low,    Tier::High,   Tier::High,   Tier::Medium, Tier::High,   Tier::High,
    Tier::High,   Tier::Low,    Tier::High,   Tier::Low,    Tier::Low,    Tier::Low,
    Tier::Medium, Tier::Low,    Tier::Medium, Tier::High,   Tier::Low,    Tier::Low,
    Tier::Low,    Tier::Medium, Tier::High,   Tier::Medium, Tier::Medium, Tier::Medium,
    Tier::Medium, Tier::High,   Tier::Medium, Tier::High,   Tier::Medium, Tier::Low,
    Tier::High,   Tier::High};

constexpr std::array<Tier, 38> kEquityMarkers = {
    Tier::High,   Tier::High,   Tier::High,   Tier::High,   Tier::Medium, Tier::Low,
    Tier::Low,    Tier::Medium, Tier::High,   Tier::High,   Tier::High,   Tier::High,
    Tier::High,   Tier::Medium, Tier::Medium, Tier::High,   Tier::High,   Tier::High,
    Tier::Medium, Tier::High,   Tier::High,   Tier::Medium, Tier::Medium, Tier::High,
    Tier::Low,    Tier::High,   Tier::High,   Tier::High,   Tier::Medium, Tier::Medium,
    Tier::Medium, Tier::High,   Tier::Medium, Tier::High,   Tier::High,   Tier::Low,
    Tier::High,   Tier::High};

constexpr std::array<Tier, 38> kSustainabilityMarkers = {
    Tier::Low,    Tier::Low,    Tier::Medium, Tier::Medium, Tier::Low,    Tier::Medium,
    Tier::High,   Tier::Medium, Tier::High,   Tier::Medium, Tier::High,   Tier::High,
    Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium, Tier::Low,
    Tier::Medium, Tier::Medium, Tier::Low,    Tier::Medium, Tier::Medium, Tier::High,
    Tier::Low,    Tier::Low,    Tier::Medium, Tier::High,   Tier::Low,    Tier::Medium,
    Tier::Medium, Tier::Medium, Tier::Medium, Tier::High,   Tier::High,   Tier::Low,
    Tier::High,   Tier::Low};

constexpr std::array<Tier, 38> kTrilemmaMarkers = {
    Tier::Medium, Tier::High,   Tier::Medium, Tier::High,   Tier::Low,    Tier::Low,
    Tier::Low,    Tier::Medium, Tier::High,   Tier::Medium, Tier::High,   Tier::High,
    Tier::High,   Tier::Low,    Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium,
    Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium, Tier::Medium,
    Tier::Low,    Tier::Medium, Tier::High,   Tier::High,   Tier::Low,    Tier::Medium,
    Tier::Medium, Tier::Medium, Tier::Medium, Tier::High,   Tier::High,   Tier::Low,
    Tier::High,   Tier::Medium};

std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string_view tier_name(Tier t) {
    switch (t) {
        case Tier::Low: return "Low";
        case Tier::Medium: return "Medium";
        case Tier::High: return "High";
    }
    return "?";
}

Tier tier_from_name(std::string_view name) {
    if (name == "Low") return Tier::Low;
    if (name == "Medium") return Tier::Medium;
    if (name == "High") return Tier::High;
    throw ValidationError("unknown tier '" + std::string(name) + "'");
}

Tier TierLabeling::tier_of(std::string_view dimension, std::size_t row) const {
    auto it = per_index.find(std::string(dimension));
    if (it == per_index.end()) throw ValidationError("no tiers for '" + std::string(dimension) + "'");
    return it->second.at(row);
}

TierLabeling tier_labels(const Dataset& ds, int k) {
    if (k != 3) throw ValidationError("tier labelling is defined for k = 3");
    if (ds.records.size() < static_cast<std::size_t>(k)) {
        throw ValidationError("need at least " + std::to_string(k) + " countries");
    }

    TierLabeling out;
    for (const CountryRecord& rec : ds.records) out.countries.push_back(rec.name);

    for (Dimension d : kAllDimensions) {
        std::string dim{dimension_name(d)};
        FeatureMatrix col = select_features(ds, {dim}, Scaling::None);
        Clustering c = kmeans_1d_exact(col, k);

        // exact solver numbers clusters left to right, so centroids already
        // ascend; keep the explicit permutation anyway
        std::array<int, 3> order = {0, 1, 2};
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return c.centroids[a] < c.centroids[b]; });
        std::array<Tier, 3> tier_of_cluster{};
        for (int rank = 0; rank < 3; ++rank) {
            tier_of_cluster[order[rank]] = static_cast<Tier>(rank);
        }

        std::vector<Tier> tiers(ds.records.size());
        for (std::size_t i = 0; i < ds.records.size(); ++i) {
            tiers[i] = tier_of_cluster[c.assignments[i]];
        }
        out.per_index[dim] = std::move(tiers);
        out.centroid_order[dim] = order;
        out.clusterings[dim] = std::move(c);
    }
    return out;
}

const std::map<std::string, std::array<Tier, 38>>& reference_tier_markers() {
    static const std::map<std::string, std::array<Tier, 38>> markers = {
        {"security", kSecurityMarkers},
        {"equity", kEquityMarkers},
        {"sustainability", kSustainabilityMarkers},
        {"trilemma", kTrilemmaMarkers},
    };
    return markers;
}

// --- serialization -------------------------------------------------------

nlohmann::ordered_json clustering_json(const Clustering& c, const FeatureMatrix& fm,
                                       std::span<const std::string> names) {
    nlohmann::ordered_json j;
    j["columns"] = fm.columns;
    j["scaling"] = scaling_name(fm.scaling);
    j["k"] = c.k();
    j["seed"] = c.config.rng_seed;
    nlohmann::ordered_json assignments = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.assignments.size(); ++i) {
        nlohmann::ordered_json row;
        row["country"] = i < names.size() ? names[i] : "p" + std::to_string(i);
        row["cluster"] = c.assignments[i];
        assignments.push_back(std::move(row));
    }
    j["assignments"] = std::move(assignments);
    nlohmann::ordered_json centroids = nlohmann::ordered_json::array();
    for (int cluster = 0; cluster < c.k(); ++cluster) {
        auto row = c.centroid(cluster);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["centroids"] = std::move(centroids);
    j["per_cluster_sse"] = c.per_cluster_sse;
    j["total_sse"] = c.total_sse;
    j["iterations"] = c.iterations;
    j["converged"] = c.converged;
    return j;
}

nlohmann::ordered_json wcss_curve_json(const WcssCurve& curve) {
    nlohmann::ordered_json j;
    j["engine"] = engine_name(curve.engine);
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const WcssEntry& e : curve.entries) {
        nlohmann::ordered_json entry;
        entry["k"] = e.k;
        entry["wcss"] = e.wcss;
        entry["clustering"] = {{"iterations", e.clustering.iterations},
                               {"converged", e.clustering.converged}};
        entries.push_back(std::move(entry));
    }
    j["entries"] = std::move(entries);
    j["knee"] = {{"k", curve.knee.k},
                 {"score", curve.knee.score},
                 {"method", knee_method_name(curve.knee.method)},
                 {"distinct", curve.knee.distinct_knee}};
    j["wcss_increases_at"] = curve.increases;
    return j;
}

nlohmann::ordered_json silhouette_json(const SilhouetteReport& report) {
    nlohmann::ordered_json j;
    j["per_point"] = report.per_point;
    j["mean"] = report.mean;
    j["per_cluster_mean"] = report.per_cluster_mean;
    return j;
}

nlohmann::ordered_json selection_json(const KSelection& sel) {
    nlohmann::ordered_json j;
    j["selected_k"] = sel.k;
    nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
    for (const KSelection::Candidate& c : sel.candidates) {
        candidates.push_back({{"k", c.k},
                              {"mean_silhouette", c.mean_silhouette},
                              {"wcss", c.wcss}});
    }
    j["candidates"] = std::move(candidates);
    return j;
}

nlohmann::ordered_json dendrogram_json(const Dendrogram& dg) {
    nlohmann::ordered_json j;
    j["linkage"] = linkage_name(dg.linkage);
    j["height_metric"] = dg.height_metric();
    j["leaves"] = dg.leaves;
    nlohmann::ordered_json merges = nlohmann::ordered_json::array();
    for (const Merge& m : dg.merges) {
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height},
                          {"size", m.size}});
    }
    j["merges"] = std::move(merges);
    return j;
}

nlohmann::ordered_json tier_labeling_json(const TierLabeling& tiers) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json per_index;
    for (const auto& [dim, values] : tiers.per_index) {
        nlohmann::ordered_json by_country;
        for (std::size_t i = 0; i < values.size(); ++i) {
            by_country[tiers.countries[i]] = tier_name(values[i]);
        }
        per_index[dim] = std::move(by_country);
    }
    j["per_index"] = std::move(per_index);
    nlohmann::ordered_json order;
    for (const auto& [dim, perm] : tiers.centroid_order) order[dim] = perm;
    j["centroid_order"] = std::move(order);
    return j;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

// --- figure emission -----------------------------------------------------

namespace {

constexpr std::string_view kChartStyle =
    "<style>\n"
    ".axis{stroke:#333;stroke-width:1}\n"
    ".grid{stroke:#ddd;stroke-width:0.5}\n"
    ".curve{fill:none;stroke:#1f77b4;stroke-width:2}\n"
    ".point{fill:#1f77b4}\n"
    ".knee{fill:none;stroke:#d62728;stroke-width:2}\n"
    ".join{stroke:#1f77b4;stroke-width:1.2;fill:none}\n"
    ".drop{stroke:#1f77b4;stroke-width:1.2;fill:none}\n"
    ".label{font:10px sans-serif;fill:#333}\n"
    ".title{font:13px sans-serif;fill:#111}\n"
    ".bar{fill:#1f77b4;stroke:#fff;stroke-width:0.5}\n"
    ".frame{fill:none;stroke:#999;stroke-width:0.75}\n"
    ".c0{fill:#1f77b4}.c1{fill:#ff7f0e}.c2{fill:#2ca02c}.c3{fill:#d62728}\n"
    ".c4{fill:#9467bd}.c5{fill:#8c564b}.c6{fill:#e377c2}.c7{fill:#7f7f7f}\n"
    "</style>\n";

}  // namespace

std::string elbow_svg(const WcssCurve& curve) {
    if (curve.entries.empty()) throw ValidationError("empty curve");

    const double width = 640, height = 420;
    const double left = 70, right = 20, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double wcss_max = 0.0;
    for (const WcssEntry& e : curve.entries) wcss_max = std::max(wcss_max, e.wcss);
    if (wcss_max <= 0.0) wcss_max = 1.0;
    int k_lo = curve.entries.front().k;
    int k_hi = curve.entries.back().k;
    double k_span = std::max(1, k_hi - k_lo);

    auto x_of = [&](double k) { return left + (k - k_lo) / k_span * plot_w; };
    auto y_of = [&](double w) { return top + (1.0 - w / wcss_max) * plot_h; };

    svg::Canvas canvas(width, height);
    canvas.raw(kChartStyle);
    canvas.text(left, top - 12, "Within-cluster sum of squares by k", "title");
    canvas.line(left, top, left, top + plot_h, "axis");
    canvas.line(left, top + plot_h, left + plot_w, top + plot_h, "axis");

    for (int tick = 0; tick <= 4; ++tick) {
        double w = wcss_max * tick / 4.0;
        double y = y_of(w);
        canvas.line(left - 4, y, left, y, "axis");
        canvas.text(left - 8, y + 3, format_number(std::round(w * 100) / 100), "label",
                    "text-anchor=\"end\"");
    }

    std::string points;
    for (const WcssEntry& e : curve.entries) {
        if (!points.empty()) points.push_back(' ');
        points += svg::num(x_of(e.k)) + "," + svg::num(y_of(e.wcss));
    }
    canvas.polyline(points, "curve");

    for (const WcssEntry& e : curve.entries) {
        canvas.circle(x_of(e.k), y_of(e.wcss), 3.5, "point");
        canvas.line(x_of(e.k), top + plot_h, x_of(e.k), top + plot_h + 4, "axis");
        canvas.text(x_of(e.k), top + plot_h + 16, std::to_string(e.k), "label",
                    "text-anchor=\"middle\"");
    }
    canvas.text(left + plot_w / 2, height - 12, "k", "label", "text-anchor=\"middle\"");

    if (curve.knee.k >= k_lo && curve.knee.k <= k_hi) {
        const WcssEntry& e = curve.entries[static_cast<std::size_t>(curve.knee.k - k_lo)];
        canvas.circle(x_of(e.k), y_of(e.wcss), 7.0, "knee");
        canvas.text(x_of(e.k) + 10, y_of(e.wcss) - 8,
                    "knee k=" + std::to_string(curve.knee.k), "label");
    }
    return canvas.str();
}

void emit_elbow_svg(const WcssCurve& curve, const std::filesystem::path& path) {
    atomic_write_file(path, elbow_svg(curve));
}

std::string dendrogram_svg(const Dendrogram& dg) {
    const int n = static_cast<int>(dg.leaf_count());
    if (n < 2 || dg.merges.size() != static_cast<std::size_t>(n) - 1) {
        throw ValidationError("malformed dendrogram");
    }

    // leaf display order = merge-encounter order (DFS from the root)
    std::vector<int> leaf_order;
    leaf_order.reserve(n);
    std::vector<int> stack = {2 * n - 2};
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        if (node < n) {
            leaf_order.push_back(node);
        } else {
            const Merge& m = dg.merges[node - n];
            stack.push_back(m.right);  // left pops first
            stack.push_back(m.left);
        }
    }

    const double slot = 24.0;
    const double left = 60, right = 20, top = 30, label_h = 140;
    const double plot_h = 300.0;
    const double width = left + right + slot * n;
    const double height = top + plot_h + label_h;
    const double baseline = top + plot_h;

    double h_max = dg.merges.back().height;
    if (h_max <= 0.0) h_max = 1.0;
    auto y_of = [&](double h) { return baseline - h / h_max * (plot_h - 10.0); };

    std::vector<double> x_pos(2 * n - 1, 0.0);
    std::vector<double> y_pos(2 * n - 1, baseline);
    for (int i = 0; i < n; ++i) x_pos[leaf_order[i]] = left + slot * (i + 0.5);

    svg::Canvas canvas(width, height);
    canvas.raw(kChartStyle);
    canvas.text(left, top - 12,
                std::string("Dendrogram (") + std::string(linkage_name(dg.linkage)) +
                    " linkage, height: " + std::string(dg.height_metric()) + ")",
                "title");
    canvas.line(left - 10, top, left - 10, baseline, "axis");
    for (int tick = 0; tick <= 4; ++tick) {
        double h = h_max * tick / 4.0;
        canvas.line(left - 14, y_of(h), left - 10, y_of(h), "axis");
        canvas.text(left - 18, y_of(h) + 3, format_number(std::round(h * 100) / 100), "label",
                    "text-anchor=\"end\"");
    }

    for (std::size_t m = 0; m < dg.merges.size(); ++m) {
        const Merge& merge = dg.merges[m];
        int node = n + static_cast<int>(m);
        double y = y_of(merge.height);
        double xl = x_pos[merge.left];
        double xr = x_pos[merge.right];
        canvas.line(xl, y_pos[merge.left], xl, y, "drop");
        canvas.line(xr, y_pos[merge.right], xr, y, "drop");
        canvas.line(xl, y, xr, y, "join");
        x_pos[node] = (xl + xr) / 2.0;
        y_pos[node] = y;
    }

    for (int i = 0; i < n; ++i) {
        double x = left + slot * (i + 0.5);
        canvas.text(x, baseline + 12, dg.leaves[leaf_order[i]], "label",
                    "text-anchor=\"end\" transform=\"rotate(-60 " + svg::num(x) + " " +
                        svg::num(baseline + 12) + ")\"");
    }
    return canvas.str();
}

void emit_dendrogram_svg(const Dendrogram& dg, const std::filesystem::path& path) {
    atomic_write_file(path, dendrogram_svg(dg));
}

std::string pairplot_svg(const FeatureMatrix& fm, std::span<const int> labels) {
    if (fm.cols != 4) throw ValidationError("pair plot requires a 4-column matrix");
    if (labels.size() != fm.rows) throw ValidationError("label vector shape mismatch");

    const std::size_t n = fm.rows;
    const double panel = 150, gap = 12, left = 70, top = 40;
    const double width = left + 4 * panel + 3 * gap + 20;
    const double height = top + 4 * panel + 3 * gap + 60;

    std::array<double, 4> lo{}, hi{};
    for (std::size_t c = 0; c < 4; ++c) {
        lo[c] = fm.at(0, c);
        hi[c] = fm.at(0, c);
        for (std::size_t r = 1; r < n; ++r) {
            lo[c] = std::min(lo[c], fm.at(r, c));
            hi[c] = std::max(hi[c], fm.at(r, c));
        }
    }

    // Sturges' rule
    int bins = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    if (bins < 1) bins = 1;

    svg::Canvas canvas(width, height);
    canvas.raw(kChartStyle);
    canvas.text(left, 20, "Pairwise index relationships", "title");

    for (std::size_t row = 0; row < 4; ++row) {
        for (std::size_t col = 0; col < 4; ++col) {
            double px = left + col * (panel + gap);
            double py = top + row * (panel + gap);
            auto x_of = [&](double v) {
                double span = hi[col] - lo[col];
                return span > 0.0 ? px + (v - lo[col]) / span * panel : px + panel / 2.0;
            };
            auto y_of = [&](double v) {
                double span = hi[row] - lo[row];
                return span > 0.0 ? py + panel - (v - lo[row]) / span * panel : py + panel / 2.0;
            };

            if (row == col) {
                canvas.rect(px, py, panel, panel, "frame hist-panel");
                std::vector<int> counts(bins, 0);
                double span = hi[col] - lo[col];
                for (std::size_t r = 0; r < n; ++r) {
                    int b = 0;
                    if (span > 0.0) {
                        b = static_cast<int>((fm.at(r, col) - lo[col]) / span * bins);
                        b = std::clamp(b, 0, bins - 1);
                    }
                    ++counts[b];
                }
                int peak = *std::max_element(counts.begin(), counts.end());
                double bar_w = panel / bins;
                for (int b = 0; b < bins; ++b) {
                    if (counts[b] == 0) continue;
                    double bar_h = panel * 0.92 * counts[b] / peak;
                    canvas.rect(px + b * bar_w, py + panel - bar_h, bar_w, bar_h, "bar");
                }
                canvas.text(px + panel / 2, py + 14, fm.columns[col], "label",
                            "text-anchor=\"middle\"");
            } else {
                canvas.rect(px, py, panel, panel, "frame scatter-panel");
                for (std::size_t r = 0; r < n; ++r) {
                    int cls = labels[r] % 8;
                    canvas.circle(x_of(fm.at(r, col)), y_of(fm.at(r, row)), 2.5,
                                  "pt c" + std::to_string(cls));
                }
            }
            if (row == 3) {
                canvas.text(px + panel / 2, top + 4 * panel + 3 * gap + 24, fm.columns[col],
                            "label", "text-anchor=\"middle\"");
            }
            if (col == 0) {
                double cy = py + panel / 2;
                canvas.text(left - 12, cy, fm.columns[row], "label",
                            "text-anchor=\"middle\" transform=\"rotate(-90 " +
                                svg::num(left - 12) + " " + svg::num(cy) + ")\"");
            }
        }
    }
    return canvas.str();
}

void emit_pairplot_svg(const FeatureMatrix& fm, std::span<const int> labels,
                       const std::filesystem::path& path) {
    atomic_write_file(path, pairplot_svg(fm, labels));
}

// --- full report ---------------------------------------------------------

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["columns"] = columns;
    j["scaling"] = scaling_name(scaling);
    j["engine"] = engine_name(engine);
    j["seed"] = seed;
    j["restarts"] = restarts;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    return j;
}

ReportResult full_report(const Dataset& ds, const ReportOptions& options) {
    if (ds.records.empty()) throw ValidationError("dataset is empty");
    if (options.out_dir.empty()) throw ValidationError("output directory not set");
    const std::size_t n = ds.records.size();

    ReportResult result;
    result.bundle_dir = options.out_dir;

    std::vector<std::string> names;
    for (const CountryRecord& rec : ds.records) names.push_back(rec.name);

    // per-dimension tiers (exact engine) and recomputed ranks
    result.tiers = tier_labels(ds, 3);
    std::map<std::string, std::vector<RankEntry>> ranks;
    for (Dimension d : kAllDimensions) {
        ranks[std::string(dimension_name(d))] = rank_column(ds, d);
    }

    // model selection on the full 4-column matrix
    std::vector<std::string> all_columns;
    for (Dimension d : kAllDimensions) all_columns.emplace_back(dimension_name(d));
    FeatureMatrix fm4 = select_features(ds, all_columns, options.scaling);
    result.curve = wcss_curve(fm4, std::min<int>(options.k_max, static_cast<int>(n)),
                              Engine::Lloyd, options.kmeans, options.knee_method);

    std::vector<int> candidates;
    for (int k : {3, 4}) {
        if (static_cast<std::size_t>(k) + 1 <= n && k <= options.k_max) candidates.push_back(k);
    }
    if (candidates.empty()) candidates.push_back(2);
    // score candidates off the curve's cached clusterings; nothing re-runs
    double best_mean = -2.0;
    for (int k : candidates) {
        const Clustering& cached = result.curve.entries[static_cast<std::size_t>(k) - 1].clustering;
        double mean = silhouette(fm4, cached.assignments).mean;
        result.selection.candidates.push_back({k, mean, cached.total_sse});
        if (mean > best_mean) {
            best_mean = mean;
            result.selection.k = k;
        }
    }
    const Clustering& chosen =
        result.curve.entries[static_cast<std::size_t>(result.selection.k) - 1].clustering;
    SilhouetteReport chosen_sil = silhouette(fm4, chosen.assignments);

    // dendrograms per dimension on raw scores
    std::map<std::string, Dendrogram> trees;
    if (n >= 2) {
        for (Dimension d : kAllDimensions) {
            std::string dim{dimension_name(d)};
            FeatureMatrix col = select_features(ds, {dim}, Scaling::None);
            trees.emplace(dim, agglomerate(col, options.linkage, names));
        }
    }

    // consolidated table
    std::string table_csv = "country,dimension,index,rank,tier\n";
    nlohmann::ordered_json table_json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        for (Dimension d : kAllDimensions) {
            std::string dim{dimension_name(d)};
            double score = ds.records[i].score(d);
            int rank = ranks[dim][i].rank;
            Tier tier = result.tiers.per_index[dim][i];
            table_csv += csv_field(names[i]) + "," + dim + "," + format_number(score) + "," +
                         std::to_string(rank) + "," + std::string(tier_name(tier)) + "\n";
            table_json.push_back({{"country", names[i]},
                                  {"dimension", dim},
                                  {"index", score},
                                  {"rank", rank},
                                  {"tier", tier_name(tier)}});
        }
    }

    // printed-vs-recomputed cross-checks (reference corpus only)
    if (options.reference_checks) {
        if (n != 38) throw ValidationError("reference checks require the 38-country corpus");
        for (Dimension d : kAllDimensions) {
            std::string dim{dimension_name(d)};
            const auto& printed_ranks = reference_printed_ranks(d);
            const auto& printed_tiers = reference_tier_markers().at(dim);
            for (std::size_t i = 0; i < n; ++i) {
                if (ranks[dim][i].rank != printed_ranks[i]) {
                    result.discrepancies.push_back({names[i], dim, "rank",
                                                    std::to_string(printed_ranks[i]),
                                                    std::to_string(ranks[dim][i].rank)});
                }
                Tier computed = result.tiers.per_index[dim][i];
                if (computed != printed_tiers[i]) {
                    result.discrepancies.push_back({names[i], dim, "tier",
                                                    std::string(tier_name(printed_tiers[i])),
                                                    std::string(tier_name(computed))});
                }
            }
        }
    }

    // self-checks: tier interval ordering, rank bijections, knee in range,
    // and in reference mode the published cluster memberships
    auto fail = [&](std::string msg) {
        result.self_checks_ok = false;
        result.failures.push_back(std::move(msg));
    };
    for (Dimension d : kAllDimensions) {
        std::string dim{dimension_name(d)};
        double max_low = -1e300, min_med = 1e300, max_med = -1e300, min_high = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            double score = ds.records[i].score(d);
            switch (result.tiers.per_index[dim][i]) {
                case Tier::Low: max_low = std::max(max_low, score); break;
                case Tier::Medium:
                    min_med = std::min(min_med, score);
                    max_med = std::max(max_med, score);
                    break;
                case Tier::High: min_high = std::min(min_high, score); break;
            }
        }
        if (max_low > min_med || max_med > min_high) {
            fail("tier intervals overlap for " + dim);
        }
        std::set<int> seen;
        for (const RankEntry& e : ranks[dim]) seen.insert(e.rank);
        if (seen.size() != n || *seen.begin() != 1 || *seen.rbegin() != static_cast<int>(n)) {
            fail("ranks are not a bijection onto 1..n for " + dim);
        }
    }
    if (result.curve.entries.size() >= 3 &&
        (result.curve.knee.k < 1 || result.curve.knee.k > options.k_max)) {
        fail("knee outside curve range");
    }
    if (options.reference_checks) {
        static const std::set<std::string> kLowSeven = {
            "Mexico", "Türkiye", "Colombia", "Costa Rica", "Greece", "Poland", "Chile"};
        std::set<std::string> low;
        for (std::size_t i = 0; i < n; ++i) {
            if (result.tiers.per_index["trilemma"][i] == Tier::Low) low.insert(names[i]);
        }
        if (low != kLowSeven) fail("trilemma low tier differs from the published seven");
        for (Dimension d : kAllDimensions) {
            std::string dim{dimension_name(d)};
            int mismatches = 0;
            for (const Discrepancy& disc : result.discrepancies) {
                if (disc.field == "tier" && disc.dimension == dim) ++mismatches;
            }
            if (mismatches > 2) {
                fail("tier mismatches vs published markers exceed 2 for " + dim);
            }
        }
    }

    // assemble bundle contents before touching the filesystem
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("report_table.csv", table_csv);
    files.emplace_back("report_table.json", table_json.dump(2) + "\n");
    files.emplace_back("tiers.json", tier_labeling_json(result.tiers).dump(2) + "\n");
    files.emplace_back("wcss_curve.json", wcss_curve_json(result.curve).dump(2) + "\n");

    nlohmann::ordered_json sil_json;
    sil_json["selection"] = selection_json(result.selection);
    sil_json["selected_clustering"] = clustering_json(chosen, fm4, names);
    sil_json["selected_silhouette"] = silhouette_json(chosen_sil);
    files.emplace_back("silhouette.json", sil_json.dump(2) + "\n");

    files.emplace_back("elbow.svg", elbow_svg(result.curve));
    for (const auto& [dim, tree] : trees) {
        files.emplace_back("dendrogram_" + dim + ".json", dendrogram_json(tree).dump(2) + "\n");
        files.emplace_back("dendrogram_" + dim + ".nwk", to_newick(tree) + "\n");
        files.emplace_back("dendrogram_" + dim + ".svg", dendrogram_svg(tree));
    }
    files.emplace_back("pairplot.svg", pairplot_svg(fm4, chosen.assignments));

    if (options.reference_checks) {
        std::string disc_csv = "country,dimension,field,printed,recomputed\n";
        for (const Discrepancy& d : result.discrepancies) {
            disc_csv += csv_field(d.country) + "," + d.dimension + "," + d.field + "," +
                        d.printed + "," + d.recomputed + "\n";
        }
        files.emplace_back("discrepancies.csv", disc_csv);
    }

    nlohmann::ordered_json checks;
    checks["ok"] = result.self_checks_ok;
    checks["failures"] = result.failures;
    files.emplace_back("self_checks.json", checks.dump(2) + "\n");

    RunManifest manifest;
    manifest.input = ds.source;
    manifest.columns = all_columns;
    manifest.scaling = options.scaling;
    manifest.engine = Engine::Lloyd;
    manifest.seed = options.kmeans.rng_seed;
    manifest.restarts = options.kmeans.restarts;
    manifest.timestamp = iso8601_utc_now();
    files.emplace_back("manifest.json", manifest.to_json().dump(2) + "\n");

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create '" + options.out_dir.string() + "'");
    for (const auto& [name, content] : files) {
        atomic_write_file(options.out_dir / name, content);
    }
    return result;
}

}  // namespace trilemma
