// Command line front end: ingest, cluster, elbow, silhouette, dendrogram,
// report. Exit codes: 0 success, 1 validation error, 2 runtime/IO error,
// 3 self-check failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trilemma/dataset.hpp"
#include "trilemma/error.hpp"
#include "trilemma/hier.hpp"
#include "trilemma/kmeans.hpp"
#include "trilemma/report.hpp"
#include "trilemma/validity.hpp"

namespace {

using namespace trilemma;

struct GlobalArgs {
    std::string input_path;
    bool use_reference = false;
    std::vector<std::string> columns;
    std::string scale = "none";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    std::string format = "json";
};

Dataset load_dataset(const GlobalArgs& args) {
    if (args.use_reference != args.input_path.empty()) {
        // exactly one source must be set
        throw ValidationError("pass exactly one of --input PATH or --reference");
    }
    if (args.use_reference) return embedded_reference();
    return parse_dataset_file(args.input_path);
}

std::vector<std::string> effective_columns(const GlobalArgs& args) {
    if (!args.columns.empty()) return args.columns;
    std::vector<std::string> all;
    for (Dimension d : kAllDimensions) all.emplace_back(dimension_name(d));
    return all;
}

std::uint64_t effective_seed(const GlobalArgs& args) {
    if (args.seed_given) return args.seed;
    if (const char* env = std::getenv("TRILEMMA_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("TRILEMMA_SEED is not a valid u64: '") + env + "'");
        }
    }
    return 0;
}

void emit(const GlobalArgs& args, const std::string& filename, const std::string& content) {
    if (args.out_dir.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
    } else {
        std::filesystem::create_directories(args.out_dir);
        atomic_write_file(std::filesystem::path(args.out_dir) / filename, content);
        std::cout << (std::filesystem::path(args.out_dir) / filename).string() << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Country-indicator clustering toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs args;
    app.add_option("--input", args.input_path, "CSV input path");
    app.add_flag("--reference", args.use_reference, "use the embedded reference corpus");
    app.add_option("--columns", args.columns, "dimension columns to select")
        ->delimiter(',');
    app.add_option("--scale", args.scale, "feature scaling: none|zscore")
        ->check(CLI::IsMember({"none", "zscore"}));
    auto* seed_opt = app.add_option("--seed", args.seed, "RNG seed (u64)");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--format", args.format, "output format: json|csv|svg")
        ->check(CLI::IsMember({"json", "csv", "svg"}));

    auto* ingest = app.add_subcommand("ingest", "parse and validate a dataset");

    auto* cluster = app.add_subcommand("cluster", "k-means clustering");
    int cluster_k = 3;
    std::string cluster_engine = "lloyd";
    int restarts = 10;
    int max_iter = 300;
    double tolerance = 1e-9;
    std::string seeding = "kmeanspp";
    cluster->add_option("--k", cluster_k, "cluster count")->required();
    cluster->add_option("--engine", cluster_engine, "lloyd|exact-1d")
        ->check(CLI::IsMember({"lloyd", "exact-1d", "exact"}));
    cluster->add_option("--restarts", restarts, "independent Lloyd restarts");
    cluster->add_option("--max-iterations", max_iter, "iteration cap per restart");
    cluster->add_option("--tolerance", tolerance, "centroid-movement stop threshold");
    cluster->add_option("--seeding", seeding, "random-pick|kmeanspp");

    auto* elbow = app.add_subcommand("elbow", "WCSS curve and knee detection");
    int k_max = 10;
    std::string elbow_engine = "lloyd";
    std::string knee_method = "chord";
    elbow->add_option("--kmax", k_max, "largest k to evaluate");
    elbow->add_option("--engine", elbow_engine, "lloyd|exact-1d")
        ->check(CLI::IsMember({"lloyd", "exact-1d", "exact"}));
    elbow->add_option("--knee-method", knee_method, "chord|second-difference")
        ->check(CLI::IsMember({"chord", "second-difference"}));
    elbow->add_option("--restarts", restarts, "independent Lloyd restarts");

    auto* sil = app.add_subcommand("silhouette", "silhouette scoring / k selection");
    std::vector<int> candidates;
    std::string sil_engine = "lloyd";
    sil->add_option("--candidates", candidates, "candidate k values")->delimiter(',');
    sil->add_option("--engine", sil_engine, "lloyd|exact-1d")
        ->check(CLI::IsMember({"lloyd", "exact-1d", "exact"}));
    sil->add_option("--restarts", restarts, "independent Lloyd restarts");

    auto* dendro = app.add_subcommand("dendrogram", "agglomerative clustering");
    std::string linkage = "ward";
    dendro->add_option("--linkage", linkage, "ward|single|complete|average")
        ->check(CLI::IsMember({"ward", "single", "complete", "average"}));

    auto* report = app.add_subcommand("report", "emit the full report bundle");
    report->add_option("--restarts", restarts, "independent Lloyd restarts");
    report->add_option("--linkage", linkage, "ward|single|complete|average")
        ->check(CLI::IsMember({"ward", "single", "complete", "average"}));
    report->add_option("--knee-method", knee_method, "chord|second-difference")
        ->check(CLI::IsMember({"chord", "second-difference"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    args.seed_given = seed_opt->count() > 0;

    try {
        Dataset ds = load_dataset(args);
        Scaling scaling = scaling_from_name(args.scale);
        KMeansConfig cfg{.k = cluster_k,
                         .seeding = seeding_from_name(seeding),
                         .restarts = restarts,
                         .max_iterations = max_iter,
                         .tolerance = tolerance,
                         .rng_seed = effective_seed(args)};
        KneeMethod km = knee_method == "chord" ? KneeMethod::ChordDistance
                                               : KneeMethod::SecondDifference;

        std::vector<std::string> names;
        for (const CountryRecord& rec : ds.records) names.push_back(rec.name);

        if (*ingest) {
            if (args.format == "csv") {
                emit(args, "dataset.csv", serialize_dataset(ds));
            } else if (args.format == "json") {
                nlohmann::ordered_json j;
                j["source"] = ds.source;
                j["count"] = ds.count();
                j["columns"] = effective_columns(args);
                j["countries"] = names;
                emit(args, "dataset.json", j.dump(2) + "\n");
            } else {
                throw ValidationError("ingest supports --format json|csv");
            }
        } else if (*cluster) {
            FeatureMatrix fm = select_features(ds, effective_columns(args), scaling);
            Clustering c = (cluster_engine == "lloyd") ? lloyd(fm, cfg)
                                                       : kmeans_1d_exact(fm, cluster_k);
            emit(args, "clustering.json", clustering_json(c, fm, names).dump(2) + "\n");
        } else if (*elbow) {
            FeatureMatrix fm = select_features(ds, effective_columns(args), scaling);
            WcssCurve curve = wcss_curve(fm, k_max, engine_from_name(elbow_engine), cfg, km);
            if (args.format == "svg") {
                if (args.out_dir.empty()) throw ValidationError("--format svg needs --out");
                std::filesystem::create_directories(args.out_dir);
                emit_elbow_svg(curve, std::filesystem::path(args.out_dir) / "elbow.svg");
                std::cout << (std::filesystem::path(args.out_dir) / "elbow.svg").string() << "\n";
            } else {
                emit(args, "wcss_curve.json", wcss_curve_json(curve).dump(2) + "\n");
            }
        } else if (*sil) {
            FeatureMatrix fm = select_features(ds, effective_columns(args), scaling);
            if (candidates.empty()) candidates = {3, 4};
            KSelection selection =
                select_k(fm, candidates, engine_from_name(sil_engine), cfg);
            nlohmann::ordered_json j = selection_json(selection);
            emit(args, "silhouette.json", j.dump(2) + "\n");
        } else if (*dendro) {
            FeatureMatrix fm = select_features(ds, effective_columns(args), scaling);
            Dendrogram dg = agglomerate(fm, linkage_from_name(linkage), names);
            if (args.format == "svg") {
                if (args.out_dir.empty()) throw ValidationError("--format svg needs --out");
                std::filesystem::create_directories(args.out_dir);
                emit_dendrogram_svg(dg, std::filesystem::path(args.out_dir) / "dendrogram.svg");
                atomic_write_file(std::filesystem::path(args.out_dir) / "dendrogram.nwk",
                                  to_newick(dg) + "\n");
                std::cout << (std::filesystem::path(args.out_dir) / "dendrogram.svg").string()
                          << "\n";
            } else if (args.format == "json") {
                emit(args, "dendrogram.json", dendrogram_json(dg).dump(2) + "\n");
            } else {
                throw ValidationError("dendrogram supports --format json|svg");
            }
        } else if (*report) {
            if (args.out_dir.empty()) throw ValidationError("report requires --out DIR");
            ReportOptions options;
            options.scaling = scaling;
            options.kmeans = cfg;
            options.kmeans.restarts = report->count("--restarts") ? restarts : 100;
            options.linkage = linkage_from_name(linkage);
            options.knee_method = km;
            options.out_dir = args.out_dir;
            options.reference_checks = args.use_reference;
            ReportResult res = full_report(ds, options);
            std::cout << "bundle: " << res.bundle_dir.string() << "\n";
            if (!res.discrepancies.empty()) {
                std::cout << "discrepancies vs printed reference columns: "
                          << res.discrepancies.size() << " (see discrepancies.csv)\n";
            }
            if (!res.self_checks_ok) {
                for (const std::string& f : res.failures) {
                    std::cerr << "self-check failed: " << f << "\n";
                }
                return 3;
            }
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
