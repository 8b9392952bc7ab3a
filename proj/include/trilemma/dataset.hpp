#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trilemma {

/// The four index dimensions carried by a country record.
enum class Dimension { Security, Equity, Sustainability, Trilemma };

inline constexpr std::array<Dimension, 4> kAllDimensions = {
    Dimension::Security, Dimension::Equity, Dimension::Sustainability, Dimension::Trilemma};

std::string_view dimension_name(Dimension d);

/// Parses a dimension name ("security", "equity", "sustainability", "trilemma").
/// Throws ValidationError on anything else.
Dimension dimension_from_name(std::string_view name);

/// One country's index scores. All scores live in [0, 100].
struct CountryRecord {
    std::string name;
    double security = 0.0;
    double equity = 0.0;
    double sustainability = 0.0;
    double trilemma = 0.0;

    double score(Dimension d) const;
};

/// Immutable, validated collection of country records. Row order is the
/// as-read order and every downstream output indexes into it.
struct Dataset {
    std::vector<CountryRecord> records;
    std::string source;  // "embedded-reference" or a file path

    std::size_t count() const { return records.size(); }

    /// Index of a country by exact name, or -1 if absent.
    int find(std::string_view name) const;
};

enum class Scaling { None, ZScore };

std::string_view scaling_name(Scaling s);
Scaling scaling_from_name(std::string_view name);

/// n x d row-major matrix of selected (optionally standardized) columns.
/// Immutable after construction; safe to share across threads.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;        // rows * cols, row-major
    std::vector<std::string> columns;  // selected dimension names
    Scaling scaling = Scaling::None;
    std::vector<double> column_means;   // filled when scaling == ZScore
    std::vector<double> column_stdevs;  // sample standard deviations (n-1)

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values).subspan(r * cols, cols);
    }
};

/// Composite-index weight of one dimension (metadata only; the composite
/// index itself is never recomputed here).
struct DimensionMeta {
    std::string name;
    double weight = 0.0;
};

/// The published weighting: security/equity/sustainability 30% each,
/// country context 10%. Weights sum to 1.
const std::array<DimensionMeta, 4>& dimension_weights();

/// Parses the CSV interchange format (header
/// `country,security,equity,sustainability,trilemma`, UTF-8, optional BOM).
/// Every error carries the offending 1-based line number.
Dataset parse_dataset(std::istream& input, std::string source = "stream");

Dataset parse_dataset_string(std::string_view text, std::string source = "string");

/// Reads and parses a CSV file; missing/unreadable files raise IoError.
Dataset parse_dataset_file(const std::string& path);

/// Renders a dataset back to the CSV interchange format. Scores print with
/// shortest round-trip formatting, so values read from a file come back out
/// byte-identically.
std::string serialize_dataset(const Dataset& ds);

/// The 38-country OECD reference corpus (2022 index values), embedded as
/// shipped constants. Also available as data/oecd_eti_2022.csv.
const Dataset& embedded_reference();

/// Per-dimension rank columns as printed alongside the reference corpus.
/// Indexed like embedded_reference().records. Used only for cross-checking
/// recomputed ranks; see rank_column.
const std::array<int, 38>& reference_printed_ranks(Dimension d);

/// Selects columns into a FeatureMatrix. With Scaling::ZScore each column is
/// standardized to mean 0 / sample stdev 1; zero-variance columns are
/// rejected. Duplicate or unknown column names are rejected.
FeatureMatrix select_features(const Dataset& ds, std::span<const std::string> columns,
                              Scaling scaling);

FeatureMatrix select_features(const Dataset& ds, std::initializer_list<std::string> columns,
                              Scaling scaling);

struct RankEntry {
    std::string name;
    int rank = 0;  // 1 = highest score
};

/// Dense descending ranks for one dimension: rank 1 is the highest score,
/// every country gets exactly one rank in 1..n, ties break by dataset order.
std::vector<RankEntry> rank_column(const Dataset& ds, Dimension dim);

}  // namespace trilemma
