#include "trilemma/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "trilemma/error.hpp"

namespace trilemma {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// RFC-4180-style field split: quoted fields may contain commas, doubled
/// quotes escape a quote.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) {
        throw ValidationError("row " + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(current));
    return fields;
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

std::string format_score(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_score(std::string_view field, std::string_view column, std::size_t line_no) {
    std::string_view tok = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ValidationError("row " + std::to_string(line_no) + ": non-numeric " +
                              std::string(column) + " value '" + std::string(tok) + "'");
    }
    if (!std::isfinite(value) || value < 0.0 || value > 100.0) {
        throw ValidationError("row " + std::to_string(line_no) + ": " + std::string(column) +
                              " value " + std::string(tok) + " outside [0,100]");
    }
    return value;
}

constexpr std::string_view kHeader = "country,security,equity,sustainability,trilemma";

// Reference corpus: 2022 index values and published ranks for the 38 OECD
// countries, stored exactly as printed (mixed precision preserved).
struct ReferenceRow {
    const char* name;
    double security;
    int security_rank;
    double equity;
    int equity_rank;
    double sustainability;
    int sustainability_rank;
    double trilemma;
    int trilemma_rank;
};

constexpr ReferenceRow kReference[38] = {
    {"Australia", 66.47, 19, 96.99, 10, 68.47, 34, 77.1, 19},
    {"Austria", 66.5, 18, 97.0, 9, 68.5, 33, 82.2, 7},
    {"Belgium", 59.0, 29, 95.7, 14, 77.1, 17, 76.4, 22},
    {"Canada", 76.9, 1, 96.4, 11, 76.0, 19, 82.3, 6},
    {"Chile", 61.8, 26, 81.6, 34, 69.8, 30, 70.5, 32},
    {"Colombia", 63.7, 22, 58.3, 38, 77.3, 16, 64.8, 36},
    {"Costa Rica", 55.8, 33, 74.8, 35, 81.6, 8, 69.3, 35},
    {"Czechia", 72.9, 5, 90.6, 25, 73.1, 28, 77.6, 18},
    {"Denmark", 70.2, 11, 97.0, 8, 84.7, 4, 83.3, 3},
    {"Estonia", 67.1, 15, 94.0, 20, 77.3, 15, 78.7, 13},
    {"Finland", 73.8, 3, 93.6, 23, 81.2, 9, 82.7, 4},
    {"France", 70.4, 10, 93.8, 22, 83.4, 5, 81.1, 8},
    {"Germany", 72.5, 6, 94.0, 19, 78.6, 12, 80.6, 10},
    {"Greece", 52.8, 38, 88.8, 29, 75.2, 24, 70.3, 33},
    {"Hungary", 72.1, 8, 89.8, 27, 73.5, 27, 76.6, 21},
    {"Iceland", 54.9, 35, 99.6, 2, 75.6, 22, 76.1, 24},
    {"Ireland", 56.3, 32, 98.6, 3, 78.8, 10, 77.7, 17},
    {"Israel", 53.6, 36, 98.3, 5, 69.1, 32, 73.1, 31},
    {"Italy", 67.1, 16, 88.8, 28, 75.0, 25, 74.8, 27},
    {"Japan", 59.0, 30, 94.0, 21, 74.8, 26, 75.4, 26},
    {"Korea, Rep.", 62.2, 24, 95.1, 16, 66.1, 37, 73.6, 30},
    {"Latvia", 72.4, 7, 86.7, 32, 75.6, 23, 76.7, 20},
    {"Lithuania", 60.2, 28, 90.0, 26, 75.8, 21, 74.5, 29},
    {"Luxembourg", 53.3, 37, 100.0, 1, 82.1, 7, 77.9, 15},
    {"Mexico", 55.0, 34, 69.2, 37, 69.7, 31, 63.1, 38},
    {"Netherlands", 62.2, 25, 96.0, 13, 71.6, 29, 76.4, 23},
    {"New Zealand", 68.6, 13, 95.4, 15, 77.9, 13, 80.3, 11},
    {"Norway", 61.1, 27, 97.2, 7, 85.8, 3, 81.0, 9},
    {"Poland", 62.4, 23, 86.6, 33, 65.5, 38, 70.3, 34},
    {"Portugal", 66.6, 17, 87.4, 30, 77.8, 14, 76.0, 25},
    {"Slovak Republic", 64.9, 21, 86.8, 31, 76.7, 18, 74.6, 28},
    {"Slovenia", 69.8, 12, 94.7, 17, 76.0, 20, 78.8, 12},
    {"Spain", 67.6, 14, 92.0, 24, 78.8, 11, 77.9, 16},
    {"Sweden", 73.1, 4, 94.6, 18, 87.5, 1, 84.3, 1},
    {"Switzerland", 66.1, 20, 98.4, 4, 87.1, 2, 83.4, 2},
    {"Türkiye", 57.8, 31, 73.8, 36, 67.6, 35, 64.1, 37},
    {"United Kingdom", 70.8, 9, 96.4, 12, 83.2, 6, 82.4, 5},
    {"United States", 74.1, 2, 97.3, 6, 66.4, 36, 78.5, 14},
};

}  // namespace

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Security: return "security";
        case Dimension::Equity: return "equity";
        case Dimension::Sustainability: return "sustainability";
        case Dimension::Trilemma: return "trilemma";
    }
    return "?";
}

Dimension dimension_from_name(std::string_view name) {
    std::string lower = to_lower(trim(name));
    for (Dimension d : kAllDimensions) {
        if (lower == dimension_name(d)) return d;
    }
    throw ValidationError("unknown column name '" + std::string(name) + "'");
}

double CountryRecord::score(Dimension d) const {
    switch (d) {
        case Dimension::Security: return security;
        case Dimension::Equity: return equity;
        case Dimension::Sustainability: return sustainability;
        case Dimension::Trilemma: return trilemma;
    }
    return 0.0;
}

int Dataset::find(std::string_view name) const {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::string_view scaling_name(Scaling s) {
    return s == Scaling::ZScore ? "zscore" : "none";
}

Scaling scaling_from_name(std::string_view name) {
    std::string lower = to_lower(trim(name));
    if (lower == "none") return Scaling::None;
    if (lower == "zscore" || lower == "z-score") return Scaling::ZScore;
    throw ValidationError("unknown scaling '" + std::string(name) + "'");
}

const std::array<DimensionMeta, 4>& dimension_weights() {
    static const std::array<DimensionMeta, 4> weights = {{
        {"security", 0.30},
        {"equity", 0.30},
        {"sustainability", 0.30},
        {"country-context", 0.10},
    }};
    return weights;
}

Dataset parse_dataset(std::istream& input, std::string source) {
    Dataset ds;
    ds.source = std::move(source);

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::vector<std::string> seen_lower;

    while (std::getline(input, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 &&
            static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB &&
            static_cast<unsigned char>(line[2]) == 0xBF) {
            line.erase(0, 3);  // UTF-8 BOM
        }
        if (line.empty()) continue;

        if (!saw_header) {
            if (to_lower(trim(line)) != kHeader) {
                throw ValidationError("row 1: expected header '" + std::string(kHeader) + "'");
            }
            saw_header = true;
            continue;
        }

        std::vector<std::string> fields = split_csv_line(line, line_no);
        if (fields.size() != 5) {
            throw ValidationError("row " + std::to_string(line_no) + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
        }
        CountryRecord rec;
        rec.name = std::string(trim(fields[0]));
        if (rec.name.empty()) {
            throw ValidationError("row " + std::to_string(line_no) + ": empty country name");
        }
        std::string lower = to_lower(rec.name);
        if (std::find(seen_lower.begin(), seen_lower.end(), lower) != seen_lower.end()) {
            throw ValidationError("row " + std::to_string(line_no) + ": duplicate country '" +
                                  rec.name + "'");
        }
        seen_lower.push_back(std::move(lower));

        rec.security = parse_score(fields[1], "security", line_no);
        rec.equity = parse_score(fields[2], "equity", line_no);
        rec.sustainability = parse_score(fields[3], "sustainability", line_no);
        rec.trilemma = parse_score(fields[4], "trilemma", line_no);
        ds.records.push_back(std::move(rec));
    }

    if (!saw_header) throw ValidationError("row 1: missing header");
    if (ds.records.empty()) throw ValidationError("empty body");
    return ds;
}

Dataset parse_dataset_string(std::string_view text, std::string source) {
    std::istringstream stream{std::string(text)};
    return parse_dataset(stream, std::move(source));
}

Dataset parse_dataset_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "'");
    return parse_dataset(file, path);
}

std::string serialize_dataset(const Dataset& ds) {
    std::string out{kHeader};
    out.push_back('\n');
    for (const CountryRecord& rec : ds.records) {
        out += csv_field(rec.name);
        for (Dimension d : kAllDimensions) {
            out.push_back(',');
            out += format_score(rec.score(d));
        }
        out.push_back('\n');
    }
    return out;
}

const Dataset& embedded_reference() {
    static const Dataset ds = [] {
        Dataset d;
        d.source = "embedded-reference";
        d.records.reserve(std::size(kReference));
        for (const ReferenceRow& row : kReference) {
            d.records.push_back({row.name, row.security, row.equity, row.sustainability,
                                 row.trilemma});
        }
        return d;
    }();
    return ds;
}

const std::array<int, 38>& reference_printed_ranks(Dimension d) {
    static const auto tables = [] {
        std::array<std::array<int, 38>, 4> t{};
        for (std::size_t i = 0; i < std::size(kReference); ++i) {
            t[0][i] = kReference[i].security_rank;
            t[1][i] = kReference[i].equity_rank;
            t[2][i] = kReference[i].sustainability_rank;
            t[3][i] = kReference[i].trilemma_rank;
        }
        return t;
    }();
    return tables[static_cast<std::size_t>(d)];
}

FeatureMatrix select_features(const Dataset& ds, std::span<const std::string> columns,
                              Scaling scaling) {
    if (ds.records.empty()) throw ValidationError("dataset is empty");
    if (columns.empty()) throw ValidationError("no columns selected");

    std::vector<Dimension> dims;
    dims.reserve(columns.size());
    for (const std::string& name : columns) {
        Dimension d = dimension_from_name(name);
        if (std::find(dims.begin(), dims.end(), d) != dims.end()) {
            throw ValidationError("duplicate column '" + name + "'");
        }
        dims.push_back(d);
    }

    FeatureMatrix fm;
    fm.rows = ds.records.size();
    fm.cols = dims.size();
    fm.scaling = scaling;
    for (Dimension d : dims) fm.columns.emplace_back(dimension_name(d));
    fm.values.resize(fm.rows * fm.cols);
    for (std::size_t r = 0; r < fm.rows; ++r) {
        for (std::size_t c = 0; c < fm.cols; ++c) {
            fm.values[r * fm.cols + c] = ds.records[r].score(dims[c]);
        }
    }

    if (scaling == Scaling::ZScore) {
        if (fm.rows < 2) throw ValidationError("z-score needs at least 2 rows");
        fm.column_means.resize(fm.cols);
        fm.column_stdevs.resize(fm.cols);
        for (std::size_t c = 0; c < fm.cols; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < fm.rows; ++r) sum += fm.at(r, c);
            double mean = sum / static_cast<double>(fm.rows);
            double ss = 0.0;
            for (std::size_t r = 0; r < fm.rows; ++r) {
                double d = fm.at(r, c) - mean;
                ss += d * d;
            }
            double stdev = std::sqrt(ss / static_cast<double>(fm.rows - 1));
            if (stdev == 0.0) {
                throw ValidationError("zero-variance column '" + fm.columns[c] +
                                      "' under z-score");
            }
            fm.column_means[c] = mean;
            fm.column_stdevs[c] = stdev;
            for (std::size_t r = 0; r < fm.rows; ++r) {
                fm.values[r * fm.cols + c] = (fm.at(r, c) - mean) / stdev;
            }
        }
    }
    return fm;
}

FeatureMatrix select_features(const Dataset& ds, std::initializer_list<std::string> columns,
                              Scaling scaling) {
    std::vector<std::string> cols(columns);
    return select_features(ds, cols, scaling);
}

std::vector<RankEntry> rank_column(const Dataset& ds, Dimension dim) {
    if (ds.records.empty()) throw ValidationError("dataset is empty");
    const std::size_t n = ds.records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ds.records[a].score(dim) > ds.records[b].score(dim);
    });
    std::vector<RankEntry> ranks(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        ranks[order[pos]] = {ds.records[order[pos]].name, static_cast<int>(pos) + 1};
    }
    return ranks;
}

}  // namespace trilemma
