#include "trilemma/hier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "trilemma/error.hpp"

namespace trilemma {

namespace {

double base_distance(std::span<const double> a, std::span<const double> b, Linkage linkage) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    // ward's recurrence runs on squared distances; the others on plain ones
    return linkage == Linkage::Ward ? acc : std::sqrt(acc);
}

double lance_williams(Linkage linkage, double d_it, double d_jt, double d_ij, int n_i, int n_j,
                      int n_t) {
    switch (linkage) {
        case Linkage::Single:
            return std::min(d_it, d_jt);
        case Linkage::Complete:
            return std::max(d_it, d_jt);
        case Linkage::Average:
            return (n_i * d_it + n_j * d_jt) / static_cast<double>(n_i + n_j);
        case Linkage::Ward: {
            double n = n_i + n_j + n_t;
            return ((n_i + n_t) * d_it + (n_j + n_t) * d_jt - n_t * d_ij) / n;
        }
    }
    return 0.0;
}

bool needs_quoting(std::string_view label) {
    for (char c : label) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                     c == '_' || c == '.' || c == '-' ||
                     static_cast<unsigned char>(c) >= 0x80;  // UTF-8 continuation bytes
        if (!plain) return true;
    }
    return label.empty();
}

std::string newick_label(std::string_view label) {
    if (!needs_quoting(label)) return std::string(label);
    std::string out = "'";
    for (char c : label) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    out += "'";
    return out;
}

std::string format_length(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::string_view linkage_name(Linkage l) {
    switch (l) {
        case Linkage::Ward: return "ward";
        case Linkage::Single: return "single";
        case Linkage::Complete: return "complete";
        case Linkage::Average: return "average";
    }
    return "?";
}

Linkage linkage_from_name(std::string_view name) {
    if (name == "ward") return Linkage::Ward;
    if (name == "single") return Linkage::Single;
    if (name == "complete") return Linkage::Complete;
    if (name == "average") return Linkage::Average;
    throw ValidationError("unknown linkage '" + std::string(name) + "'");
}

std::string_view Dendrogram::height_metric() const {
    return linkage == Linkage::Ward ? "squared-euclidean" : "euclidean";
}

Dendrogram agglomerate(const FeatureMatrix& fm, Linkage linkage,
                       std::span<const std::string> leaf_names) {
    const std::size_t n = fm.rows;
    if (n < 2) throw ValidationError("agglomeration needs at least 2 points");
    if (leaf_names.size() != n) throw ValidationError("leaf name count mismatch");
    for (double v : fm.values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in feature matrix");
    }

    const std::size_t total = 2 * n - 1;
    // dense node-by-node distance table; fine for the corpus sizes this serves
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i][j] = dist[j][i] = base_distance(fm.row(i), fm.row(j), linkage);
        }
    }

    std::vector<int> active;
    active.reserve(n);
    for (std::size_t i = 0; i < n; ++i) active.push_back(static_cast<int>(i));
    std::vector<int> sizes(total, 1);

    Dendrogram dg;
    dg.linkage = linkage;
    dg.leaves.assign(leaf_names.begin(), leaf_names.end());
    dg.merges.reserve(n - 1);

    for (std::size_t m = 0; m + 1 < n; ++m) {
        // strict < plus ascending (i, j) scan ties to the smallest id pair
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                double d = dist[active[a]][active[b]];
                if (d < best) {
                    best = d;
                    bi = a;
                    bj = b;
                }
            }
        }
        int left = active[bi];
        int right = active[bj];
        int merged = static_cast<int>(n + m);
        sizes[merged] = sizes[left] + sizes[right];
        dg.merges.push_back({left, right, best, sizes[merged]});

        active.erase(active.begin() + bj);
        active.erase(active.begin() + bi);
        for (int t : active) {
            double d = lance_williams(linkage, dist[left][t], dist[right][t], best, sizes[left],
                                      sizes[right], sizes[t]);
            dist[merged][t] = dist[t][merged] = d;
        }
        active.push_back(merged);
    }
    return dg;
}

Dendrogram agglomerate(const FeatureMatrix& fm, Linkage linkage) {
    std::vector<std::string> names;
    names.reserve(fm.rows);
    for (std::size_t i = 0; i < fm.rows; ++i) names.push_back("p" + std::to_string(i));
    return agglomerate(fm, linkage, names);
}

std::vector<int> cut(const Dendrogram& dg, int k) {
    const int n = static_cast<int>(dg.leaf_count());
    if (k < 1 || k > n) {
        throw ValidationError("cut k = " + std::to_string(k) + " outside 1..n for n = " +
                              std::to_string(n));
    }

    // union-find over the first n-k merges
    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int m = 0; m < n - k; ++m) {
        int node = n + m;
        parent[find(dg.merges[m].left)] = node;
        parent[find(dg.merges[m].right)] = node;
    }

    std::vector<int> labels(n, -1);
    std::vector<int> component_label(2 * n - 1, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int root = find(i);
        if (component_label[root] < 0) component_label[root] = next++;
        labels[i] = component_label[root];
    }
    return labels;
}

namespace {

void newick_node(const Dendrogram& dg, int node, double parent_height, std::string& out) {
    const int n = static_cast<int>(dg.leaf_count());
    double height = node < n ? 0.0 : dg.merges[node - n].height;
    if (node < n) {
        out += newick_label(dg.leaves[node]);
    } else {
        const Merge& merge = dg.merges[node - n];
        out.push_back('(');
        newick_node(dg, merge.left, height, out);
        out.push_back(',');
        newick_node(dg, merge.right, height, out);
        out.push_back(')');
    }
    out.push_back(':');
    out += format_length(parent_height - height);
}

}  // namespace

std::string to_newick(const Dendrogram& dg) {
    const int n = static_cast<int>(dg.leaf_count());
    std::string out;
    int root = 2 * n - 2;
    double root_height = dg.merges.back().height;
    const Merge& merge = dg.merges[root - n];
    out.push_back('(');
    newick_node(dg, merge.left, root_height, out);
    out.push_back(',');
    newick_node(dg, merge.right, root_height, out);
    out += ");";
    return out;
}

}  // namespace trilemma
