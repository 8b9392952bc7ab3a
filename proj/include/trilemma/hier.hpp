#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trilemma/dataset.hpp"

namespace trilemma {

enum class Linkage { Ward, Single, Complete, Average };

std::string_view linkage_name(Linkage l);
Linkage linkage_from_name(std::string_view name);

/// One agglomeration step. Node ids 0..n-1 are leaves; merge m creates node
/// n+m, so left/right always reference leaves or earlier merges.
struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
    int size = 0;  // member count of the merged cluster
};

/// Binary merge tree over n leaves: exactly n-1 merges, heights
/// non-decreasing in merge order for every supported linkage.
struct Dendrogram {
    std::vector<std::string> leaves;  // country names in dataset order
    std::vector<Merge> merges;
    Linkage linkage = Linkage::Ward;

    std::size_t leaf_count() const { return leaves.size(); }

    /// "euclidean" for single/complete/average; ward runs the Lance-Williams
    /// recurrence on squared distances and reports those heights unrooted,
    /// i.e. no square root is applied.
    std::string_view height_metric() const;
};

/// Agglomerative clustering via the Lance-Williams recurrence over Euclidean
/// pairwise distances (squared for ward). Among equal-distance candidate
/// pairs the lexicographically smallest (smaller-id, larger-id) pair merges
/// first, which makes merge order total and deterministic.
Dendrogram agglomerate(const FeatureMatrix& fm, Linkage linkage,
                       std::span<const std::string> leaf_names);

/// Convenience overload labelling leaves p0..p(n-1).
Dendrogram agglomerate(const FeatureMatrix& fm, Linkage linkage);

/// Drops the k-1 last merges and labels the resulting connected components,
/// numbered by first-leaf order. 1 <= k <= n.
std::vector<int> cut(const Dendrogram& dg, int k);

/// Newick serialization. Branch lengths are height differences so the depth
/// of any join below the root equals its merge height; leaves sit at depth
/// equal to the root height. Labels with structural characters are quoted.
std::string to_newick(const Dendrogram& dg);

}  // namespace trilemma
