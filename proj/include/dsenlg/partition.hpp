#pragma once

#include "dsenlg/dataset.hpp"
#include "dsenlg/types.hpp"

#include <vector>

namespace dsenlg {

/// One balanced training pool: a disjoint slice of the sorted majority class
/// fused with every minority sample.
struct BalancedSubset {
    int subset_index = 0;
    std::vector<Index> majority_indices;
    std::vector<Index> minority_indices;
};

struct PartitionOptions {
    /// When n1 is not a multiple of n2 the leftover majority samples are
    /// dropped; set this to append them to the last subset instead.
    bool append_remainder = false;
};

struct PartitionResult {
    std::vector<BalancedSubset> subsets;
    Index zero_weight_rows = 0;  // rows whose shifted feature sum vanished
    std::vector<Index> dropped_majority;
};

/// Feature-weighted index of a (non-negative) sample: y = sum x_f^2 / sum x_f,
/// i.e. the weighted sum with weights x_f / sum x_f. An all-zero vector maps
/// to 0.
double feature_weight_index(const RowVector& x);

/// Number of balanced subsets: floor(n1 / n2), at least 1.
int subset_count(Index majority, Index minority);

/// Sorts majority samples by their feature-weighted index (ties keep original
/// order), slices them into subset_count groups of n2, and fuses each with the
/// full minority class. Index arithmetic only; features are shifted by their
/// per-column minimum before weighting so the magnitude ordering survives
/// negative values.
PartitionResult divide_and_fuse(const Dataset& train, const PartitionOptions& options = {});

}  // namespace dsenlg
