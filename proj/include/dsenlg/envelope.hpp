#pragma once

#include "dsenlg/types.hpp"

#include <vector>

namespace dsenlg {

/// Exact brute-force k-nearest-neighbour query under Euclidean distance.
/// Returns the k reference row indices ordered by ascending distance;
/// distance ties break toward the smaller index. `exclude_index` removes one
/// reference row (the query itself) from consideration; pass -1 to keep all.
std::vector<Index> knn(const Matrix& reference, const RowVector& query, int k,
                       Index exclude_index = -1);

/// Samples widened by concatenating each row with its k nearest neighbours,
/// giving dimension (k+1)*s. Row i starts with the original sample i.
struct EnvelopeSet {
    Matrix samples;                            // n x (k+1)*s
    std::vector<std::vector<Index>> source_indices;  // self followed by neighbours
    Index original_dim = 0;
    int neighbor_count = 0;
};

/// Envelope construction over one set: neighbours are drawn from X itself,
/// excluding the sample's own row. k = 0 degenerates to a pass-through.
EnvelopeSet snc(const Matrix& X, int k);

/// Out-of-sample envelope: each query row is concatenated with its k nearest
/// rows of `train_X` (no self-exclusion; queries are not part of the
/// reference set).
EnvelopeSet snc_transform(const Matrix& train_X, const Matrix& query_X, int k);

}  // namespace dsenlg
