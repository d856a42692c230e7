#include "dsenlg/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsenlg {

double feature_weight_index(const RowVector& x) {
    const double total = x.sum();
    if (total == 0.0) return 0.0;
    return x.squaredNorm() / total;
}

int subset_count(Index majority, Index minority) {
    if (minority < 1) throw std::invalid_argument("subset_count: minority count must be >= 1");
    return std::max<Index>(1, majority / minority);
}

PartitionResult divide_and_fuse(const Dataset& train, const PartitionOptions& options) {
    std::vector<Index> minority_idx, majority_idx;
    for (Index i = 0; i < train.size(); ++i) {
        (train.labels[static_cast<std::size_t>(i)] == Label::Minority ? minority_idx
                                                                      : majority_idx)
            .push_back(i);
    }
    if (minority_idx.empty() || majority_idx.empty()) {
        throw std::invalid_argument("divide_and_fuse: both classes required");
    }
    const Index n2 = static_cast<Index>(minority_idx.size());
    const Index n1 = static_cast<Index>(majority_idx.size());
    const int q = subset_count(n1, n2);

    const RowVector shift = train.features.colwise().minCoeff();

    PartitionResult result;
    std::vector<std::pair<double, Index>> keyed;
    keyed.reserve(majority_idx.size());
    for (Index i : majority_idx) {
        const RowVector shifted = train.features.row(i) - shift;
        const double y = feature_weight_index(shifted);
        if (shifted.sum() == 0.0) ++result.zero_weight_rows;
        keyed.emplace_back(y, i);
    }
    std::sort(keyed.begin(), keyed.end());  // pair order = (y, original index)

    const Index per_subset = std::min<Index>(n2, n1);
    result.subsets.reserve(static_cast<std::size_t>(q));
    for (int s = 0; s < q; ++s) {
        BalancedSubset subset;
        subset.subset_index = s;
        subset.minority_indices = minority_idx;
        const Index begin = static_cast<Index>(s) * per_subset;
        for (Index p = begin; p < begin + per_subset; ++p) {
            subset.majority_indices.push_back(keyed[static_cast<std::size_t>(p)].second);
        }
        result.subsets.push_back(std::move(subset));
    }
    for (Index p = static_cast<Index>(q) * per_subset; p < n1; ++p) {
        const Index leftover = keyed[static_cast<std::size_t>(p)].second;
        if (options.append_remainder) {
            result.subsets.back().majority_indices.push_back(leftover);
        } else {
            result.dropped_majority.push_back(leftover);
        }
    }
    return result;
}

}  // namespace dsenlg
