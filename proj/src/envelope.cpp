#include "dsenlg/envelope.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsenlg {

std::vector<Index> knn(const Matrix& reference, const RowVector& query, int k,
                       Index exclude_index) {
    const Index n = reference.rows();
    const Index available = n - (exclude_index >= 0 ? 1 : 0);
    if (k < 0) throw std::invalid_argument("knn: k must be non-negative");
    if (static_cast<Index>(k) > available) {
        throw std::invalid_argument("knn: k exceeds available reference rows");
    }
    std::vector<std::pair<double, Index>> dist;
    dist.reserve(static_cast<std::size_t>(available));
    for (Index i = 0; i < n; ++i) {
        if (i == exclude_index) continue;
        dist.emplace_back((reference.row(i) - query).squaredNorm(), i);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<Index> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
    return out;
}

namespace {

EnvelopeSet concat_neighbors(const Matrix& reference, const Matrix& queries, int k,
                             bool exclude_self) {
    const Index n = queries.rows();
    const Index s = queries.cols();
    EnvelopeSet env;
    env.original_dim = s;
    env.neighbor_count = k;
    env.samples.resize(n, (static_cast<Index>(k) + 1) * s);
    env.source_indices.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        env.samples.block(i, 0, 1, s) = queries.row(i);
        auto& src = env.source_indices[static_cast<std::size_t>(i)];
        src.push_back(i);
        const auto nbrs = knn(reference, queries.row(i), k, exclude_self ? i : Index{-1});
        for (int j = 0; j < k; ++j) {
            const Index nb = nbrs[static_cast<std::size_t>(j)];
            env.samples.block(i, (static_cast<Index>(j) + 1) * s, 1, s) = reference.row(nb);
            src.push_back(nb);
        }
    }
    return env;
}

}  // namespace

EnvelopeSet snc(const Matrix& X, int k) {
    if (X.rows() <= static_cast<Index>(k)) {
        throw std::invalid_argument("snc: need more samples than neighbours");
    }
    return concat_neighbors(X, X, k, /*exclude_self=*/true);
}

EnvelopeSet snc_transform(const Matrix& train_X, const Matrix& query_X, int k) {
    if (train_X.rows() <= static_cast<Index>(k)) {
        throw std::invalid_argument("snc_transform: need more training rows than neighbours");
    }
    if (train_X.cols() != query_X.cols()) {
        throw std::invalid_argument("snc_transform: dimension mismatch");
    }
    return concat_neighbors(train_X, query_X, k, /*exclude_self=*/false);
}

}  // namespace dsenlg
