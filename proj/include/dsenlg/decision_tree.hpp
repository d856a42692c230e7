#pragma once

#include "dsenlg/types.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dsenlg {

struct TreeParams {
    int max_depth = 12;
    int min_samples_split = 2;
    double min_gain_ratio = 1e-7;
};

/// Axis-aligned binary decision tree split on the information gain ratio,
/// numeric thresholds at midpoints between consecutive distinct values.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        Label label = Label::Majority;
        double minority_fraction = 0.0;
    };

    static DecisionTree train(const Matrix& X, std::span<const Label> y,
                              const TreeParams& params, std::uint64_t seed = 0);

    /// Root-to-leaf routing; returns the leaf's majority label and its
    /// minority share.
    std::pair<Label, double> predict(const RowVector& x) const;

    LabelVector predict_batch(const Matrix& X) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    Index input_dim() const { return input_dim_; }
    int depth() const;

    /// Training-set split diagnostics, exposed for verification: the best
    /// gain ratio over all (feature, threshold) candidates for the rows of X.
    static double best_gain_ratio(const Matrix& X, std::span<const Label> y);

    static double entropy(Index minority, Index majority);

    friend bool operator==(const DecisionTree& a, const DecisionTree& b);

    std::vector<Node> nodes_;  // public-ish for serialization helpers
    Index input_dim_ = 0;

private:
    std::int32_t build(const Matrix& X, std::span<const Label> y, std::vector<Index>& rows,
                       int depth, const TreeParams& params);
};

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b);

}  // namespace dsenlg
