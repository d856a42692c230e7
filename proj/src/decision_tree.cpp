#include "dsenlg/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsenlg {

namespace {

constexpr double kSplitInfoFloor = 1e-12;

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain_ratio = -1.0;
};

double entropy_from_counts(double minority, double majority) {
    const double total = minority + majority;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double part : {minority, majority}) {
        if (part > 0.0) {
            const double p = part / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// Scans every midpoint threshold of every feature over the given rows.
SplitChoice find_best_split(const Matrix& X, std::span<const Label> y,
                            const std::vector<Index>& rows) {
    const Index n = static_cast<Index>(rows.size());
    Index total_minority = 0;
    for (Index r : rows) total_minority += (y[static_cast<std::size_t>(r)] == Label::Minority);
    const Index total_majority = n - total_minority;
    const double parent = entropy_from_counts(static_cast<double>(total_minority),
                                              static_cast<double>(total_majority));

    SplitChoice best;
    std::vector<std::pair<double, Index>> ordered(static_cast<std::size_t>(n));
    for (int f = 0; f < X.cols(); ++f) {
        for (Index i = 0; i < n; ++i) {
            const Index r = rows[static_cast<std::size_t>(i)];
            ordered[static_cast<std::size_t>(i)] = {X(r, f), r};
        }
        std::sort(ordered.begin(), ordered.end());

        Index left_minority = 0;
        for (Index i = 0; i + 1 < n; ++i) {
            left_minority += (y[static_cast<std::size_t>(ordered[static_cast<std::size_t>(i)].second)] ==
                              Label::Minority);
            const double v = ordered[static_cast<std::size_t>(i)].first;
            const double next = ordered[static_cast<std::size_t>(i + 1)].first;
            if (v == next) continue;
            const Index left_n = i + 1;
            const Index right_n = n - left_n;
            const Index right_minority = total_minority - left_minority;
            const double wl = static_cast<double>(left_n) / static_cast<double>(n);
            const double wr = static_cast<double>(right_n) / static_cast<double>(n);
            const double gain =
                parent -
                wl * entropy_from_counts(static_cast<double>(left_minority),
                                         static_cast<double>(left_n - left_minority)) -
                wr * entropy_from_counts(static_cast<double>(right_minority),
                                         static_cast<double>(right_n - right_minority));
            const double split_info = -(wl * std::log2(wl) + wr * std::log2(wr));
            const double ratio = gain / std::max(split_info, kSplitInfoFloor);
            // Strict improvement keeps ties on the smallest feature index and
            // threshold, so training is deterministic.
            if (ratio > best.gain_ratio) {
                best.feature = f;
                best.threshold = 0.5 * (v + next);
                best.gain_ratio = ratio;
            }
        }
    }
    return best;
}

}  // namespace

double DecisionTree::entropy(Index minority, Index majority) {
    return entropy_from_counts(static_cast<double>(minority), static_cast<double>(majority));
}

double DecisionTree::best_gain_ratio(const Matrix& X, std::span<const Label> y) {
    std::vector<Index> rows(static_cast<std::size_t>(X.rows()));
    for (Index i = 0; i < X.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
    return find_best_split(X, y, rows).gain_ratio;
}

std::int32_t DecisionTree::build(const Matrix& X, std::span<const Label> y,
                                 std::vector<Index>& rows, int depth,
                                 const TreeParams& params) {
    Index minority = 0;
    for (Index r : rows) minority += (y[static_cast<std::size_t>(r)] == Label::Minority);
    const Index n = static_cast<Index>(rows.size());
    const Index majority = n - minority;

    Node node;
    node.minority_fraction = static_cast<double>(minority) / static_cast<double>(n);
    node.label = (minority >= majority) ? Label::Minority : Label::Majority;

    const bool pure = (minority == 0 || majority == 0);
    if (!pure && depth < params.max_depth &&
        n >= static_cast<Index>(params.min_samples_split)) {
        const SplitChoice split = find_best_split(X, y, rows);
        if (split.feature >= 0 && split.gain_ratio >= params.min_gain_ratio) {
            std::vector<Index> left_rows, right_rows;
            for (Index r : rows) {
                (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
            }
            if (!left_rows.empty() && !right_rows.empty()) {
                rows.clear();
                rows.shrink_to_fit();
                node.feature = split.feature;
                node.threshold = split.threshold;
                const auto id = static_cast<std::int32_t>(nodes_.size());
                nodes_.push_back(node);
                const std::int32_t left = build(X, y, left_rows, depth + 1, params);
                const std::int32_t right = build(X, y, right_rows, depth + 1, params);
                nodes_[static_cast<std::size_t>(id)].left = left;
                nodes_[static_cast<std::size_t>(id)].right = right;
                return id;
            }
        }
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    return id;
}

DecisionTree DecisionTree::train(const Matrix& X, std::span<const Label> y,
                                 const TreeParams& params, std::uint64_t seed) {
    (void)seed;  // splits are fully deterministic; ties resolve by feature order
    if (X.rows() == 0) throw std::invalid_argument("train: empty input");
    if (static_cast<Index>(y.size()) != X.rows()) {
        throw std::invalid_argument("train: label count mismatch");
    }
    if (params.max_depth < 1) throw std::invalid_argument("train: max_depth must be >= 1");
    DecisionTree tree;
    tree.input_dim_ = X.cols();
    std::vector<Index> rows(static_cast<std::size_t>(X.rows()));
    for (Index i = 0; i < X.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
    tree.build(X, y, rows, 0, params);
    return tree;
}

std::pair<Label, double> DecisionTree::predict(const RowVector& x) const {
    if (x.size() != input_dim_) throw std::invalid_argument("predict: dimension mismatch");
    std::int32_t at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
        const Node& node = nodes_[static_cast<std::size_t>(at)];
        at = (x(node.feature) <= node.threshold) ? node.left : node.right;
    }
    const Node& leaf = nodes_[static_cast<std::size_t>(at)];
    return {leaf.label, leaf.minority_fraction};
}

LabelVector DecisionTree::predict_batch(const Matrix& X) const {
    LabelVector out(static_cast<std::size_t>(X.rows()));
    for (Index i = 0; i < X.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = predict(X.row(i)).first;
    }
    return out;
}

int DecisionTree::depth() const {
    // Iterative depth over the child links.
    std::vector<std::pair<std::int32_t, int>> stack{{0, 1}};
    int depth = 0;
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.feature < 0) {
            depth = std::max(depth, d);
        } else {
            stack.push_back({node.left, d + 1});
            stack.push_back({node.right, d + 1});
        }
    }
    return depth;
}

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b) {
    return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left &&
           a.right == b.right && a.label == b.label &&
           a.minority_fraction == b.minority_fraction;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return a.input_dim_ == b.input_dim_ && a.nodes_ == b.nodes_;
}

}  // namespace dsenlg
