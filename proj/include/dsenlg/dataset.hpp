#pragma once

#include "dsenlg/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dsenlg {

/// A binary imbalance problem: real-valued features plus minority/majority
/// labels. The minority class is the rarer one by construction, so the
/// imbalance ratio is always >= 1.
struct Dataset {
    std::string name;
    Matrix features;  // n x s
    LabelVector labels;
    std::vector<std::string> feature_names;
    std::string minority_name;  // original class strings, kept as provenance
    std::string majority_name;

    Index size() const { return features.rows(); }
    Index dim() const { return features.cols(); }
    Index minority_count() const;
    Index majority_count() const;
};

/// Validates the Dataset invariants (sizes, finiteness, both classes present);
/// throws std::invalid_argument on violation.
void validate(const Dataset& ds);

Dataset load_keel(const std::filesystem::path& path);

/// Writes a Dataset back out as a KEEL .dat file.
void save_keel(const Dataset& ds, const std::filesystem::path& path);

/// Label column given either by header name (file must have a header row) or
/// by zero-based column index (file is read headerless).
using ColumnRef = std::variant<std::string, int>;

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                 const std::string& minority_label);

double imbalance_ratio(const Dataset& ds);

struct CVSplit {
    int repeat_index = 0;
    int fold_index = 0;
    std::vector<Index> train_indices;
    std::vector<Index> test_indices;
};

/// Repeated stratified k-fold splits: per-class counts across the folds of one
/// repeat differ by at most one, and the output is a pure function of the seed.
std::vector<CVSplit> stratified_splits(const Dataset& ds, int folds, int repeats,
                                       std::uint64_t seed);

/// Builds the Dataset consisting of the given rows (order preserved).
Dataset subset(const Dataset& ds, std::span<const Index> rows);

Matrix rows_of(const Matrix& m, std::span<const Index> rows);

/// Per-feature z-scoring with statistics taken from the fit matrix; constant
/// features are mapped to zero.
class Standardizer {
public:
    void fit(const Matrix& X);
    Matrix transform(const Matrix& X) const;

    static Standardizer from_stats(Vector mean, Vector scale);

    const Vector& mean() const { return mean_; }
    const Vector& scale() const { return scale_; }

private:
    Vector mean_;
    Vector scale_;  // 1/std, or 0 for constant features
};

}  // namespace dsenlg
