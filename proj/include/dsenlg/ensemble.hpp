#pragma once

#include "dsenlg/alignment.hpp"
#include "dsenlg/dataset.hpp"
#include "dsenlg/decision_tree.hpp"
#include "dsenlg/fuzzy_cmeans.hpp"
#include "dsenlg/partition.hpp"
#include "dsenlg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsenlg {

enum class VoteScope { AllLayers, FinalLayer };

/// Full = envelope + layered clustering + alignment; MifcmOnly drops the
/// alignment; None trains plain trees on the balanced subsets (the bagging
/// baseline).
enum class AblationMode { Full, MifcmOnly, None };

struct PipelineConfig {
    DsenConfig dsen;
    AlignParams align;
    TreeParams tree;
    PartitionOptions partition;
    VoteScope vote_scope = VoteScope::AllLayers;
    AblationMode ablation = AblationMode::Full;
    /// Z-score features on train-fold statistics before any distance-based
    /// stage. Off means raw feature scales feed the envelope and kernels.
    bool standardize = true;
};

/// Checks cross-field consistency (the envelope K and the affinity-graph K
/// must agree) on top of the per-part validations.
void validate(const PipelineConfig& cfg);

struct LayerModel {
    int layer_index = 0;  // 1-based
    std::optional<AlignmentModel> alignment;
    DecisionTree tree;
    Index input_dim = 0;
    Index output_dim = 0;
};

struct SubsetModel {
    int subset_index = 0;
    /// Standardized balanced training rows; the reference set for the
    /// out-of-sample envelope.
    Matrix snc_reference;
    std::vector<LayerModel> layers;
};

struct PipelineModel {
    PipelineConfig config;
    Standardizer scaler;
    Index feature_dim = 0;
    std::vector<SubsetModel> subsets;
    std::vector<std::string> warnings;

    /// Number of voting classifiers under the configured vote scope.
    int classifier_count() const;
};

/// Trains the whole pipeline on one (already selected) training fold. Seeds
/// for every stochastic stage derive deterministically from `seed`.
PipelineModel fit(const Dataset& train, const PipelineConfig& cfg, std::uint64_t seed);

struct Prediction {
    LabelVector labels;
    std::vector<double> minority_vote_fraction;
};

/// Per-classifier vote record, used for diversity reporting.
struct VoteTrace {
    std::vector<std::string> classifier_ids;
    std::vector<LabelVector> votes;
};

/// Majority vote over every in-scope tree; ties go to the minority class.
/// X holds raw (unstandardized) feature rows.
Prediction predict(const PipelineModel& model, const Matrix& X, VoteTrace* trace = nullptr);

}  // namespace dsenlg
