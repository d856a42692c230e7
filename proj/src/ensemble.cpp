#include "dsenlg/ensemble.hpp"

#include "dsenlg/envelope.hpp"
#include "dsenlg/rng.hpp"

#include <stdexcept>

namespace dsenlg {

namespace {

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

LabelVector layer_labels(Index minority_rows, Index majority_rows) {
    LabelVector labels;
    labels.reserve(static_cast<std::size_t>(minority_rows + majority_rows));
    labels.insert(labels.end(), static_cast<std::size_t>(minority_rows), Label::Minority);
    labels.insert(labels.end(), static_cast<std::size_t>(majority_rows), Label::Majority);
    return labels;
}

/// Block-diagonal transition warm start from the two per-class membership
/// matrices: column j of the result is the membership column of sample j.
Matrix block_memberships(const Matrix& u_min, const Matrix& u_maj) {
    Matrix g = Matrix::Zero(u_min.rows() + u_maj.rows(), u_min.cols() + u_maj.cols());
    g.topLeftCorner(u_min.rows(), u_min.cols()) = u_min;
    g.bottomRightCorner(u_maj.rows(), u_maj.cols()) = u_maj;
    return g;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
    validate(cfg.dsen);
    if (cfg.dsen.neighbor_count != cfg.align.graph_neighbors) {
        throw std::invalid_argument(
            "pipeline config: envelope K and affinity-graph K must agree");
    }
    if (cfg.tree.max_depth < 1) throw std::invalid_argument("pipeline config: tree depth");
}

int PipelineModel::classifier_count() const {
    int count = 0;
    for (const auto& subset : subsets) {
        if (config.ablation == AblationMode::None) {
            count += 1;
        } else {
            count += (config.vote_scope == VoteScope::AllLayers)
                         ? static_cast<int>(subset.layers.size())
                         : 1;
        }
    }
    return count;
}

PipelineModel fit(const Dataset& train, const PipelineConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    validate(train);

    PipelineModel model;
    model.config = cfg;
    model.feature_dim = train.dim();
    if (cfg.standardize) {
        model.scaler.fit(train.features);
    } else {
        model.scaler = Standardizer::from_stats(Vector::Zero(train.dim()),
                                                Vector::Ones(train.dim()));
    }
    const Matrix standardized = model.scaler.transform(train.features);

    const PartitionResult partition = divide_and_fuse(train, cfg.partition);
    const int k = cfg.dsen.neighbor_count;

    for (const BalancedSubset& subset : partition.subsets) {
        const Matrix x_min = rows_of(standardized, subset.minority_indices);
        const Matrix x_maj = rows_of(standardized, subset.majority_indices);
        const std::uint64_t subset_seed =
            mix_seed(seed, static_cast<std::uint64_t>(subset.subset_index) + 1);

        SubsetModel sm;
        sm.subset_index = subset.subset_index;

        if (cfg.ablation == AblationMode::None) {
            const Matrix pooled = vstack(x_min, x_maj);
            const LabelVector labels = layer_labels(x_min.rows(), x_maj.rows());
            LayerModel layer;
            layer.layer_index = 1;
            layer.input_dim = pooled.cols();
            layer.output_dim = pooled.cols();
            layer.tree = DecisionTree::train(pooled, labels, cfg.tree, subset_seed);
            sm.layers.push_back(std::move(layer));
            model.subsets.push_back(std::move(sm));
            continue;
        }

        if (x_min.rows() <= k || x_maj.rows() <= k) {
            model.warnings.push_back("subset " + std::to_string(subset.subset_index) +
                                     " skipped: fewer samples than envelope neighbours");
            continue;
        }

        // The envelope draws neighbours from the whole balanced subset, the
        // same reference predict() uses, so training and test rows widen
        // identically.
        sm.snc_reference = vstack(x_min, x_maj);
        const Matrix pooled = snc(sm.snc_reference, k).samples;
        Matrix z_min = pooled.topRows(x_min.rows());
        Matrix z_maj = pooled.bottomRows(x_maj.rows());

        const auto schedule_min = resolve_cluster_schedule(cfg.dsen, z_min.rows());
        const auto schedule_maj = resolve_cluster_schedule(cfg.dsen, z_maj.rows());

        for (int l = 0; l < cfg.dsen.layer_count; ++l) {
            const int c_min = schedule_min[static_cast<std::size_t>(l)];
            const int c_maj = schedule_maj[static_cast<std::size_t>(l)];
            FcmResult r_min =
                fcm(z_min, c_min, cfg.dsen, mix_seed(subset_seed, static_cast<std::uint64_t>(l), 0));
            FcmResult r_maj =
                fcm(z_maj, c_maj, cfg.dsen, mix_seed(subset_seed, static_cast<std::uint64_t>(l), 1));
            const Matrix prototypes = vstack(r_min.prototypes, r_maj.prototypes);
            const LabelVector labels = layer_labels(c_min, c_maj);

            LayerModel layer;
            layer.layer_index = l + 1;
            layer.input_dim = z_min.cols();

            if (cfg.ablation == AblationMode::Full) {
                const Matrix layer_input = vstack(z_min, z_maj);
                std::optional<Matrix> init;
                if (cfg.align.transition_init == TransitionInit::Memberships) {
                    init = block_memberships(r_min.memberships, r_maj.memberships);
                }
                AlignmentModel aligned =
                    optimize(layer_input, prototypes, cfg.align,
                             mix_seed(subset_seed, static_cast<std::uint64_t>(l), 2), init);
                const Matrix projected = project(aligned, prototypes).transpose();
                // Classifiers train on the layer's own (labeled) input set
                // projected through the layer's alignment: the same
                // representation an out-of-sample row gets at this depth.
                const Matrix projected_input = project(aligned, layer_input).transpose();
                const LabelVector input_labels = layer_labels(z_min.rows(), z_maj.rows());
                layer.output_dim = projected.cols();
                layer.tree = DecisionTree::train(
                    projected_input, input_labels, cfg.tree,
                    mix_seed(subset_seed, static_cast<std::uint64_t>(l), 3));
                layer.alignment = std::move(aligned);
                z_min = projected.topRows(c_min);
                z_maj = projected.bottomRows(c_maj);
            } else {
                layer.output_dim = prototypes.cols();
                layer.tree = DecisionTree::train(
                    prototypes, labels, cfg.tree,
                    mix_seed(subset_seed, static_cast<std::uint64_t>(l), 3));
                z_min = r_min.prototypes;
                z_maj = r_maj.prototypes;
            }
            sm.layers.push_back(std::move(layer));
        }
        model.subsets.push_back(std::move(sm));
    }

    if (model.subsets.empty()) {
        throw std::runtime_error("fit: every balanced subset was too small to train on");
    }
    return model;
}

Prediction predict(const PipelineModel& model, const Matrix& X, VoteTrace* trace) {
    if (X.cols() != model.feature_dim) throw std::invalid_argument("predict: dimension mismatch");
    const Index n = X.rows();
    const Matrix standardized = model.scaler.transform(X);
    const int k = model.config.dsen.neighbor_count;

    std::vector<LabelVector> all_votes;
    std::vector<std::string> ids;

    for (const SubsetModel& subset : model.subsets) {
        if (model.config.ablation == AblationMode::None) {
            all_votes.push_back(subset.layers.front().tree.predict_batch(standardized));
            ids.push_back("s" + std::to_string(subset.subset_index) + "_l1");
            continue;
        }
        Matrix z = snc_transform(subset.snc_reference, standardized, k).samples;
        for (std::size_t li = 0; li < subset.layers.size(); ++li) {
            const LayerModel& layer = subset.layers[li];
            if (layer.alignment) {
                z = project(*layer.alignment, z).transpose();
            }
            const bool in_scope = model.config.vote_scope == VoteScope::AllLayers ||
                                  li + 1 == subset.layers.size();
            if (in_scope) {
                all_votes.push_back(layer.tree.predict_batch(z));
                ids.push_back("s" + std::to_string(subset.subset_index) + "_l" +
                              std::to_string(layer.layer_index));
            }
        }
    }

    Prediction out;
    out.labels.resize(static_cast<std::size_t>(n));
    out.minority_vote_fraction.resize(static_cast<std::size_t>(n));
    const auto total = static_cast<double>(all_votes.size());
    for (Index i = 0; i < n; ++i) {
        int minority_votes = 0;
        for (const auto& votes : all_votes) {
            minority_votes += (votes[static_cast<std::size_t>(i)] == Label::Minority);
        }
        // Ties favour the minority class (the costlier error).
        out.labels[static_cast<std::size_t>(i)] =
            (2 * minority_votes >= static_cast<int>(all_votes.size())) ? Label::Minority
                                                                       : Label::Majority;
        out.minority_vote_fraction[static_cast<std::size_t>(i)] =
            static_cast<double>(minority_votes) / total;
    }
    if (trace) {
        trace->classifier_ids = std::move(ids);
        trace->votes = std::move(all_votes);
    }
    return out;
}

}  // namespace dsenlg
