#include "dsenlg/ensemble.hpp"

#include "dsenlg/envelope.hpp"
#include "dsenlg/rng.hpp"
#include "dsenlg/serialize.hpp"

#include <doctest.h>

#include <filesystem>

using namespace dsenlg;

namespace {

std::filesystem::path data_dir() { return DSENLG_DATA_DIR; }

/// Two shifted blobs with the requested class counts.
Dataset blob_dataset(Index minority, Index majority, std::uint64_t seed, Index dim = 3) {
    Dataset ds;
    ds.name = "blobs";
    ds.features.resize(minority + majority, dim);
    Rng rng(seed);
    for (Index i = 0; i < minority; ++i) {
        for (Index j = 0; j < dim; ++j) ds.features(i, j) = 1.5 + rng.normal() * 0.6;
        ds.labels.push_back(Label::Minority);
    }
    for (Index i = minority; i < minority + majority; ++i) {
        for (Index j = 0; j < dim; ++j) ds.features(i, j) = -1.5 + rng.normal() * 0.6;
        ds.labels.push_back(Label::Majority);
    }
    return ds;
}

PipelineConfig small_config(AblationMode mode) {
    PipelineConfig cfg;
    cfg.dsen.neighbor_count = 2;
    cfg.dsen.layer_count = 2;
    cfg.align.graph_neighbors = 2;
    cfg.align.subspace_dim = 6;
    cfg.align.max_outer = 15;
    cfg.ablation = mode;
    return cfg;
}

}  // namespace

TEST_CASE("fit on an iris0 train fold yields Q*L voting trees") {
    const Dataset iris = load_keel(data_dir() / "iris0.dat");
    const auto splits = stratified_splits(iris, 5, 1, 3);
    const Dataset train = subset(iris, splits[0].train_indices);
    // Train fold counts 40/80 -> Q = 2; default L = 3.
    PipelineConfig cfg;
    const PipelineModel model = fit(train, cfg, 11);
    CHECK(model.subsets.size() == 2);
    CHECK(model.classifier_count() == 6);
    for (const auto& s : model.subsets) {
        CHECK(s.layers.size() == 3);
        for (const auto& layer : s.layers) CHECK(layer.alignment.has_value());
    }
}

TEST_CASE("shape chain: s -> (K+1)s -> d across layers") {
    const Dataset ds = blob_dataset(20, 40, 5);
    PipelineConfig cfg = small_config(AblationMode::Full);
    const PipelineModel model = fit(ds, cfg, 1);
    for (const auto& s : model.subsets) {
        const auto& first = s.layers.front();
        CHECK(first.input_dim == (cfg.dsen.neighbor_count + 1) * ds.dim());
        for (std::size_t li = 1; li < s.layers.size(); ++li) {
            CHECK(s.layers[li].input_dim == s.layers[li - 1].output_dim);
        }
        for (const auto& layer : s.layers) {
            CHECK(layer.output_dim == layer.alignment->subspace_dim);
            CHECK(layer.tree.input_dim() == layer.output_dim);
        }
    }
}

TEST_CASE("ablation none trains raw trees on the balanced subsets") {
    const Dataset ds = blob_dataset(10, 31, 7);
    PipelineConfig cfg = small_config(AblationMode::None);
    const PipelineModel model = fit(ds, cfg, 2);
    CHECK(model.subsets.size() == 3);  // floor(31/10)
    CHECK(model.classifier_count() == 3);
    for (const auto& s : model.subsets) {
        REQUIRE(s.layers.size() == 1);
        CHECK_FALSE(s.layers[0].alignment.has_value());
        CHECK(s.layers[0].tree.input_dim() == ds.dim());
        CHECK(s.snc_reference.size() == 0);  // no envelope is ever built
    }
}

TEST_CASE("ablation mifcm keeps prototypes at the envelope dimension") {
    const Dataset ds = blob_dataset(12, 25, 9);
    PipelineConfig cfg = small_config(AblationMode::MifcmOnly);
    const PipelineModel model = fit(ds, cfg, 3);
    for (const auto& s : model.subsets) {
        for (const auto& layer : s.layers) {
            CHECK_FALSE(layer.alignment.has_value());
            CHECK(layer.output_dim == (cfg.dsen.neighbor_count + 1) * ds.dim());
        }
    }
}

TEST_CASE("predict reduces to the single tree for one subset and one layer") {
    const Dataset ds = blob_dataset(12, 12, 13);  // Q = 1
    PipelineConfig cfg = small_config(AblationMode::Full);
    cfg.dsen.layer_count = 1;
    const PipelineModel model = fit(ds, cfg, 5);
    REQUIRE(model.subsets.size() == 1);
    REQUIRE(model.subsets[0].layers.size() == 1);

    const Matrix test = blob_dataset(6, 6, 77).features;
    const Prediction pred = predict(model, test);

    // Recompute the single tree's path by hand.
    const Matrix std_x = model.scaler.transform(test);
    const Matrix env =
        snc_transform(model.subsets[0].snc_reference, std_x, cfg.dsen.neighbor_count).samples;
    const Matrix projected =
        project(*model.subsets[0].layers[0].alignment, env).transpose();
    const LabelVector direct = model.subsets[0].layers[0].tree.predict_batch(projected);
    CHECK(pred.labels == direct);
}

TEST_CASE("vote ties resolve toward the minority class") {
    // Hand-built model with two constant trees that disagree.
    Matrix minority_only(2, 1), majority_only(2, 1);
    minority_only << 0, 1;
    majority_only << 0, 1;
    const LabelVector all_min(2, Label::Minority);
    const LabelVector all_maj(2, Label::Majority);

    PipelineModel model;
    model.config = small_config(AblationMode::None);
    model.feature_dim = 1;
    Matrix stats(2, 1);
    stats << 0.0, 2.0;
    model.scaler.fit(stats);
    for (int s = 0; s < 2; ++s) {
        SubsetModel sm;
        sm.subset_index = s;
        LayerModel layer;
        layer.layer_index = 1;
        layer.input_dim = 1;
        layer.output_dim = 1;
        layer.tree = DecisionTree::train(s == 0 ? minority_only : majority_only,
                                         s == 0 ? all_min : all_maj, TreeParams{});
        sm.layers.push_back(std::move(layer));
        model.subsets.push_back(std::move(sm));
    }

    Matrix x(1, 1);
    x << 0.5;
    const Prediction pred = predict(model, x);
    CHECK(pred.labels[0] == Label::Minority);
    CHECK(pred.minority_vote_fraction[0] == doctest::Approx(0.5));

    // Unanimous agreement keeps the fraction at an extreme.
    model.subsets[1].layers[0].tree = model.subsets[0].layers[0].tree;
    const Prediction both = predict(model, x);
    CHECK(both.labels[0] == Label::Minority);
    CHECK(both.minority_vote_fraction[0] == doctest::Approx(1.0));
}

TEST_CASE("fit and predict are deterministic in data, config and seed") {
    const Dataset ds = blob_dataset(14, 30, 21);
    const Matrix test = blob_dataset(5, 9, 22).features;
    PipelineConfig cfg = small_config(AblationMode::Full);
    const PipelineModel a = fit(ds, cfg, 9);
    const PipelineModel b = fit(ds, cfg, 9);
    const Prediction pa = predict(a, test);
    const Prediction pb = predict(b, test);
    CHECK(pa.labels == pb.labels);
    CHECK(pa.minority_vote_fraction == pb.minority_vote_fraction);
}

TEST_CASE("vote trace exposes one vote vector per classifier") {
    const Dataset ds = blob_dataset(10, 21, 25);
    PipelineConfig cfg = small_config(AblationMode::Full);
    const PipelineModel model = fit(ds, cfg, 4);
    const Matrix test = blob_dataset(4, 4, 26).features;
    VoteTrace trace;
    const Prediction pred = predict(model, test, &trace);
    CHECK(static_cast<int>(trace.classifier_ids.size()) == model.classifier_count());
    for (const auto& votes : trace.votes) {
        CHECK(votes.size() == static_cast<std::size_t>(test.rows()));
    }
    // The tally recomputes from the trace.
    for (Index i = 0; i < test.rows(); ++i) {
        int minority = 0;
        for (const auto& votes : trace.votes) {
            minority += (votes[static_cast<std::size_t>(i)] == Label::Minority);
        }
        const bool expect_minority = 2 * minority >= static_cast<int>(trace.votes.size());
        CHECK((pred.labels[static_cast<std::size_t>(i)] == Label::Minority) == expect_minority);
    }
}

TEST_CASE("final-layer vote scope keeps one voter per subset") {
    const Dataset ds = blob_dataset(10, 20, 29);
    PipelineConfig cfg = small_config(AblationMode::Full);
    cfg.vote_scope = VoteScope::FinalLayer;
    const PipelineModel model = fit(ds, cfg, 6);
    CHECK(model.classifier_count() == static_cast<int>(model.subsets.size()));
    VoteTrace trace;
    predict(model, blob_dataset(3, 3, 30).features, &trace);
    CHECK(trace.votes.size() == model.subsets.size());
}

TEST_CASE("subsets smaller than the neighbour count are skipped with a warning") {
    const Dataset ds = blob_dataset(3, 7, 33);
    PipelineConfig cfg = small_config(AblationMode::Full);
    cfg.dsen.neighbor_count = 3;  // equals the minority count
    cfg.align.graph_neighbors = 3;
    CHECK_THROWS(fit(ds, cfg, 7));  // all subsets skipped -> error
}

TEST_CASE("pipeline bundles survive a JSON round trip") {
    const Dataset ds = blob_dataset(12, 26, 35);
    PipelineConfig cfg = small_config(AblationMode::Full);
    const PipelineModel model = fit(ds, cfg, 8);
    const auto path = std::filesystem::temp_directory_path() / "pipeline.json";
    save_pipeline(model, path);
    const PipelineModel loaded = load_pipeline(path);

    const Matrix test = blob_dataset(6, 6, 36).features;
    const Prediction a = predict(model, test);
    const Prediction b = predict(loaded, test);
    CHECK(a.labels == b.labels);
    CHECK(a.minority_vote_fraction == b.minority_vote_fraction);
}

TEST_CASE("config validation catches inconsistent neighbour counts") {
    PipelineConfig cfg;
    cfg.dsen.neighbor_count = 3;
    cfg.align.graph_neighbors = 4;
    CHECK_THROWS(validate(cfg));
}
