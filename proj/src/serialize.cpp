#include "dsenlg/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace dsenlg {

using nlohmann::json;

namespace {

constexpr int kBundleVersion = 1;

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"label", static_cast<int>(n.label)},
                         {"minority_fraction", n.minority_fraction}});
    }
    return {{"input_dim", tree.input_dim()}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree tree;
    tree.input_dim_ = j.at("input_dim").get<Index>();
    for (const auto& n : j.at("nodes")) {
        DecisionTree::Node node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::int32_t>();
        node.right = n.at("right").get<std::int32_t>();
        node.label = static_cast<Label>(n.at("label").get<int>());
        node.minority_fraction = n.at("minority_fraction").get<double>();
        tree.nodes_.push_back(node);
    }
    return tree;
}

json alignment_to_json(const AlignmentModel& m) {
    return {{"theta", matrix_to_json(m.theta)},
            {"reference", matrix_to_json(m.kernel.reference)},
            {"sigma", m.kernel.sigma},
            {"subspace_dim", m.subspace_dim},
            {"prototype_count", m.kernel.prototype_count},
            {"sample_count", m.kernel.sample_count}};
}

AlignmentModel alignment_from_json(const json& j) {
    // Only the projection surface is stored; the Gram matrices and ADMM
    // scratch are training-time state.
    AlignmentModel m;
    m.theta = matrix_from_json(j.at("theta"));
    m.kernel.reference = matrix_from_json(j.at("reference"));
    m.kernel.sigma = j.at("sigma").get<double>();
    m.subspace_dim = j.at("subspace_dim").get<int>();
    m.kernel.prototype_count = j.at("prototype_count").get<Index>();
    m.kernel.sample_count = j.at("sample_count").get<Index>();
    return m;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const json& j) {
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    Matrix m(rows, cols);
    const auto& data = j.at("data");
    for (Index i = 0; i < rows; ++i) {
        for (Index c = 0; c < cols; ++c) {
            m(i, c) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

json config_to_json(const PipelineConfig& cfg) {
    return {{"dsen",
             {{"neighbor_count", cfg.dsen.neighbor_count},
              {"layer_count", cfg.dsen.layer_count},
              {"cluster_counts", cfg.dsen.cluster_counts},
              {"cluster_ratio", cfg.dsen.cluster_ratio},
              {"fuzzifier", cfg.dsen.fuzzifier},
              {"epsilon", cfg.dsen.epsilon},
              {"max_iter", cfg.dsen.max_iter}}},
            {"align",
             {{"lambda", cfg.align.lambda},
              {"lambda1", cfg.align.lambda1},
              {"delta", cfg.align.delta},
              {"subspace_dim", cfg.align.subspace_dim},
              {"graph_neighbors", cfg.align.graph_neighbors},
              {"max_outer", cfg.align.max_outer},
              {"tol", cfg.align.tol},
              {"spectrum_floor", cfg.align.spectrum_floor},
              {"ridge", cfg.align.ridge},
              {"sigma_scale", cfg.align.sigma_scale},
              {"variance_floor", cfg.align.variance_floor},
              {"transition_init",
               cfg.align.transition_init == TransitionInit::Memberships ? "memberships"
                                                                        : "zeros"}}},
            {"tree",
             {{"max_depth", cfg.tree.max_depth},
              {"min_samples_split", cfg.tree.min_samples_split},
              {"min_gain_ratio", cfg.tree.min_gain_ratio}}},
            {"partition", {{"append_remainder", cfg.partition.append_remainder}}},
            {"standardize", cfg.standardize},
            {"vote_scope", cfg.vote_scope == VoteScope::AllLayers ? "all_layers" : "final_layer"},
            {"ablation", cfg.ablation == AblationMode::Full      ? "full"
                         : cfg.ablation == AblationMode::MifcmOnly ? "mifcm"
                                                                   : "none"}};
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig cfg;
    const auto& d = j.at("dsen");
    cfg.dsen.neighbor_count = d.at("neighbor_count").get<int>();
    cfg.dsen.layer_count = d.at("layer_count").get<int>();
    cfg.dsen.cluster_counts = d.at("cluster_counts").get<std::vector<int>>();
    cfg.dsen.cluster_ratio = d.at("cluster_ratio").get<double>();
    cfg.dsen.fuzzifier = d.at("fuzzifier").get<double>();
    cfg.dsen.epsilon = d.at("epsilon").get<double>();
    cfg.dsen.max_iter = d.at("max_iter").get<int>();
    const auto& a = j.at("align");
    cfg.align.lambda = a.at("lambda").get<double>();
    cfg.align.lambda1 = a.at("lambda1").get<double>();
    cfg.align.delta = a.at("delta").get<double>();
    cfg.align.subspace_dim = a.at("subspace_dim").get<int>();
    cfg.align.graph_neighbors = a.at("graph_neighbors").get<int>();
    cfg.align.max_outer = a.at("max_outer").get<int>();
    cfg.align.tol = a.at("tol").get<double>();
    cfg.align.spectrum_floor = a.at("spectrum_floor").get<double>();
    cfg.align.ridge = a.at("ridge").get<double>();
    cfg.align.sigma_scale = a.at("sigma_scale").get<double>();
    cfg.align.variance_floor = a.at("variance_floor").get<double>();
    cfg.align.transition_init = a.at("transition_init").get<std::string>() == "memberships"
                                    ? TransitionInit::Memberships
                                    : TransitionInit::Zeros;
    const auto& t = j.at("tree");
    cfg.tree.max_depth = t.at("max_depth").get<int>();
    cfg.tree.min_samples_split = t.at("min_samples_split").get<int>();
    cfg.tree.min_gain_ratio = t.at("min_gain_ratio").get<double>();
    cfg.partition.append_remainder = j.at("partition").at("append_remainder").get<bool>();
    cfg.standardize = j.at("standardize").get<bool>();
    cfg.vote_scope = j.at("vote_scope").get<std::string>() == "all_layers"
                         ? VoteScope::AllLayers
                         : VoteScope::FinalLayer;
    const std::string ab = j.at("ablation").get<std::string>();
    cfg.ablation = ab == "full"    ? AblationMode::Full
                   : ab == "mifcm" ? AblationMode::MifcmOnly
                                   : AblationMode::None;
    return cfg;
}

json to_json(const PipelineModel& model) {
    json subsets = json::array();
    for (const auto& s : model.subsets) {
        json layers = json::array();
        for (const auto& l : s.layers) {
            json layer = {{"layer_index", l.layer_index},
                          {"input_dim", l.input_dim},
                          {"output_dim", l.output_dim},
                          {"tree", tree_to_json(l.tree)}};
            if (l.alignment) layer["alignment"] = alignment_to_json(*l.alignment);
            layers.push_back(std::move(layer));
        }
        subsets.push_back({{"subset_index", s.subset_index},
                           {"snc_reference", matrix_to_json(s.snc_reference)},
                           {"layers", std::move(layers)}});
    }
    return {{"version", kBundleVersion},
            {"config", config_to_json(model.config)},
            {"feature_dim", model.feature_dim},
            {"scaler_mean", vector_to_json(model.scaler.mean())},
            {"scaler_scale", vector_to_json(model.scaler.scale())},
            {"warnings", model.warnings},
            {"subsets", std::move(subsets)}};
}

PipelineModel pipeline_from_json(const json& j) {
    if (j.at("version").get<int>() != kBundleVersion) {
        throw std::runtime_error("unsupported pipeline bundle version");
    }
    PipelineModel model;
    model.config = config_from_json(j.at("config"));
    model.feature_dim = j.at("feature_dim").get<Index>();
    model.warnings = j.at("warnings").get<std::vector<std::string>>();

    model.scaler = Standardizer::from_stats(vector_from_json(j.at("scaler_mean")),
                                            vector_from_json(j.at("scaler_scale")));

    for (const auto& s : j.at("subsets")) {
        SubsetModel sm;
        sm.subset_index = s.at("subset_index").get<int>();
        sm.snc_reference = matrix_from_json(s.at("snc_reference"));
        for (const auto& l : s.at("layers")) {
            LayerModel layer;
            layer.layer_index = l.at("layer_index").get<int>();
            layer.input_dim = l.at("input_dim").get<Index>();
            layer.output_dim = l.at("output_dim").get<Index>();
            layer.tree = tree_from_json(l.at("tree"));
            if (l.contains("alignment")) layer.alignment = alignment_from_json(l.at("alignment"));
            sm.layers.push_back(std::move(layer));
        }
        model.subsets.push_back(std::move(sm));
    }
    return model;
}

void save_pipeline(const PipelineModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(model).dump(1);
}

PipelineModel load_pipeline(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return pipeline_from_json(j);
}

}  // namespace dsenlg
