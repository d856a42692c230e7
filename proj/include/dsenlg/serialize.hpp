#pragma once

#include "dsenlg/ensemble.hpp"

#include <json.hpp>

#include <filesystem>

namespace dsenlg {

/// Versioned JSON bundle for a trained pipeline: scaler, per-subset envelope
/// references, alignment projections (theta, reference set, sigma, d) and
/// trees. A reloaded model predicts identically.
nlohmann::json to_json(const PipelineModel& model);
PipelineModel pipeline_from_json(const nlohmann::json& j);

void save_pipeline(const PipelineModel& model, const std::filesystem::path& path);
PipelineModel load_pipeline(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& j);

}  // namespace dsenlg
