#pragma once

#include "dsenlg/dataset.hpp"
#include "dsenlg/ensemble.hpp"
#include "dsenlg/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dsenlg {

/// One dataset to benchmark. KEEL `.dat` files need only the path; CSV files
/// also need the label column and the minority label.
struct DatasetSpec {
    std::string path;
    std::optional<std::string> label_column;
    std::optional<int> label_index;
    std::optional<std::string> minority_label;
};

Dataset load_dataset(const DatasetSpec& spec);

struct ExperimentConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<std::string> methods = {"full", "mifcm", "none"};
    int folds = 5;
    int repeats = 10;
    std::uint64_t master_seed = 17;
    std::string output_dir = "runs";
    std::string control_method = "full";
    bool keep_votes = true;
    int jobs = 0;  // 0 = hardware concurrency
    PipelineConfig pipeline;
};

AblationMode method_mode(const std::string& tag);

/// Stable per-task seed: a function of (master seed, dataset, method, repeat,
/// fold) only, so adding datasets or methods never disturbs existing results.
std::uint64_t task_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& method, int repeat, int fold);

struct RunRecord {
    std::string dataset;
    std::string method;
    int repeat = 0;
    int fold = 0;
    std::uint64_t seed = 0;
    Confusion conf;
    MetricSet mets;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct RunReport {
    std::filesystem::path directory;
    std::vector<RunRecord> records;
    int failures = 0;
};

/// Executes every (dataset x method x repeat x fold) task over a bounded
/// worker pool and writes the report bundle: manifest.json, runs.csv, one
/// summary_<dataset>.csv per dataset, vote dumps and timings.json. All CSV
/// content is a pure function of the manifest.
RunReport run_experiment(const ExperimentConfig& config);

/// Mean metric value per (method, dataset) from a report bundle's runs.csv.
struct BundleTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    Matrix auc, f_measure, g_mean, mcc;  // methods x datasets
};

BundleTable read_bundle_table(const std::filesystem::path& bundle_dir);

/// Average ranks, the Friedman omnibus test and Holm step-down comparisons
/// against the control method, written as CSV next to the bundle.
void write_stats(const std::filesystem::path& bundle_dir, const std::string& control_method);

/// Per-pair diversity data (kappa plus pair-mean metrics) for one dataset and
/// method, from the stored per-classifier votes.
void write_kappa_report(const std::filesystem::path& bundle_dir, const std::string& dataset,
                        const std::string& method);

/// Mean pairwise kappa over every stored fold of (dataset, method).
double mean_pairwise_kappa(const std::filesystem::path& bundle_dir, const std::string& dataset,
                           const std::string& method);

nlohmann::json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

/// 16-hex-digit digest of the canonical manifest; names the bundle directory.
std::string config_hash(const ExperimentConfig& config);

/// Reads a `key = value` config file with `[section]` headers; returns the
/// config with the file's settings applied on top of `base`.
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const ExperimentConfig& base);

}  // namespace dsenlg
