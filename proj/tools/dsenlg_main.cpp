#include "dsenlg/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

using namespace dsenlg;

/// Gathers the flag surface shared by `run` and `validate-config`. The
/// precedence is: built-in defaults, then command-line flags, then the config
/// file (the file wins so a saved experiment reruns exactly).
struct RunFlags {
    std::vector<std::string> data;
    std::string config_file;
    std::string manifest_file;
    ExperimentConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", data, "KEEL .dat files or directories to scan");
        cmd->add_option("--config", config_file, "key = value config file");
        cmd->add_option("--manifest", manifest_file,
                        "manifest.json from a previous run (exact re-execution)");
        cmd->add_option("--out", cfg.output_dir, "output directory");
        cmd->add_option("--folds", cfg.folds, "cross-validation folds");
        cmd->add_option("--repeats", cfg.repeats, "cross-validation repeats");
        cmd->add_option("--seed", cfg.master_seed, "master seed");
        cmd->add_option("--methods", cfg.methods, "method tags: full, mifcm, none");
        cmd->add_option("--control", cfg.control_method, "control method for stats");
        cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)");
        cmd->add_flag("--keep-votes,!--no-keep-votes", cfg.keep_votes,
                      "store per-classifier votes for diversity reports");
        cmd->add_option("-K,--neighbors", cfg.pipeline.dsen.neighbor_count,
                        "envelope neighbour count");
        cmd->add_option("-L,--layers", cfg.pipeline.dsen.layer_count, "clustering layers");
        cmd->add_option("--cluster-ratio", cfg.pipeline.dsen.cluster_ratio,
                        "per-layer cluster count ratio");
        cmd->add_option("--lambda", cfg.pipeline.align.lambda, "global-term tradeoff");
        cmd->add_option("--lambda1", cfg.pipeline.align.lambda1, "nuclear-norm tradeoff");
        cmd->add_option("--delta", cfg.pipeline.align.delta, "ADMM penalty");
        cmd->add_option("--subspace-dim", cfg.pipeline.align.subspace_dim,
                        "aligned subspace dimension");
        cmd->add_option("--max-outer", cfg.pipeline.align.max_outer,
                        "alignment outer iterations");
        cmd->add_option("--tree-depth", cfg.pipeline.tree.max_depth, "decision tree depth cap");
    }

    ExperimentConfig resolve() {
        if (!manifest_file.empty()) {
            std::ifstream in(manifest_file);
            if (!in) throw std::runtime_error("cannot open manifest " + manifest_file);
            nlohmann::json j;
            in >> j;
            return experiment_from_json(j);
        }
        for (const auto& entry : data) {
            if (std::filesystem::is_directory(entry)) {
                std::vector<std::string> found;
                for (const auto& file : std::filesystem::directory_iterator(entry)) {
                    if (file.path().extension() == ".dat") found.push_back(file.path().string());
                }
                std::sort(found.begin(), found.end());
                for (auto& f : found) cfg.datasets.push_back({f, {}, {}, {}});
            } else {
                cfg.datasets.push_back({entry, {}, {}, {}});
            }
        }
        if (!config_file.empty()) cfg = parse_config_file(config_file, cfg);
        return cfg;
    }
};

int cmd_run(RunFlags& flags) {
    const ExperimentConfig cfg = flags.resolve();
    const RunReport report = run_experiment(cfg);
    std::printf("bundle: %s\n", report.directory.string().c_str());
    std::printf("runs: %zu, failures: %d\n", report.records.size(), report.failures);
    for (const auto& rec : report.records) {
        if (rec.failed) {
            std::fprintf(stderr, "FAILED %s/%s r%d f%d: %s\n", rec.dataset.c_str(),
                         rec.method.c_str(), rec.repeat, rec.fold, rec.error.c_str());
        }
    }
    return report.failures == 0 ? 0 : 1;
}

int cmd_stats(const std::string& bundle, const std::string& control) {
    write_stats(bundle, control);
    std::printf("wrote %s/ranks.csv, friedman.csv, holm.csv\n", bundle.c_str());
    return 0;
}

int cmd_kappa(const std::string& bundle, const std::string& dataset, const std::string& method) {
    write_kappa_report(bundle, dataset, method);
    std::printf("wrote kappa report for %s / %s\n", dataset.c_str(), method.c_str());
    return 0;
}

int cmd_list(const std::vector<std::string>& paths) {
    std::printf("%-32s %8s %8s %9s %9s %7s\n", "dataset", "features", "samples", "minority",
                "majority", "IR");
    for (const auto& entry : paths) {
        std::vector<std::string> files;
        if (std::filesystem::is_directory(entry)) {
            for (const auto& file : std::filesystem::directory_iterator(entry)) {
                if (file.path().extension() == ".dat") files.push_back(file.path().string());
            }
            std::sort(files.begin(), files.end());
        } else {
            files.push_back(entry);
        }
        for (const auto& f : files) {
            const Dataset ds = load_keel(f);
            std::printf("%-32s %8td %8td %9td %9td %7.2f\n", ds.name.c_str(), ds.dim(), ds.size(),
                        ds.minority_count(), ds.majority_count(), imbalance_ratio(ds));
        }
    }
    return 0;
}

int cmd_validate(RunFlags& flags) {
    const ExperimentConfig cfg = flags.resolve();
    validate(cfg.pipeline);
    if (cfg.datasets.empty()) throw std::runtime_error("no datasets configured");
    for (const auto& m : cfg.methods) method_mode(m);
    for (const auto& spec : cfg.datasets) {
        const Dataset ds = load_dataset(spec);
        std::printf("ok: %s (n=%td, s=%td, IR=%.2f)\n", ds.name.c_str(), ds.size(), ds.dim(),
                    imbalance_ratio(ds));
    }
    std::printf("config hash: %s\n", config_hash(cfg).c_str());
    std::printf("tasks: %zu datasets x %zu methods x %d folds x %d repeats\n",
                cfg.datasets.size(), cfg.methods.size(), cfg.folds, cfg.repeats);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deep-envelope imbalanced ensemble benchmark"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment and write a report bundle");
    run_flags.attach(run_cmd);

    std::string bundle, control = "full", dataset, method;
    auto* stats_cmd = app.add_subcommand("stats", "average ranks + Friedman/Holm tests");
    stats_cmd->add_option("--bundle", bundle, "report bundle directory")->required();
    stats_cmd->add_option("--control", control, "control method tag");

    auto* kappa_cmd = app.add_subcommand("kappa", "pairwise diversity data for one method");
    kappa_cmd->add_option("--bundle", bundle, "report bundle directory")->required();
    kappa_cmd->add_option("--dataset", dataset, "dataset name")->required();
    kappa_cmd->add_option("--method", method, "method tag")->required();

    std::vector<std::string> list_paths;
    auto* list_cmd = app.add_subcommand("list-datasets", "print dataset characteristics");
    list_cmd->add_option("paths", list_paths, "KEEL files or directories")->required();

    RunFlags validate_flags;
    auto* validate_cmd =
        app.add_subcommand("validate-config", "resolve and check a configuration");
    validate_flags.attach(validate_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_flags);
        if (stats_cmd->parsed()) return cmd_stats(bundle, control);
        if (kappa_cmd->parsed()) return cmd_kappa(bundle, dataset, method);
        if (list_cmd->parsed()) return cmd_list(list_paths);
        if (validate_cmd->parsed()) return cmd_validate(validate_flags);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
