#include "dsenlg/experiment.hpp"

#include "dsenlg/rng.hpp"
#include "dsenlg/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dsenlg {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return out;
}

struct VoteDump {
    std::string dataset;
    std::string method;
    int repeat = 0;
    int fold = 0;
    LabelVector truth;
    VoteTrace trace;
};

std::filesystem::path votes_path(const std::filesystem::path& dir, const std::string& dataset,
                                 const std::string& method, int repeat, int fold) {
    return dir / "votes" /
           (sanitize(dataset) + "__" + sanitize(method) + "__r" + std::to_string(repeat) + "_f" +
            std::to_string(fold) + ".csv");
}

void write_vote_dump(const std::filesystem::path& dir, const VoteDump& dump) {
    const auto path = votes_path(dir, dump.dataset, dump.method, dump.repeat, dump.fold);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "truth";
    for (Label l : dump.truth) out << "," << static_cast<int>(l);
    out << "\n";
    for (std::size_t c = 0; c < dump.trace.classifier_ids.size(); ++c) {
        out << dump.trace.classifier_ids[c];
        for (Label l : dump.trace.votes[c]) out << "," << static_cast<int>(l);
        out << "\n";
    }
}

struct VoteFile {
    LabelVector truth;
    std::vector<std::string> ids;
    std::vector<LabelVector> votes;
};

VoteFile read_vote_dump(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    VoteFile file;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        LabelVector row;
        while (std::getline(ss, cell, ',')) {
            row.push_back(cell == "0" ? Label::Minority : Label::Majority);
        }
        if (cell.empty() && row.empty()) continue;
        if (file.truth.empty() && file.ids.empty()) {
            file.truth = std::move(row);
        } else {
            std::stringstream head(line);
            std::string id;
            std::getline(head, id, ',');
            file.ids.push_back(id);
            file.votes.push_back(std::move(row));
        }
    }
    return file;
}

const char* kRunsHeader =
    "dataset,method,repeat,fold,seed,tp,fp,tn,fn,auc,f_measure,g_mean,mcc,sen,spe,pre,rec,"
    "failed,error\n";

}  // namespace

Dataset load_dataset(const DatasetSpec& spec) {
    const std::filesystem::path path(spec.path);
    if (path.extension() == ".dat") return load_keel(path);
    if (path.extension() == ".csv") {
        if (!spec.minority_label) {
            throw std::runtime_error(spec.path + ": CSV datasets need minority_label");
        }
        ColumnRef column = spec.label_column ? ColumnRef(*spec.label_column)
                                             : ColumnRef(spec.label_index.value_or(-1));
        if (!spec.label_column && !spec.label_index) {
            throw std::runtime_error(spec.path + ": CSV datasets need a label column");
        }
        return load_csv(path, column, *spec.minority_label);
    }
    throw std::runtime_error(spec.path + ": unsupported dataset format");
}

AblationMode method_mode(const std::string& tag) {
    if (tag == "full") return AblationMode::Full;
    if (tag == "mifcm") return AblationMode::MifcmOnly;
    if (tag == "none") return AblationMode::None;
    throw std::invalid_argument("unknown method tag '" + tag + "' (expected full|mifcm|none)");
}

std::uint64_t task_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& method, int repeat, int fold) {
    return mix_seed(master, hash64(dataset), hash64(method), static_cast<std::uint64_t>(repeat),
                    static_cast<std::uint64_t>(fold));
}

RunReport run_experiment(const ExperimentConfig& config) {
    if (config.datasets.empty()) throw std::invalid_argument("run: no datasets configured");
    if (config.methods.empty()) throw std::invalid_argument("run: no methods configured");
    for (const auto& m : config.methods) method_mode(m);

    // Fail fast: every dataset must load before any work starts.
    std::vector<Dataset> datasets;
    datasets.reserve(config.datasets.size());
    for (const auto& spec : config.datasets) datasets.push_back(load_dataset(spec));

    struct Task {
        std::size_t dataset = 0;
        std::size_t method = 0;
        std::size_t split = 0;
    };
    std::vector<std::vector<CVSplit>> splits;
    splits.reserve(datasets.size());
    for (const auto& ds : datasets) {
        splits.push_back(
            stratified_splits(ds, config.folds, config.repeats, mix_seed(config.master_seed, 0x5eedULL)));
    }

    std::vector<Task> tasks;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            for (std::size_t s = 0; s < splits[d].size(); ++s) {
                tasks.push_back({d, m, s});
            }
        }
    }

    RunReport report;
    report.records.resize(tasks.size());
    std::vector<VoteDump> dumps(config.keep_votes ? tasks.size() : 0);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            const Task& task = tasks[t];
            const Dataset& ds = datasets[task.dataset];
            const CVSplit& split = splits[task.dataset][task.split];
            const std::string& method = config.methods[task.method];

            RunRecord rec;
            rec.dataset = ds.name;
            rec.method = method;
            rec.repeat = split.repeat_index;
            rec.fold = split.fold_index;
            rec.seed = task_seed(config.master_seed, ds.name, method, split.repeat_index,
                                 split.fold_index);
            const auto started = std::chrono::steady_clock::now();
            try {
                PipelineConfig pipeline = config.pipeline;
                pipeline.ablation = method_mode(method);
                const Dataset train = subset(ds, split.train_indices);
                const Matrix test_x = rows_of(ds.features, split.test_indices);
                LabelVector test_y;
                test_y.reserve(split.test_indices.size());
                for (Index i : split.test_indices) {
                    test_y.push_back(ds.labels[static_cast<std::size_t>(i)]);
                }
                const PipelineModel model = fit(train, pipeline, rec.seed);
                VoteTrace trace;
                const Prediction pred =
                    predict(model, test_x, config.keep_votes ? &trace : nullptr);
                rec.conf = confusion(test_y, pred.labels);
                rec.mets = metrics(rec.conf);
                if (config.keep_votes) {
                    dumps[t] = VoteDump{ds.name, method, split.repeat_index, split.fold_index,
                                        std::move(test_y), std::move(trace)};
                }
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
            }
            rec.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            report.records[t] = std::move(rec);
        }
    };

    unsigned pool = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                    : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, static_cast<unsigned>(tasks.size()));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (unsigned i = 0; i < pool; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }

    // Everything below is a single-threaded, deterministic serialization of
    // the collected results.
    report.directory = std::filesystem::path(config.output_dir) / config_hash(config);
    std::filesystem::create_directories(report.directory);
    if (config.keep_votes) std::filesystem::create_directories(report.directory / "votes");

    {
        std::ofstream manifest(report.directory / "manifest.json");
        json j = experiment_to_json(config);
        j["datasets_resolved"] = json::array();
        for (const auto& ds : datasets) {
            j["datasets_resolved"].push_back({{"name", ds.name},
                                              {"samples", ds.size()},
                                              {"features", ds.dim()},
                                              {"minority", ds.minority_count()},
                                              {"majority", ds.majority_count()}});
        }
        manifest << j.dump(1) << "\n";
    }
    {
        std::ofstream runs(report.directory / "runs.csv");
        runs << kRunsHeader;
        for (const auto& rec : report.records) {
            runs << rec.dataset << ',' << rec.method << ',' << rec.repeat << ',' << rec.fold << ','
                 << rec.seed << ',' << rec.conf.tp << ',' << rec.conf.fp << ',' << rec.conf.tn
                 << ',' << rec.conf.fn << ',' << format_double(rec.mets.auc) << ','
                 << format_double(rec.mets.f_measure) << ',' << format_double(rec.mets.g_mean)
                 << ',' << format_double(rec.mets.mcc) << ',' << format_double(rec.mets.sen) << ','
                 << format_double(rec.mets.spe) << ',' << format_double(rec.mets.pre) << ','
                 << format_double(rec.mets.rec) << ',' << (rec.failed ? 1 : 0) << ','
                 << rec.error << "\n";
            report.failures += rec.failed;
        }
    }
    {
        std::ofstream timings(report.directory / "timings.json");
        json j = json::array();
        for (const auto& rec : report.records) {
            j.push_back({{"dataset", rec.dataset},
                         {"method", rec.method},
                         {"repeat", rec.repeat},
                         {"fold", rec.fold},
                         {"seconds", rec.seconds}});
        }
        timings << j.dump(1) << "\n";
    }
    for (const auto& ds : datasets) {
        std::ofstream summary(report.directory / ("summary_" + sanitize(ds.name) + ".csv"));
        summary << "method,auc,f_measure,g_mean,mcc,runs,failures\n";
        for (const auto& method : config.methods) {
            double auc = 0, f = 0, g = 0, mcc = 0;
            long ok = 0, bad = 0;
            for (const auto& rec : report.records) {
                if (rec.dataset != ds.name || rec.method != method) continue;
                if (rec.failed) {
                    ++bad;
                    continue;
                }
                auc += rec.mets.auc;
                f += rec.mets.f_measure;
                g += rec.mets.g_mean;
                mcc += rec.mets.mcc;
                ++ok;
            }
            const double denom = ok > 0 ? static_cast<double>(ok) : 1.0;
            summary << method << ',' << format_double(auc / denom) << ','
                    << format_double(f / denom) << ',' << format_double(g / denom) << ','
                    << format_double(mcc / denom) << ',' << ok << ',' << bad << "\n";
        }
    }
    if (config.keep_votes) {
        for (const auto& dump : dumps) {
            if (!dump.truth.empty()) write_vote_dump(report.directory, dump);
        }
    }
    return report;
}

BundleTable read_bundle_table(const std::filesystem::path& bundle_dir) {
    std::ifstream in(bundle_dir / "runs.csv");
    if (!in) throw std::runtime_error("cannot open " + (bundle_dir / "runs.csv").string());
    std::string line;
    std::getline(in, line);  // header

    struct Cell {
        double auc = 0, f = 0, g = 0, mcc = 0;
        long count = 0;
    };
    std::map<std::pair<std::string, std::string>, Cell> cells;
    std::vector<std::string> methods, datasets;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() < 18) continue;
        if (f[17] == "1") continue;  // failed run
        const std::string& ds = f[0];
        const std::string& method = f[1];
        if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
            methods.push_back(method);
        }
        if (std::find(datasets.begin(), datasets.end(), ds) == datasets.end()) {
            datasets.push_back(ds);
        }
        Cell& c = cells[{method, ds}];
        c.auc += std::stod(f[9]);
        c.f += std::stod(f[10]);
        c.g += std::stod(f[11]);
        c.mcc += std::stod(f[12]);
        ++c.count;
    }

    BundleTable table;
    table.methods = methods;
    table.datasets = datasets;
    const Index k = static_cast<Index>(methods.size());
    const Index n = static_cast<Index>(datasets.size());
    table.auc.resize(k, n);
    table.f_measure.resize(k, n);
    table.g_mean.resize(k, n);
    table.mcc.resize(k, n);
    for (Index m = 0; m < k; ++m) {
        for (Index d = 0; d < n; ++d) {
            const auto it = cells.find({methods[static_cast<std::size_t>(m)],
                                        datasets[static_cast<std::size_t>(d)]});
            if (it == cells.end() || it->second.count == 0) {
                throw std::runtime_error("bundle is missing runs for " +
                                         methods[static_cast<std::size_t>(m)] + " on " +
                                         datasets[static_cast<std::size_t>(d)]);
            }
            const auto cnt = static_cast<double>(it->second.count);
            table.auc(m, d) = it->second.auc / cnt;
            table.f_measure(m, d) = it->second.f / cnt;
            table.g_mean(m, d) = it->second.g / cnt;
            table.mcc(m, d) = it->second.mcc / cnt;
        }
    }
    return table;
}

void write_stats(const std::filesystem::path& bundle_dir, const std::string& control_method) {
    const BundleTable table = read_bundle_table(bundle_dir);
    const int k = static_cast<int>(table.methods.size());
    const int n = static_cast<int>(table.datasets.size());
    if (k < 2 || n < 2) {
        throw std::runtime_error("stats: need at least two methods and two datasets");
    }
    const auto control =
        std::find(table.methods.begin(), table.methods.end(), control_method);
    if (control == table.methods.end()) {
        throw std::runtime_error("stats: control method '" + control_method +
                                 "' not in the bundle");
    }
    const auto control_idx =
        static_cast<std::size_t>(std::distance(table.methods.begin(), control));

    const std::vector<std::pair<std::string, const Matrix*>> metrics_list = {
        {"auc", &table.auc},
        {"f_measure", &table.f_measure},
        {"g_mean", &table.g_mean},
        {"mcc", &table.mcc}};

    std::ofstream ranks_csv(bundle_dir / "ranks.csv");
    ranks_csv << "method";
    for (const auto& [name, _] : metrics_list) ranks_csv << ',' << name;
    ranks_csv << "\n";
    std::map<std::string, std::vector<double>> all_ranks;
    for (const auto& [name, scores] : metrics_list) {
        all_ranks[name] = average_ranks(*scores, /*higher_is_better=*/true);
    }
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        ranks_csv << table.methods[m];
        for (const auto& [name, _] : metrics_list) {
            ranks_csv << ',' << format_double(all_ranks[name][m]);
        }
        ranks_csv << "\n";
    }

    std::ofstream friedman_csv(bundle_dir / "friedman.csv");
    friedman_csv << "metric,statistic,df,p_value\n";
    std::ofstream holm_csv(bundle_dir / "holm.csv");
    holm_csv << "metric,method,avg_rank,z,p_value,holm_threshold,reject\n";

    for (const auto& [name, _] : metrics_list) {
        const auto& ranks = all_ranks[name];
        const FriedmanResult fr = friedman_test(ranks, k, n);
        friedman_csv << name << ',' << format_double(fr.statistic) << ',' << fr.degrees_of_freedom
                     << ',' << format_double(fr.p_value) << "\n";

        // Demsar-style post hoc: z-scores of rank differences against the
        // control, then the Holm step-down at alpha = 0.05.
        const double se = std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * n));
        std::vector<double> p_values;
        std::vector<std::size_t> rows;
        std::vector<double> zs;
        for (std::size_t m = 0; m < table.methods.size(); ++m) {
            if (m == control_idx) continue;
            const double z = (ranks[m] - ranks[control_idx]) / se;
            p_values.push_back(std::min(1.0, 2.0 * normal_upper_tail(std::abs(z))));
            zs.push_back(z);
            rows.push_back(m);
        }
        const auto outcomes = holm_test(p_values, 0.05);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            holm_csv << name << ',' << table.methods[rows[i]] << ','
                     << format_double(ranks[rows[i]]) << ',' << format_double(zs[i]) << ','
                     << format_double(p_values[i]) << ',' << format_double(outcomes[i].threshold)
                     << ',' << (outcomes[i].reject ? 1 : 0) << "\n";
        }
    }
}

namespace {

std::vector<std::filesystem::path> vote_files_for(const std::filesystem::path& bundle_dir,
                                                  const std::string& dataset,
                                                  const std::string& method) {
    const std::string prefix = sanitize(dataset) + "__" + sanitize(method) + "__";
    std::vector<std::filesystem::path> files;
    const auto dir = bundle_dir / "votes";
    if (!std::filesystem::exists(dir)) {
        throw std::runtime_error("bundle holds no per-classifier votes");
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) == 0) files.push_back(entry.path());
    }
    if (files.empty()) {
        throw std::runtime_error("no stored votes for " + dataset + " / " + method);
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct PairAccumulator {
    double kappa = 0, auc = 0, f = 0, g = 0, mcc = 0;
    long count = 0;
};

std::map<std::pair<std::string, std::string>, PairAccumulator> accumulate_pairs(
    const std::filesystem::path& bundle_dir, const std::string& dataset,
    const std::string& method) {
    std::map<std::pair<std::string, std::string>, PairAccumulator> pairs;
    for (const auto& path : vote_files_for(bundle_dir, dataset, method)) {
        const VoteFile file = read_vote_dump(path);
        std::vector<MetricSet> member(file.ids.size());
        for (std::size_t i = 0; i < file.ids.size(); ++i) {
            member[i] = metrics(confusion(file.truth, file.votes[i]));
        }
        for (std::size_t i = 0; i < file.ids.size(); ++i) {
            for (std::size_t j = i + 1; j < file.ids.size(); ++j) {
                PairAccumulator& acc = pairs[{file.ids[i], file.ids[j]}];
                acc.kappa += cohen_kappa(file.votes[i], file.votes[j]);
                acc.auc += 0.5 * (member[i].auc + member[j].auc);
                acc.f += 0.5 * (member[i].f_measure + member[j].f_measure);
                acc.g += 0.5 * (member[i].g_mean + member[j].g_mean);
                acc.mcc += 0.5 * (member[i].mcc + member[j].mcc);
                ++acc.count;
            }
        }
    }
    return pairs;
}

}  // namespace

void write_kappa_report(const std::filesystem::path& bundle_dir, const std::string& dataset,
                        const std::string& method) {
    const auto pairs = accumulate_pairs(bundle_dir, dataset, method);
    std::ofstream out(bundle_dir /
                      ("kappa_" + sanitize(dataset) + "_" + sanitize(method) + ".csv"));
    out << "classifier_a,classifier_b,kappa,auc,f_measure,g_mean,mcc,folds\n";
    for (const auto& [key, acc] : pairs) {
        const auto cnt = static_cast<double>(acc.count);
        out << key.first << ',' << key.second << ',' << format_double(acc.kappa / cnt) << ','
            << format_double(acc.auc / cnt) << ',' << format_double(acc.f / cnt) << ','
            << format_double(acc.g / cnt) << ',' << format_double(acc.mcc / cnt) << ','
            << acc.count << "\n";
    }
}

double mean_pairwise_kappa(const std::filesystem::path& bundle_dir, const std::string& dataset,
                           const std::string& method) {
    const auto pairs = accumulate_pairs(bundle_dir, dataset, method);
    double total = 0;
    long count = 0;
    for (const auto& [key, acc] : pairs) {
        total += acc.kappa;
        count += acc.count;
    }
    if (count == 0) throw std::runtime_error("no classifier pairs recorded");
    return total / static_cast<double>(count);
}

json experiment_to_json(const ExperimentConfig& config) {
    json datasets = json::array();
    for (const auto& spec : config.datasets) {
        json d = {{"path", spec.path}};
        if (spec.label_column) d["label_column"] = *spec.label_column;
        if (spec.label_index) d["label_index"] = *spec.label_index;
        if (spec.minority_label) d["minority_label"] = *spec.minority_label;
        datasets.push_back(std::move(d));
    }
    return {{"datasets", std::move(datasets)},
            {"methods", config.methods},
            {"folds", config.folds},
            {"repeats", config.repeats},
            {"master_seed", config.master_seed},
            {"output_dir", config.output_dir},
            {"control_method", config.control_method},
            {"keep_votes", config.keep_votes},
            {"pipeline", config_to_json(config.pipeline)}};
}

ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig config;
    config.datasets.clear();
    for (const auto& d : j.at("datasets")) {
        DatasetSpec spec;
        spec.path = d.at("path").get<std::string>();
        if (d.contains("label_column")) spec.label_column = d["label_column"].get<std::string>();
        if (d.contains("label_index")) spec.label_index = d["label_index"].get<int>();
        if (d.contains("minority_label")) {
            spec.minority_label = d["minority_label"].get<std::string>();
        }
        config.datasets.push_back(std::move(spec));
    }
    config.methods = j.at("methods").get<std::vector<std::string>>();
    config.folds = j.at("folds").get<int>();
    config.repeats = j.at("repeats").get<int>();
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    config.output_dir = j.at("output_dir").get<std::string>();
    config.control_method = j.at("control_method").get<std::string>();
    config.keep_votes = j.at("keep_votes").get<bool>();
    config.pipeline = config_from_json(j.at("pipeline"));
    return config;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = experiment_to_json(config).dump();
    const std::uint64_t h = hash64(canonical);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::runtime_error("config: expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t;
        for (char c : item) {
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        }
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value) {
    auto& pl = cfg.pipeline;
    if (section.empty() || section == "experiment") {
        if (key == "folds") cfg.folds = std::stoi(value);
        else if (key == "repeats") cfg.repeats = std::stoi(value);
        else if (key == "seed") cfg.master_seed = std::stoull(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "methods") cfg.methods = split_list(value);
        else if (key == "control") cfg.control_method = value;
        else if (key == "keep_votes") cfg.keep_votes = parse_bool(value);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else if (key == "datasets") {
            cfg.datasets.clear();
            for (const auto& p : split_list(value)) cfg.datasets.push_back({p, {}, {}, {}});
        } else throw std::runtime_error("config: unknown key '" + key + "' in [experiment]");
    } else if (section == "dsen") {
        if (key == "neighbors") pl.dsen.neighbor_count = std::stoi(value);
        else if (key == "layers") pl.dsen.layer_count = std::stoi(value);
        else if (key == "cluster_ratio") pl.dsen.cluster_ratio = std::stod(value);
        else if (key == "cluster_counts") {
            pl.dsen.cluster_counts.clear();
            for (const auto& c : split_list(value)) pl.dsen.cluster_counts.push_back(std::stoi(c));
        } else if (key == "fuzzifier") pl.dsen.fuzzifier = std::stod(value);
        else if (key == "epsilon") pl.dsen.epsilon = std::stod(value);
        else if (key == "max_iter") pl.dsen.max_iter = std::stoi(value);
        else throw std::runtime_error("config: unknown key '" + key + "' in [dsen]");
    } else if (section == "align") {
        if (key == "lambda") pl.align.lambda = std::stod(value);
        else if (key == "lambda1") pl.align.lambda1 = std::stod(value);
        else if (key == "delta") pl.align.delta = std::stod(value);
        else if (key == "subspace_dim") pl.align.subspace_dim = std::stoi(value);
        else if (key == "max_outer") pl.align.max_outer = std::stoi(value);
        else if (key == "tol") pl.align.tol = std::stod(value);
        else if (key == "variance_floor") pl.align.variance_floor = std::stod(value);
        else if (key == "ridge") pl.align.ridge = std::stod(value);
        else if (key == "sigma_scale") pl.align.sigma_scale = std::stod(value);
        else if (key == "transition_init") {
            pl.align.transition_init =
                value == "zeros" ? TransitionInit::Zeros : TransitionInit::Memberships;
        } else throw std::runtime_error("config: unknown key '" + key + "' in [align]");
    } else if (section == "tree") {
        if (key == "max_depth") pl.tree.max_depth = std::stoi(value);
        else if (key == "min_samples_split") pl.tree.min_samples_split = std::stoi(value);
        else if (key == "min_gain_ratio") pl.tree.min_gain_ratio = std::stod(value);
        else throw std::runtime_error("config: unknown key '" + key + "' in [tree]");
    } else if (section == "partition") {
        if (key == "append_remainder") pl.partition.append_remainder = parse_bool(value);
        else throw std::runtime_error("config: unknown key '" + key + "' in [partition]");
    } else if (section == "vote") {
        if (key == "scope") {
            pl.vote_scope = value == "final_layer" ? VoteScope::FinalLayer : VoteScope::AllLayers;
        } else throw std::runtime_error("config: unknown key '" + key + "' in [vote]");
    } else {
        throw std::runtime_error("config: unknown section [" + section + "]");
    }
}

}  // namespace

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    ExperimentConfig cfg = base;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t;
        for (char c : line) {
            if (c == '#' || c == ';') break;
            t += c;
        }
        // trim
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(0, 1);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        }
        std::string key = t.substr(0, eq);
        std::string value = t.substr(eq + 1);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.front()))) {
            value.erase(0, 1);
        }
        try {
            apply_setting(cfg, section, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return cfg;
}

}  // namespace dsenlg
