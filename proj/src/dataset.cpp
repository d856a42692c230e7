#include "dsenlg/dataset.hpp"

#include "dsenlg/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dsenlg {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& cell, const std::string& where) {
    const std::string t = trim(cell);
    if (t.empty() || t == "?") {
        throw std::runtime_error("missing value in " + where);
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
        if (pos != t.size()) throw std::invalid_argument(t);
        if (!std::isfinite(v)) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("non-numeric feature value '" + t + "' in " + where);
    }
}

/// Assigns minority/majority from raw class strings. Ties go to the
/// lexicographically smaller label so the choice is deterministic.
Dataset finish_dataset(std::string name, std::vector<std::vector<double>> rows,
                       std::vector<std::string> raw_labels,
                       std::vector<std::string> feature_names,
                       const std::string* forced_minority) {
    const Index n = static_cast<Index>(rows.size());
    if (n < 2) throw std::runtime_error(name + ": need at least two samples");
    const Index s = static_cast<Index>(rows.front().size());

    std::map<std::string, Index> counts;
    for (const auto& l : raw_labels) ++counts[l];
    if (counts.size() != 2) {
        throw std::runtime_error(name + ": expected exactly two classes, found " +
                                 std::to_string(counts.size()));
    }
    auto it = counts.begin();
    const auto& [label_a, count_a] = *it;
    const auto& [label_b, count_b] = *std::next(it);

    std::string minority, majority;
    if (forced_minority) {
        minority = *forced_minority;
        majority = (label_a == minority) ? label_b : label_a;
        if (counts.find(minority) == counts.end()) {
            throw std::runtime_error(name + ": minority label '" + minority +
                                     "' not present in data");
        }
        if (counts[minority] > counts[majority]) {
            throw std::runtime_error(name + ": requested minority class '" + minority +
                                     "' is the more frequent one");
        }
    } else if (count_a < count_b || (count_a == count_b && label_a < label_b)) {
        minority = label_a;
        majority = label_b;
    } else {
        minority = label_b;
        majority = label_a;
    }

    Dataset ds;
    ds.name = std::move(name);
    ds.features.resize(n, s);
    ds.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != s) {
            throw std::runtime_error(ds.name + ": ragged row " + std::to_string(i + 1));
        }
        for (Index j = 0; j < s; ++j) {
            ds.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        ds.labels[static_cast<std::size_t>(i)] =
            (raw_labels[static_cast<std::size_t>(i)] == minority) ? Label::Minority
                                                                  : Label::Majority;
    }
    ds.feature_names = std::move(feature_names);
    ds.minority_name = minority;
    ds.majority_name = majority;
    validate(ds);
    return ds;
}

}  // namespace

Index Dataset::minority_count() const {
    return static_cast<Index>(std::count(labels.begin(), labels.end(), Label::Minority));
}

Index Dataset::majority_count() const {
    return static_cast<Index>(std::count(labels.begin(), labels.end(), Label::Majority));
}

void validate(const Dataset& ds) {
    if (ds.features.rows() < 2) throw std::invalid_argument("dataset needs n >= 2");
    if (ds.features.cols() < 1) throw std::invalid_argument("dataset needs s >= 1");
    if (static_cast<Index>(ds.labels.size()) != ds.features.rows()) {
        throw std::invalid_argument("label/feature row mismatch");
    }
    if (!ds.features.allFinite()) throw std::invalid_argument("non-finite feature values");
    const Index n2 = ds.minority_count();
    const Index n1 = ds.majority_count();
    if (n2 < 1 || n1 < 1) throw std::invalid_argument("dataset must contain both classes");
    if (n1 < n2) throw std::invalid_argument("minority class must be the rarer one");
}

Dataset load_keel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::string> attribute_names;
    std::string relation = path.stem().string();
    std::string output_attribute;
    bool in_data = false;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    Index class_col = -1;
    Index data_row = 0;

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (!in_data && t[0] == '@') {
            // Header lines. Some distributed files miss the space after
            // "@attribute", so match on the prefix alone.
            std::string lower = t;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (lower.rfind("@relation", 0) == 0) {
                const std::string rest = trim(t.substr(9));
                if (!rest.empty()) relation = rest;
            } else if (lower.rfind("@attribute", 0) == 0) {
                std::string rest = trim(t.substr(10));
                // Name runs until whitespace, '{' or '['.
                std::size_t e = 0;
                while (e < rest.size() && !std::isspace(static_cast<unsigned char>(rest[e])) &&
                       rest[e] != '{' && rest[e] != '[') {
                    ++e;
                }
                if (e == 0) throw std::runtime_error(path.string() + ": malformed @attribute line");
                attribute_names.push_back(rest.substr(0, e));
            } else if (lower.rfind("@outputs", 0) == 0 || lower.rfind("@output", 0) == 0) {
                output_attribute = trim(t.substr(t.find(' ') != std::string::npos
                                                     ? t.find(' ')
                                                     : t.size()));
            } else if (lower.rfind("@data", 0) == 0) {
                if (attribute_names.size() < 2) {
                    throw std::runtime_error(path.string() +
                                             ": malformed header (need @attribute lines before @data)");
                }
                class_col = static_cast<Index>(attribute_names.size()) - 1;
                if (!output_attribute.empty()) {
                    auto it = std::find(attribute_names.begin(), attribute_names.end(),
                                        output_attribute);
                    if (it != attribute_names.end()) {
                        class_col = std::distance(attribute_names.begin(), it);
                    }
                }
                in_data = true;
            }
            // @inputs and unknown directives are ignored.
            continue;
        }
        if (!in_data) {
            throw std::runtime_error(path.string() + ": data before @data directive");
        }
        ++data_row;
        const auto cells = split_csv_line(t);
        if (static_cast<Index>(cells.size()) != static_cast<Index>(attribute_names.size())) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(data_row) +
                                     " has " + std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(attribute_names.size()));
        }
        for (const auto& c : cells) {
            if (trim(c) == "?" || trim(c).empty()) {
                throw std::runtime_error(path.string() + ": missing value in data row " +
                                         std::to_string(data_row));
            }
        }
        std::vector<double> feats;
        feats.reserve(cells.size() - 1);
        for (Index j = 0; j < static_cast<Index>(cells.size()); ++j) {
            if (j == class_col) continue;
            feats.push_back(parse_real(cells[static_cast<std::size_t>(j)],
                                       path.string() + " data row " + std::to_string(data_row)));
        }
        rows.push_back(std::move(feats));
        raw_labels.push_back(trim(cells[static_cast<std::size_t>(class_col)]));
    }
    if (!in_data) throw std::runtime_error(path.string() + ": missing @data directive");
    if (rows.empty()) throw std::runtime_error(path.string() + ": empty data section");

    std::vector<std::string> feature_names;
    for (Index j = 0; j < static_cast<Index>(attribute_names.size()); ++j) {
        if (j != class_col) feature_names.push_back(attribute_names[static_cast<std::size_t>(j)]);
    }
    return finish_dataset(relation, std::move(rows), std::move(raw_labels),
                          std::move(feature_names), nullptr);
}

void save_keel(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "@relation " << ds.name << "\n";
    for (Index j = 0; j < ds.dim(); ++j) {
        const std::string name = (j < static_cast<Index>(ds.feature_names.size()))
                                     ? ds.feature_names[static_cast<std::size_t>(j)]
                                     : ("f" + std::to_string(j));
        out << "@attribute " << name << " real [" << ds.features.col(j).minCoeff() << ", "
            << ds.features.col(j).maxCoeff() << "]\n";
    }
    out << "@attribute Class {" << ds.minority_name << "," << ds.majority_name << "}\n";
    out << "@data\n";
    char buf[64];
    for (Index i = 0; i < ds.size(); ++i) {
        for (Index j = 0; j < ds.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
            out << buf << ", ";
        }
        out << (ds.labels[static_cast<std::size_t>(i)] == Label::Minority ? ds.minority_name
                                                                          : ds.majority_name)
            << "\n";
    }
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                 const std::string& minority_label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::vector<std::string>> table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        table.push_back(split_csv_line(line));
    }
    if (table.empty()) throw std::runtime_error(path.string() + ": empty file");

    Index label_col = -1;
    std::size_t first_data_row = 0;
    std::vector<std::string> header;
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        header = table.front();
        auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end()) {
            throw std::runtime_error(path.string() + ": unknown label column '" + *name + "'");
        }
        label_col = std::distance(header.begin(), it);
        first_data_row = 1;
    } else {
        label_col = std::get<int>(label_column);
        if (label_col < 0 || label_col >= static_cast<Index>(table.front().size())) {
            throw std::runtime_error(path.string() + ": label column index out of range");
        }
    }

    const Index width = static_cast<Index>(table.front().size());
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    for (std::size_t r = first_data_row; r < table.size(); ++r) {
        const auto& cells = table[r];
        if (static_cast<Index>(cells.size()) != width) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(r + 1) +
                                     " has inconsistent column count");
        }
        std::vector<double> feats;
        feats.reserve(static_cast<std::size_t>(width - 1));
        for (Index j = 0; j < width; ++j) {
            if (j == label_col) continue;
            feats.push_back(parse_real(cells[static_cast<std::size_t>(j)],
                                       path.string() + " row " + std::to_string(r + 1)));
        }
        rows.push_back(std::move(feats));
        raw_labels.push_back(trim(cells[static_cast<std::size_t>(label_col)]));
    }

    std::vector<std::string> feature_names;
    for (Index j = 0; j < width; ++j) {
        if (j == label_col) continue;
        if (!header.empty()) {
            feature_names.push_back(header[static_cast<std::size_t>(j)]);
        } else {
            feature_names.push_back("f" + std::to_string(j));
        }
    }
    return finish_dataset(path.stem().string(), std::move(rows), std::move(raw_labels),
                          std::move(feature_names), &minority_label);
}

double imbalance_ratio(const Dataset& ds) {
    return static_cast<double>(ds.majority_count()) / static_cast<double>(ds.minority_count());
}

std::vector<CVSplit> stratified_splits(const Dataset& ds, int folds, int repeats,
                                       std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    const Index n = ds.size();
    std::vector<Index> minority_idx, majority_idx;
    for (Index i = 0; i < n; ++i) {
        (ds.labels[static_cast<std::size_t>(i)] == Label::Minority ? minority_idx : majority_idx)
            .push_back(i);
    }
    if (static_cast<int>(minority_idx.size()) < folds ||
        static_cast<int>(majority_idx.size()) < folds) {
        throw std::invalid_argument("each class needs at least `folds` samples");
    }

    std::vector<CVSplit> out;
    out.reserve(static_cast<std::size_t>(folds) * static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        Rng rng(mix_seed(seed, hash64(ds.name), static_cast<std::uint64_t>(r)));
        std::vector<std::vector<Index>> fold_members(static_cast<std::size_t>(folds));
        for (auto* cls : {&minority_idx, &majority_idx}) {
            std::vector<Index> shuffled = *cls;
            rng.shuffle(shuffled);
            const Index base = static_cast<Index>(shuffled.size()) / folds;
            const Index rem = static_cast<Index>(shuffled.size()) % folds;
            Index pos = 0;
            for (int f = 0; f < folds; ++f) {
                const Index take = base + (f < rem ? 1 : 0);
                for (Index k = 0; k < take; ++k) {
                    fold_members[static_cast<std::size_t>(f)].push_back(shuffled[pos++]);
                }
            }
        }
        for (int f = 0; f < folds; ++f) {
            CVSplit split;
            split.repeat_index = r;
            split.fold_index = f;
            split.test_indices = fold_members[static_cast<std::size_t>(f)];
            std::sort(split.test_indices.begin(), split.test_indices.end());
            split.train_indices.reserve(static_cast<std::size_t>(n) -
                                        split.test_indices.size());
            std::size_t t = 0;
            for (Index i = 0; i < n; ++i) {
                if (t < split.test_indices.size() && split.test_indices[t] == i) {
                    ++t;
                } else {
                    split.train_indices.push_back(i);
                }
            }
            out.push_back(std::move(split));
        }
    }
    return out;
}

Dataset subset(const Dataset& ds, std::span<const Index> rows) {
    Dataset out;
    out.name = ds.name;
    out.feature_names = ds.feature_names;
    out.minority_name = ds.minority_name;
    out.majority_name = ds.majority_name;
    out.features = rows_of(ds.features, rows);
    out.labels.reserve(rows.size());
    for (Index i : rows) out.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
    return out;
}

Matrix rows_of(const Matrix& m, std::span<const Index> rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = m.row(rows[i]);
    }
    return out;
}

void Standardizer::fit(const Matrix& X) {
    const Index n = X.rows();
    mean_ = X.colwise().mean();
    Vector var = (X.rowwise() - mean_.transpose()).array().square().colwise().sum() /
                 static_cast<double>(n);
    scale_.resize(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const double sd = std::sqrt(var(j));
        scale_(j) = (sd > 1e-12) ? 1.0 / sd : 0.0;
    }
}

Standardizer Standardizer::from_stats(Vector mean, Vector scale) {
    Standardizer s;
    s.mean_ = std::move(mean);
    s.scale_ = std::move(scale);
    return s;
}

Matrix Standardizer::transform(const Matrix& X) const {
    Matrix out = X.rowwise() - mean_.transpose();
    out = out.array().rowwise() * scale_.transpose().array();
    return out;
}

}  // namespace dsenlg
