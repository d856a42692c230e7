#include "dsenlg/fuzzy_cmeans.hpp"

#include "dsenlg/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsenlg {

namespace {

constexpr double kZeroDistance = 1e-30;  // squared-distance coincidence cutoff

/// Squared Euclidean distances, c x n.
Matrix squared_distances(const Matrix& X, const Matrix& V) {
    Matrix d2 = -2.0 * V * X.transpose();
    d2.colwise() += V.rowwise().squaredNorm();
    d2.rowwise() += X.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

}  // namespace

void validate(const DsenConfig& cfg) {
    if (cfg.neighbor_count < 0) throw std::invalid_argument("neighbor_count must be >= 0");
    if (cfg.layer_count < 1) throw std::invalid_argument("layer_count must be >= 1");
    if (cfg.fuzzifier <= 1.0) throw std::invalid_argument("fuzzifier must exceed 1");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (cfg.cluster_counts.empty() &&
        (cfg.cluster_ratio <= 0.0 || cfg.cluster_ratio >= 1.0)) {
        throw std::invalid_argument("cluster_ratio must lie in (0, 1)");
    }
}

std::vector<int> resolve_cluster_schedule(const DsenConfig& cfg, Index n0) {
    validate(cfg);
    std::vector<int> schedule;
    Index rows = n0;
    if (!cfg.cluster_counts.empty()) {
        if (static_cast<int>(cfg.cluster_counts.size()) != cfg.layer_count) {
            throw std::invalid_argument("cluster schedule length must equal layer_count");
        }
        for (int c : cfg.cluster_counts) {
            if (c < 2) throw std::invalid_argument("cluster counts must be >= 2");
            if (static_cast<Index>(c) > rows) {
                throw std::invalid_argument("cluster schedule exceeds available rows");
            }
            schedule.push_back(c);
            rows = c;
        }
        return schedule;
    }
    for (int l = 0; l < cfg.layer_count; ++l) {
        Index c = static_cast<Index>(
            std::ceil(cfg.cluster_ratio * static_cast<double>(rows)));
        c = std::max<Index>(2, c);
        c = std::min(c, rows);
        if (c < 1) throw std::invalid_argument("no rows left to cluster");
        schedule.push_back(static_cast<int>(c));
        rows = c;
    }
    return schedule;
}

Matrix fcm_memberships(const Matrix& X, const Matrix& prototypes, double fuzzifier) {
    const Index c = prototypes.rows();
    const Index n = X.rows();
    const Matrix d2 = squared_distances(X, prototypes);
    const double expo = 1.0 / (fuzzifier - 1.0);
    Matrix U(c, n);
    for (Index p = 0; p < n; ++p) {
        // Coincidence with a prototype pins the membership column.
        Index zero_at = -1;
        for (Index i = 0; i < c; ++i) {
            if (d2(i, p) < kZeroDistance) {
                zero_at = i;
                break;
            }
        }
        if (zero_at >= 0) {
            U.col(p).setZero();
            U(zero_at, p) = 1.0;
            continue;
        }
        // u_ip = d_ip^{-2/(m-1)} / sum_j d_jp^{-2/(m-1)}
        Vector w(c);
        for (Index i = 0; i < c; ++i) w(i) = std::pow(d2(i, p), -expo);
        U.col(p) = w / w.sum();
    }
    return U;
}

Matrix fcm_prototypes(const Matrix& X, const Matrix& memberships, double fuzzifier) {
    const Matrix Um = memberships.array().pow(fuzzifier);
    const Vector mass = Um.rowwise().sum();
    Matrix V = Um * X;
    for (Index i = 0; i < V.rows(); ++i) {
        if (mass(i) > 0.0) {
            V.row(i) /= mass(i);
        } else {
            // An entirely unclaimed prototype collapses to the data mean.
            V.row(i) = X.colwise().mean();
        }
    }
    return V;
}

double fcm_objective(const Matrix& X, const Matrix& memberships, const Matrix& prototypes,
                     double fuzzifier) {
    const Matrix d2 = squared_distances(X, prototypes);
    return (memberships.array().pow(fuzzifier) * d2.array()).sum();
}

namespace {

FcmResult fcm_single(const Matrix& X, int c, const DsenConfig& cfg, std::uint64_t seed) {
    const Index n = X.rows();
    Rng rng(mix_seed(seed, 0x66636dULL));
    Matrix U(c, n);
    for (Index p = 0; p < n; ++p) {
        double sum = 0.0;
        for (Index i = 0; i < c; ++i) {
            U(i, p) = rng.uniform_positive();
            sum += U(i, p);
        }
        U.col(p) /= sum;
    }

    FcmResult result;
    double previous = std::numeric_limits<double>::infinity();
    Matrix V;
    for (int w = 0; w < cfg.max_iter; ++w) {
        V = fcm_prototypes(X, U, cfg.fuzzifier);
        U = fcm_memberships(X, V, cfg.fuzzifier);
        const double j = fcm_objective(X, U, V, cfg.fuzzifier);
        result.objective_trace.push_back(j);
        result.iterations = w + 1;
        if (std::abs(previous - j) < cfg.epsilon) {
            result.converged = true;
            break;
        }
        previous = j;
    }
    result.memberships = std::move(U);
    result.prototypes = std::move(V);
    return result;
}

}  // namespace

FcmResult fcm(const Matrix& X, int c, const DsenConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    if (c < 1 || static_cast<Index>(c) > X.rows()) {
        throw std::invalid_argument("fcm: cluster count must lie in [1, n]");
    }
    if (!X.allFinite()) throw std::invalid_argument("fcm: non-finite input");
    const int restarts = std::max(1, cfg.restarts);
    FcmResult best;
    for (int r = 0; r < restarts; ++r) {
        FcmResult candidate =
            fcm_single(X, c, cfg, mix_seed(seed, static_cast<std::uint64_t>(r)));
        if (r == 0 ||
            candidate.objective_trace.back() < best.objective_trace.back()) {
            best = std::move(candidate);
        }
    }
    return best;
}

std::vector<LayerState> mifcm(const Matrix& X, const DsenConfig& cfg, std::uint64_t seed,
                              const AlignHook& hook) {
    const auto schedule = resolve_cluster_schedule(cfg, X.rows());
    std::vector<LayerState> layers;
    layers.reserve(schedule.size());
    Matrix input = X;
    for (int l = 0; l < cfg.layer_count; ++l) {
        const int c = schedule[static_cast<std::size_t>(l)];
        FcmResult r = fcm(input, c, cfg, mix_seed(seed, static_cast<std::uint64_t>(l) + 1));
        LayerState state;
        state.layer_index = l + 1;
        state.prototypes = std::move(r.prototypes);
        state.memberships = std::move(r.memberships);
        state.objective_trace = std::move(r.objective_trace);
        state.transformed =
            hook ? hook(l + 1, input, state.prototypes, state.memberships) : state.prototypes;
        input = state.transformed;
        layers.push_back(std::move(state));
    }
    return layers;
}

}  // namespace dsenlg
