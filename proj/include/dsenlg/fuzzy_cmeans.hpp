#pragma once

#include "dsenlg/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace dsenlg {

struct DsenConfig {
    int neighbor_count = kDefaultNeighbors;  // K
    int layer_count = kDefaultLayers;        // L
    /// Explicit per-layer cluster counts; empty means derive each layer's
    /// count as max(2, ceil(cluster_ratio * rows entering the layer)).
    std::vector<int> cluster_counts;
    double cluster_ratio = 0.85;
    double fuzzifier = 2.0;   // m > 1
    double epsilon = 1e-5;    // absolute objective-change threshold
    int max_iter = 200;
    /// Independent random starts; the run with the lowest final objective
    /// wins. Seeds derive from the call's seed, so the result stays a pure
    /// function of (inputs, seed).
    int restarts = 1;
};

void validate(const DsenConfig& cfg);

/// Per-layer cluster counts for an input of `n0` rows. Explicit schedules are
/// checked against the shrinking layer sizes; ratio schedules are clamped to
/// the available rows.
std::vector<int> resolve_cluster_schedule(const DsenConfig& cfg, Index n0);

struct FcmResult {
    Matrix memberships;  // c x n, columns sum to 1
    Matrix prototypes;   // c x f
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

/// Membership update for fixed prototypes. A sample coinciding with a
/// prototype gets membership 1 to the nearest such prototype and 0 elsewhere.
Matrix fcm_memberships(const Matrix& X, const Matrix& prototypes, double fuzzifier);

/// Prototype update for fixed memberships (weighted means with weights u^m).
Matrix fcm_prototypes(const Matrix& X, const Matrix& memberships, double fuzzifier);

double fcm_objective(const Matrix& X, const Matrix& memberships, const Matrix& prototypes,
                     double fuzzifier);

/// Alternating optimization of memberships and prototypes from a random
/// normalized membership start until the objective change drops below
/// cfg.epsilon (or cfg.max_iter).
FcmResult fcm(const Matrix& X, int c, const DsenConfig& cfg, std::uint64_t seed);

struct LayerState {
    int layer_index = 0;   // 1-based
    Matrix prototypes;     // c_l x f_l
    Matrix memberships;    // c_l x n_l
    std::vector<double> objective_trace;
    /// Prototypes after the alignment hook (equal to `prototypes` without a
    /// hook); this is what feeds the next layer.
    Matrix transformed;
};

/// Optional per-layer transform applied to the prototypes before they feed
/// the next layer; receives (layer, layer input, prototypes, memberships).
using AlignHook =
    std::function<Matrix(int, const Matrix&, const Matrix&, const Matrix&)>;

/// Multilayer FCM: layer l clusters the (possibly transformed) prototypes of
/// layer l-1. With an alignment hook this realizes the aligned deep-envelope
/// generator; without it, the plain multilayer-clustering baseline.
std::vector<LayerState> mifcm(const Matrix& X, const DsenConfig& cfg, std::uint64_t seed,
                              const AlignHook& hook = nullptr);

}  // namespace dsenlg
