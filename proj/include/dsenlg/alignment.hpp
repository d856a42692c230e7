#pragma once

#include "dsenlg/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dsenlg {

/// Gaussian kernel matrix between the rows of A and B:
/// entry (i,j) = exp(-||a_i - b_j||^2 / (2 sigma^2)).
Matrix gaussian_gram(const Matrix& A, const Matrix& B, double sigma);

/// Median of pairwise Euclidean distances (the median heuristic for the
/// kernel bandwidth). Falls back to the smallest positive distance, then 1.
double median_pairwise_distance(const Matrix& X);

/// Kernel reference structure over X_r = [V_e; X_e] stacked by rows.
struct KernelModel {
    Matrix reference;   // X_r, r x f
    double sigma = 1.0;
    Matrix gram;        // r x r
    Matrix gram_v;      // r x c (columns = prototypes)
    Matrix gram_e;      // r x n (columns = samples)
    Index prototype_count = 0;  // c
    Index sample_count = 0;     // n
};

/// Builds the kernel model; sigma defaults to the median heuristic on X_r.
KernelModel build_kernel_model(const Matrix& X_e, const Matrix& V_e,
                               std::optional<double> sigma = std::nullopt);

/// Symmetric k-nearest-neighbour affinity graph (S_he = 1 iff either sample
/// lies in the other's k-neighbourhood) plus the degree vector of row sums.
struct GraphPair {
    Matrix affinity;  // n x n, entries in {0,1}, symmetric, zero diagonal
    Vector degree;    // row sums of affinity
};

GraphPair build_affinity(const Matrix& X, int k);

enum class TransitionInit { Zeros, Memberships };

struct AlignParams {
    double lambda = 1.0;    // global-term tradeoff
    double lambda1 = 0.1;   // nuclear-norm tradeoff
    double delta = 1.0;     // ADMM penalty
    int subspace_dim = 30;  // d, clamped to the usable kernel rank
    int graph_neighbors = kDefaultNeighbors;
    int max_outer = 50;
    double tol = 1e-4;
    /// Eigenvalues of the kernel Gram below spectrum_floor * mean(diag) are
    /// discarded before the projection step.
    double spectrum_floor = 1e-6;
    /// Multiplier on the median-heuristic kernel bandwidth.
    double sigma_scale = 2.0;
    /// Ridge on the kernel expansion coefficients of the projection,
    /// mu * Tr(Theta^T Theta), added to the projection step. It penalizes
    /// directions supported on tiny kernel eigenvalues, whose out-of-sample
    /// coordinates are numerically unstable. 0 disables it.
    double ridge = 0.03;
    /// Projection directions whose sample coordinates have a standard
    /// deviation below variance_floor * (largest direction std) are passed
    /// over in favour of the next-smallest eigenvectors; such directions are
    /// trivial minimizers of the smoothness terms and carry no signal an
    /// out-of-sample point could follow. 0 disables the filter.
    double variance_floor = 0.02;
    TransitionInit transition_init = TransitionInit::Memberships;
};

/// Trained alignment: projection Theta (r x d), transition generator G
/// (c x n), ADMM scratch (auxiliary H, multiplier), and the objective history.
struct AlignmentModel {
    KernelModel kernel;
    Matrix theta;        // r x d, Theta' * gram * Theta = I
    Matrix transition;   // G, c x n
    Matrix aux;          // H, c x n
    Matrix multiplier;   // zeta_1, c x n
    AlignParams params;
    int subspace_dim = 0;  // effective d after rank clamping
    std::vector<double> history;  // combined objective per outer iteration
    bool converged = false;
};

/// Local manifold structure metric: the weighted sum of squared projected
/// distances between the transition set and the sample set, in its
/// three-term trace form scaled by 1/n^2.
double lmsm_value(const Matrix& theta, const Matrix& transition, const KernelModel& kern,
                  const GraphPair& graph);
double lmsm_value(const AlignmentModel& model, const KernelModel& kern, const GraphPair& graph);

/// Global structure distribution metric: (1/n) * ||Theta^T (Psi_v G - Psi_e) 1||^2.
double gsdm_value(const Matrix& theta, const Matrix& transition, const KernelModel& kern);
double gsdm_value(const AlignmentModel& model, const KernelModel& kern);

/// Singular-value soft-thresholding (the proximal operator of the nuclear
/// norm at level tau).
Matrix singular_value_threshold(const Matrix& M, double tau);

double nuclear_norm(const Matrix& M);

/// Joint minimization of the local and global terms under the kernel
/// orthogonality constraint and a nuclear-norm-regularized transition
/// generator; see the .cpp for the update scheme. A non-converged run still
/// returns its best iterate with the full history attached.
AlignmentModel optimize(const Matrix& X_e, const Matrix& V_e, const AlignParams& params,
                        std::uint64_t seed,
                        std::optional<Matrix> transition_init = std::nullopt);

/// Projects rows of `samples` (same width as the kernel reference) into the
/// aligned subspace: result = Theta^T * gram(X_r, samples), one column per
/// sample.
Matrix project(const AlignmentModel& model, const Matrix& samples);

}  // namespace dsenlg
