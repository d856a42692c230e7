#include "dsenlg/alignment.hpp"

#include "dsenlg/envelope.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsenlg {

namespace {

Matrix pairwise_squared_distances(const Matrix& A, const Matrix& B) {
    Matrix d2 = -2.0 * A * B.transpose();
    d2.colwise() += A.rowwise().squaredNorm();
    d2.rowwise() += B.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

}  // namespace

Matrix gaussian_gram(const Matrix& A, const Matrix& B, double sigma) {
    if (A.cols() != B.cols()) throw std::invalid_argument("gaussian_gram: column mismatch");
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_gram: sigma must be positive");
    const double inv = -0.5 / (sigma * sigma);
    return (pairwise_squared_distances(A, B) * inv).array().exp();
}

double median_pairwise_distance(const Matrix& X) {
    const Index n = X.rows();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            dists.push_back((X.row(i) - X.row(j)).norm());
        }
    }
    if (dists.empty()) return 1.0;
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
    double med = dists[mid];
    if (med <= 0.0) {
        double smallest = 0.0;
        for (double d : dists) {
            if (d > 0.0 && (smallest == 0.0 || d < smallest)) smallest = d;
        }
        med = (smallest > 0.0) ? smallest : 1.0;
    }
    return med;
}

KernelModel build_kernel_model(const Matrix& X_e, const Matrix& V_e,
                               std::optional<double> sigma) {
    if (X_e.cols() != V_e.cols()) {
        throw std::invalid_argument("kernel model: sample/prototype width mismatch");
    }
    KernelModel kern;
    kern.prototype_count = V_e.rows();
    kern.sample_count = X_e.rows();
    kern.reference.resize(V_e.rows() + X_e.rows(), X_e.cols());
    kern.reference << V_e, X_e;
    kern.sigma = sigma.value_or(median_pairwise_distance(kern.reference));
    kern.gram = gaussian_gram(kern.reference, kern.reference, kern.sigma);
    kern.gram = 0.5 * (kern.gram + kern.gram.transpose().eval());
    kern.gram_v = kern.gram.leftCols(kern.prototype_count);
    kern.gram_e = kern.gram.rightCols(kern.sample_count);
    return kern;
}

GraphPair build_affinity(const Matrix& X, int k) {
    const Index n = X.rows();
    if (n <= static_cast<Index>(k)) {
        throw std::invalid_argument("build_affinity: need more rows than neighbours");
    }
    GraphPair g;
    g.affinity = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index nb : knn(X, X.row(i), k, i)) {
            g.affinity(i, nb) = 1.0;
            g.affinity(nb, i) = 1.0;
        }
    }
    g.degree = g.affinity.rowwise().sum();
    return g;
}

double lmsm_value(const Matrix& theta, const Matrix& transition, const KernelModel& kern,
                  const GraphPair& graph) {
    const Index n = kern.sample_count;
    if (theta.rows() != kern.gram.rows()) throw std::invalid_argument("lmsm: theta shape");
    if (transition.rows() != kern.prototype_count || transition.cols() != n) {
        throw std::invalid_argument("lmsm: transition shape");
    }
    const Matrix A = theta.transpose() * kern.gram_v * transition;  // d x n
    const Matrix B = theta.transpose() * kern.gram_e;               // d x n
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    const double term_m = (A * graph.degree.asDiagonal() * A.transpose()).trace();
    const double term_e = (B * graph.degree.asDiagonal() * B.transpose()).trace();
    const double cross = (A * graph.affinity * B.transpose()).trace();
    return scale * (term_m + term_e - 2.0 * cross);
}

double lmsm_value(const AlignmentModel& model, const KernelModel& kern, const GraphPair& graph) {
    return lmsm_value(model.theta, model.transition, kern, graph);
}

double gsdm_value(const Matrix& theta, const Matrix& transition, const KernelModel& kern) {
    const Index n = kern.sample_count;
    const Vector diff = kern.gram_v * (transition * Vector::Ones(n)) -
                        kern.gram_e * Vector::Ones(n);
    return (theta.transpose() * diff).squaredNorm() / static_cast<double>(n);
}

double gsdm_value(const AlignmentModel& model, const KernelModel& kern) {
    return gsdm_value(model.theta, model.transition, kern);
}

Matrix singular_value_threshold(const Matrix& M, double tau) {
    if (tau <= 0.0) return M;
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i) sv(i) = std::max(0.0, sv(i) - tau);
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

double nuclear_norm(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues().sum();
}

namespace {

/// Scratch shared by the optimizer steps. All projection work happens in the
/// whitened kernel basis: gram = E diag(w) E^T restricted to eigenvalues above
/// the floor, F = E w^{-1/2}, so any theta = F * W with W^T W = I satisfies
/// theta^T gram theta = I up to roundoff.
struct Workspace {
    Matrix phi_v;      // r' x c
    Matrix phi_e;      // r' x n
    Vector phi_e_sum;  // phi_e * 1
    Matrix e_term;     // phi_e D phi_e^T, constant across iterations
    Index n = 0;
    Index c = 0;
    int d = 0;
    double lambda = 0.0;
    double variance_floor = 0.0;
    Vector ridge_diag;  // mu / kernel eigenvalue, per whitened direction
};

/// Orthonormal W minimizing the combined quadratic form at fixed transition.
/// Eigenvectors are taken in ascending eigenvalue order, skipping directions
/// whose projected sample coordinates are effectively constant: those carry
/// no data variation (the trivial minimizers of the smoothness terms), so a
/// split learned on them cannot transfer to out-of-sample points.
Matrix theta_step(const Workspace& ws, const Matrix& transition, const GraphPair& graph) {
    const double n2 = static_cast<double>(ws.n) * static_cast<double>(ws.n);
    const Matrix av = ws.phi_v * transition;                       // r' x n
    const Matrix cross = av * graph.affinity * ws.phi_e.transpose();  // r' x r'
    Matrix q = av * graph.degree.asDiagonal() * av.transpose();
    q += ws.e_term;
    q -= cross + cross.transpose();
    q /= n2;
    if (ws.lambda > 0.0) {
        const Vector w = av.rowwise().sum() - ws.phi_e_sum;
        q += (ws.lambda / n2) * (w * w.transpose());
    }
    if (ws.ridge_diag.size() > 0) q += Matrix(ws.ridge_diag.asDiagonal());
    q = 0.5 * (q + q.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    const Matrix& vectors = es.eigenvectors();

    // Standard deviation of the layer samples along each candidate direction.
    const Matrix sample_proj =
        vectors.transpose() * (ws.phi_e.colwise() - ws.phi_e.rowwise().mean());
    const Vector sd = (sample_proj.array().square().rowwise().mean()).sqrt();
    const double floor = ws.variance_floor * sd.maxCoeff();

    Matrix w(vectors.rows(), ws.d);
    int taken = 0;
    for (Index i = 0; i < vectors.cols() && taken < ws.d; ++i) {
        if (sd(i) >= floor) w.col(taken++) = vectors.col(i);
    }
    for (Index i = 0; i < vectors.cols() && taken < ws.d; ++i) {
        if (sd(i) < floor) w.col(taken++) = vectors.col(i);
    }
    return w;
}

double combined_objective(const Workspace& ws, const Matrix& W, const Matrix& transition,
                          const GraphPair& graph, double lambda1) {
    const double n2 = static_cast<double>(ws.n) * static_cast<double>(ws.n);
    const Matrix A = (W.transpose() * ws.phi_v) * transition;  // d x n
    const Matrix B = W.transpose() * ws.phi_e;                 // d x n
    const double lmsm = ((A * graph.degree.asDiagonal() * A.transpose()).trace() +
                         (B * graph.degree.asDiagonal() * B.transpose()).trace() -
                         2.0 * (A * graph.affinity * B.transpose()).trace()) /
                        n2;
    const double gsdm_raw = ((A - B) * Vector::Ones(ws.n)).squaredNorm();
    double value = lmsm + ws.lambda / n2 * gsdm_raw;
    if (lambda1 > 0.0) value += lambda1 * nuclear_norm(transition);
    return value;
}

}  // namespace

AlignmentModel optimize(const Matrix& X_e, const Matrix& V_e, const AlignParams& params,
                        std::uint64_t seed, std::optional<Matrix> transition_init) {
    (void)seed;  // the scheme is deterministic; kept for interface stability
    if (X_e.cols() != V_e.cols()) throw std::invalid_argument("optimize: width mismatch");
    const Index n = X_e.rows();
    const Index c = V_e.rows();
    if (n < 2 || c < 1) throw std::invalid_argument("optimize: degenerate inputs");

    AlignmentModel model;
    model.params = params;
    model.kernel = build_kernel_model(X_e, V_e);
    if (params.sigma_scale != 1.0) {
        model.kernel = build_kernel_model(X_e, V_e,
                                          params.sigma_scale * model.kernel.sigma);
    }
    const KernelModel& kern = model.kernel;
    const GraphPair graph = build_affinity(X_e, params.graph_neighbors);

    // Reduced spectral basis of the kernel Gram matrix.
    Eigen::SelfAdjointEigenSolver<Matrix> es(kern.gram);
    const double floor = params.spectrum_floor * kern.gram.diagonal().mean();
    const Vector& evals = es.eigenvalues();
    Index first_kept = 0;
    while (first_kept < evals.size() && evals(first_kept) <= floor) ++first_kept;
    const Index rank = evals.size() - first_kept;
    if (rank == 0) throw std::runtime_error("optimize: kernel matrix is numerically rank-0");
    Matrix F(kern.gram.rows(), rank);
    for (Index j = 0; j < rank; ++j) {
        F.col(j) = es.eigenvectors().col(first_kept + j) / std::sqrt(evals(first_kept + j));
    }

    Workspace ws;
    ws.phi_v = F.transpose() * kern.gram_v;
    ws.phi_e = F.transpose() * kern.gram_e;
    ws.phi_e_sum = ws.phi_e.rowwise().sum();
    ws.e_term = ws.phi_e * graph.degree.asDiagonal() * ws.phi_e.transpose();
    ws.n = n;
    ws.c = c;
    ws.d = static_cast<int>(std::min<Index>(std::max(params.subspace_dim, 1), rank));
    ws.lambda = params.lambda;
    ws.variance_floor = params.variance_floor;
    if (params.ridge > 0.0) {
        ws.ridge_diag.resize(rank);
        for (Index j = 0; j < rank; ++j) ws.ridge_diag(j) = params.ridge / evals(first_kept + j);
    }
    model.subspace_dim = ws.d;

    Matrix transition;
    if (transition_init) {
        if (transition_init->rows() != c || transition_init->cols() != n) {
            throw std::invalid_argument("optimize: transition_init must be c x n");
        }
        transition = *transition_init;
    } else {
        transition = Matrix::Zero(c, n);
    }
    Matrix aux = transition;
    Matrix multiplier = Matrix::Zero(c, n);

    // Neutral start: the dominant whitened kernel directions. The first
    // projection update replaces this, so it only defines the objective's
    // reference point at iteration 0.
    Matrix W = Matrix::Zero(rank, ws.d);
    for (int j = 0; j < ws.d; ++j) W(rank - 1 - j, j) = 1.0;
    double objective = combined_objective(ws, W, transition, graph, params.lambda1);
    model.history.push_back(objective);

    // Constant factor of the transition solve: the n x n side of the
    // Sylvester-type system (2/n^2) M G (D + lambda 1 1^T) + delta G = C.
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    Matrix side = (2.0 / n2) *
                  (Matrix(graph.degree.asDiagonal()) +
                   params.lambda * Matrix::Ones(n, n));
    Eigen::SelfAdjointEigenSolver<Matrix> es_side(side);
    const Matrix& qb = es_side.eigenvectors();
    const Vector& lb = es_side.eigenvalues();

    struct Snapshot {
        Matrix W, transition, aux, multiplier;
        double objective;
    } best{W, transition, aux, multiplier, objective};

    double previous = objective;
    for (int outer = 0; outer < params.max_outer; ++outer) {
        // (a) auxiliary variable: nuclear-norm prox.
        aux = singular_value_threshold(transition + multiplier / params.delta,
                                       params.lambda1 / params.delta);

        // (b) projection step at the incoming transition.
        W = theta_step(ws, transition, graph);

        // (c) transition generator: exact minimizer of the smooth terms plus
        // the augmented-Lagrangian coupling, via two eigenbases.
        const Matrix p_v = W.transpose() * ws.phi_v;  // d x c
        const Matrix p_e = W.transpose() * ws.phi_e;  // d x n
        const Matrix m = p_v.transpose() * p_v;       // c x c
        const Matrix nm = p_v.transpose() * p_e;      // c x n
        Matrix rhs = (2.0 / n2) *
                     (nm * graph.affinity +
                      params.lambda * (nm.rowwise().sum()) * RowVector::Ones(n));
        rhs -= multiplier;
        rhs += params.delta * aux;
        Eigen::SelfAdjointEigenSolver<Matrix> es_m(m);
        const Matrix& qa = es_m.eigenvectors();
        const Vector& la = es_m.eigenvalues();
        Matrix core = qa.transpose() * rhs * qb;
        for (Index i = 0; i < core.rows(); ++i) {
            for (Index j = 0; j < core.cols(); ++j) {
                core(i, j) /= std::max(la(i), 0.0) * std::max(lb(j), 0.0) + params.delta;
            }
        }
        transition = qa * core * qb.transpose();

        // (d) multiplier ascent.
        multiplier += params.delta * (transition - aux);

        objective = combined_objective(ws, W, transition, graph, params.lambda1);
        model.history.push_back(objective);
        if (objective < best.objective) best = {W, transition, aux, multiplier, objective};

        const double consensus = (transition - aux).norm();
        const bool objective_settled =
            std::abs(objective - previous) <= params.tol * std::max(1.0, std::abs(previous));
        const bool consensus_settled =
            consensus <= params.tol * std::max(1.0, transition.norm());
        if (objective_settled && consensus_settled) {
            model.converged = true;
            break;
        }
        previous = objective;
    }

    // Return the best iterate whenever the last one regressed (the
    // alternating scheme is not guaranteed monotone); the history then ends
    // at the returned state's objective.
    if (objective > best.objective) {
        W = best.W;
        transition = best.transition;
        aux = best.aux;
        multiplier = best.multiplier;
        model.history.push_back(best.objective);
    }

    model.theta = F * W;
    model.transition = std::move(transition);
    model.aux = std::move(aux);
    model.multiplier = std::move(multiplier);
    return model;
}

Matrix project(const AlignmentModel& model, const Matrix& samples) {
    if (samples.cols() != model.kernel.reference.cols()) {
        throw std::invalid_argument("project: sample width mismatch");
    }
    return model.theta.transpose() *
           gaussian_gram(model.kernel.reference, samples, model.kernel.sigma);
}

}  // namespace dsenlg
