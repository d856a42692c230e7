#pragma once

#include "dsenlg/types.hpp"

#include <span>
#include <vector>

namespace dsenlg {

/// Confusion counts with the minority class as positive.
struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted);

/// The four headline criteria plus their ingredients. Zero denominators
/// resolve to 0 (precision, F-measure, Mcc) so every field is always defined.
struct MetricSet {
    double auc = 0.0;        // (sen + spe) / 2
    double f_measure = 0.0;  // harmonic mean of precision and recall
    double g_mean = 0.0;     // sqrt(sen * spe)
    double mcc = 0.0;
    double sen = 0.0;
    double spe = 0.0;
    double pre = 0.0;
    double rec = 0.0;
};

MetricSet metrics(const Confusion& c);

/// Chance-corrected agreement between two prediction vectors; returns 1 when
/// the expected agreement is already 1.
double cohen_kappa(std::span<const Label> a, std::span<const Label> b);

/// Per-method mean rank over datasets (rows = methods, columns = datasets).
/// Rank 1 is best; ties share the mean of the occupied ranks.
std::vector<double> average_ranks(const Matrix& scores, bool higher_is_better);

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int degrees_of_freedom = 0;
};

/// Friedman chi-square over method average ranks for k methods on N datasets.
FriedmanResult friedman_test(const std::vector<double>& avg_ranks, int k, int N);

struct HolmOutcome {
    double threshold = 0.0;
    bool reject = false;
};

/// Step-down Holm procedure: sorted p-values are compared against
/// alpha/(m - i + 1); rejection stops at the first failure. The result is
/// reported in the original comparison order.
std::vector<HolmOutcome> holm_test(std::span<const double> p_values, double alpha);

/// Regularized incomplete gamma functions (series/continued-fraction forms),
/// accurate to ~1e-12; P(a,x) + Q(a,x) = 1.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Upper-tail probability of the chi-squared distribution.
double chi_squared_upper_tail(double x, int degrees_of_freedom);

/// Standard normal upper-tail probability via erfc.
double normal_upper_tail(double z);

}  // namespace dsenlg
