#include "dsenlg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dsenlg {

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("confusion: length mismatch");
    }
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual_pos = truth[i] == Label::Minority;
        const bool predicted_pos = predicted[i] == Label::Minority;
        if (actual_pos && predicted_pos) ++c.tp;
        else if (!actual_pos && predicted_pos) ++c.fp;
        else if (actual_pos && !predicted_pos) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricSet metrics(const Confusion& c) {
    const auto tp = static_cast<double>(c.tp);
    const auto fp = static_cast<double>(c.fp);
    const auto tn = static_cast<double>(c.tn);
    const auto fn = static_cast<double>(c.fn);

    MetricSet m;
    m.sen = (tp + fn > 0.0) ? tp / (tp + fn) : 0.0;
    m.spe = (tn + fp > 0.0) ? tn / (tn + fp) : 0.0;
    m.pre = (tp + fp > 0.0) ? tp / (tp + fp) : 0.0;
    m.rec = m.sen;
    m.auc = 0.5 * (m.sen + m.spe);
    m.g_mean = std::sqrt(m.sen * m.spe);
    m.f_measure = (m.pre + m.rec > 0.0) ? 2.0 * m.pre * m.rec / (m.pre + m.rec) : 0.0;
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = (denom > 0.0) ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    return m;
}

double cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cohen_kappa: length mismatch");
    if (a.empty()) throw std::invalid_argument("cohen_kappa: empty input");
    const auto n = static_cast<double>(a.size());
    double agree = 0.0, a_min = 0.0, b_min = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        agree += (a[i] == b[i]);
        a_min += (a[i] == Label::Minority);
        b_min += (b[i] == Label::Minority);
    }
    const double po = agree / n;
    const double pe =
        (a_min * b_min + (n - a_min) * (n - b_min)) / (n * n);
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

std::vector<double> average_ranks(const Matrix& scores, bool higher_is_better) {
    const Index methods = scores.rows();
    const Index datasets = scores.cols();
    if (methods < 1 || datasets < 1) throw std::invalid_argument("average_ranks: empty matrix");
    if (!scores.allFinite()) throw std::invalid_argument("average_ranks: missing cells");

    std::vector<double> totals(static_cast<std::size_t>(methods), 0.0);
    std::vector<std::pair<double, Index>> column(static_cast<std::size_t>(methods));
    for (Index d = 0; d < datasets; ++d) {
        for (Index m = 0; m < methods; ++m) {
            const double key = higher_is_better ? -scores(m, d) : scores(m, d);
            column[static_cast<std::size_t>(m)] = {key, m};
        }
        std::sort(column.begin(), column.end());
        // Tied blocks share the mean of the positions they occupy.
        Index i = 0;
        while (i < methods) {
            Index j = i;
            while (j + 1 < methods &&
                   column[static_cast<std::size_t>(j + 1)].first ==
                       column[static_cast<std::size_t>(i)].first) {
                ++j;
            }
            const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
            for (Index t = i; t <= j; ++t) {
                totals[static_cast<std::size_t>(column[static_cast<std::size_t>(t)].second)] +=
                    shared;
            }
            i = j + 1;
        }
    }
    for (double& t : totals) t /= static_cast<double>(datasets);
    return totals;
}

FriedmanResult friedman_test(const std::vector<double>& avg_ranks, int k, int N) {
    if (k < 2 || N < 2) throw std::invalid_argument("friedman_test: need k >= 2 and N >= 2");
    if (static_cast<int>(avg_ranks.size()) != k) {
        throw std::invalid_argument("friedman_test: rank count must equal k");
    }
    const double kk = static_cast<double>(k);
    double sum_sq = 0.0;
    for (double r : avg_ranks) sum_sq += r * r;
    FriedmanResult result;
    result.statistic =
        12.0 * static_cast<double>(N) / (kk * (kk + 1.0)) *
        (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
    result.statistic = std::max(0.0, result.statistic);
    result.degrees_of_freedom = k - 1;
    result.p_value = chi_squared_upper_tail(result.statistic, result.degrees_of_freedom);
    return result;
}

std::vector<HolmOutcome> holm_test(std::span<const double> p_values, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("holm_test: alpha in (0,1)");
    for (double p : p_values) {
        if (p < 0.0 || p > 1.0 || std::isnan(p)) {
            throw std::invalid_argument("holm_test: p-values must lie in [0,1]");
        }
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<HolmOutcome> out(m);
    bool stopped = false;
    for (std::size_t i = 0; i < m; ++i) {
        const double threshold = alpha / static_cast<double>(m - i);
        const std::size_t original = order[i];
        out[original].threshold = threshold;
        if (!stopped && p_values[original] <= threshold) {
            out[original].reject = true;
        } else {
            stopped = true;
        }
    }
    return out;
}

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-14;

double gamma_series_p(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_continued_fraction_q(double a, double x) {
    // Lentz's algorithm for the continued-fraction representation.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series_p(a, x);
    return 1.0 - gamma_continued_fraction_q(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series_p(a, x);
    return gamma_continued_fraction_q(a, x);
}

double chi_squared_upper_tail(double x, int degrees_of_freedom) {
    if (degrees_of_freedom < 1) throw std::invalid_argument("chi_squared_upper_tail: df >= 1");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * static_cast<double>(degrees_of_freedom), 0.5 * x);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace dsenlg
