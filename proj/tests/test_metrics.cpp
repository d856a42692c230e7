#include "dsenlg/metrics.hpp"

#include "dsenlg/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace dsenlg;

namespace {

LabelVector labels_from(const std::vector<int>& raw) {
    LabelVector out;
    for (int v : raw) out.push_back(v == 1 ? Label::Minority : Label::Majority);
    return out;
}

/// Independent metric oracle working from explicit loop counts; mirrors the
/// documented zero-denominator conventions.
MetricSet metric_oracle(const Confusion& c) {
    MetricSet m;
    const double tp = c.tp, fp = c.fp, tn = c.tn, fn = c.fn;
    m.sen = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.spe = tn + fp > 0 ? tn / (tn + fp) : 0.0;
    m.pre = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.rec = m.sen;
    m.auc = (m.sen + m.spe) / 2.0;
    m.g_mean = std::sqrt(m.sen * m.spe);
    m.f_measure = (m.pre + m.rec) > 0 ? 2 * m.pre * m.rec / (m.pre + m.rec) : 0.0;
    const double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = d > 0 ? (tp * tn - fp * fn) / std::sqrt(d) : 0.0;
    return m;
}

}  // namespace

TEST_CASE("confusion counting") {
    // Perfect prediction on 10 positive / 30 negative.
    LabelVector truth(10, Label::Minority);
    truth.insert(truth.end(), 30, Label::Majority);
    Confusion c = confusion(truth, truth);
    CHECK(c.tp == 10);
    CHECK(c.tn == 30);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    // All-majority prediction.
    LabelVector all_major(40, Label::Majority);
    c = confusion(truth, all_major);
    CHECK(c.tp == 0);
    CHECK(c.fn == 10);
    CHECK(c.tn == 30);

    // Random case against an elementwise counting oracle.
    Rng rng(3);
    LabelVector t, p;
    for (int i = 0; i < 50; ++i) {
        t.push_back(rng.uniform() < 0.3 ? Label::Minority : Label::Majority);
        p.push_back(rng.uniform() < 0.5 ? Label::Minority : Label::Majority);
    }
    c = confusion(t, p);
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == Label::Minority && p[i] == Label::Minority) ++tp;
        if (t[i] == Label::Majority && p[i] == Label::Minority) ++fp;
        if (t[i] == Label::Minority && p[i] == Label::Majority) ++fn;
        if (t[i] == Label::Majority && p[i] == Label::Majority) ++tn;
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.tn == tn);
    CHECK(c.fn == fn);
    CHECK(c.total() == 50);

    LabelVector shorter(10, Label::Minority);
    CHECK_THROWS(confusion(truth, shorter));
}

TEST_CASE("metrics on a perfect classifier") {
    const MetricSet m = metrics({10, 0, 30, 0});
    CHECK(m.auc == doctest::Approx(1.0));
    CHECK(m.f_measure == doctest::Approx(1.0));
    CHECK(m.g_mean == doctest::Approx(1.0));
    CHECK(m.mcc == doctest::Approx(1.0));
}

TEST_CASE("metrics on the degenerate all-negative classifier") {
    const MetricSet m = metrics({0, 0, 30, 10});
    CHECK(m.sen == doctest::Approx(0.0));
    CHECK(m.auc == doctest::Approx(0.5));
    CHECK(m.g_mean == doctest::Approx(0.0));
    CHECK(m.f_measure == doctest::Approx(0.0));
    CHECK(m.mcc == doctest::Approx(0.0));
}

TEST_CASE("metrics hand evaluation on a mixed confusion matrix") {
    // TP=40, FN=10, TN=25, FP=5 evaluated independently:
    //   sen = 40/50, spe = 25/30, pre = 40/45,
    //   mcc = (40*25 - 5*10) / sqrt(45*50*30*35).
    const Confusion c{40, 5, 25, 10};
    const MetricSet m = metrics(c);
    CHECK(m.sen == doctest::Approx(0.8));
    CHECK(m.spe == doctest::Approx(25.0 / 30.0));
    CHECK(m.auc == doctest::Approx(0.5 * (0.8 + 25.0 / 30.0)));
    CHECK(m.g_mean == doctest::Approx(std::sqrt(0.8 * 25.0 / 30.0)));
    CHECK(m.pre == doctest::Approx(40.0 / 45.0));
    const double f_expect = 2.0 * (40.0 / 45.0) * 0.8 / ((40.0 / 45.0) + 0.8);
    CHECK(m.f_measure == doctest::Approx(f_expect).epsilon(1e-12));
    const double mcc_expect = (40.0 * 25.0 - 5.0 * 10.0) / std::sqrt(45.0 * 50.0 * 30.0 * 35.0);
    CHECK(m.mcc == doctest::Approx(mcc_expect).epsilon(1e-12));
    // Rounded values for cross-checking: auc 0.8167, g 0.8165, f 0.8421.
    CHECK(std::abs(m.auc - 0.8167) < 5e-5);
    CHECK(std::abs(m.g_mean - 0.8165) < 5e-5);
    CHECK(std::abs(m.f_measure - 0.8421) < 5e-5);
}

TEST_CASE("metric ranges hold on fuzzed confusion matrices") {
    Rng rng(11);
    for (int trial = 0; trial < 10000; ++trial) {
        Confusion c;
        c.tp = static_cast<long>(rng.below(40));
        c.fp = static_cast<long>(rng.below(40));
        c.tn = static_cast<long>(rng.below(40));
        c.fn = static_cast<long>(rng.below(40));
        if (c.total() == 0) continue;
        const MetricSet m = metrics(c);
        const MetricSet o = metric_oracle(c);
        CHECK(m.auc == doctest::Approx(o.auc).epsilon(1e-12));
        CHECK(m.f_measure == doctest::Approx(o.f_measure).epsilon(1e-12));
        CHECK(m.g_mean == doctest::Approx(o.g_mean).epsilon(1e-12));
        CHECK(m.mcc == doctest::Approx(o.mcc).epsilon(1e-12));
        CHECK(m.auc >= 0.0);
        CHECK(m.auc <= 1.0);
        CHECK(m.mcc >= -1.0);
        CHECK(m.mcc <= 1.0);
        CHECK(m.auc == doctest::Approx(0.5 * (m.sen + m.spe)));
        CHECK(m.g_mean * m.g_mean == doctest::Approx(m.sen * m.spe).epsilon(1e-12));
    }
}

TEST_CASE("mcc vanishes when predictions are independent of the truth") {
    // Product-marginal table: truth 20/80, prediction 50/50.
    const Confusion c{10, 40, 40, 10};
    CHECK(metrics(c).mcc == doctest::Approx(0.0));
}

TEST_CASE("cohen_kappa closed forms and oracle") {
    const LabelVector a = labels_from({1, 1, 0, 0, 1, 0});
    CHECK(cohen_kappa(a, a) == doctest::Approx(1.0));

    const LabelVector b = labels_from({0, 0, 1, 1, 0, 1});  // complement, balanced marginals
    CHECK(cohen_kappa(a, b) == doctest::Approx(-1.0));

    Rng rng(21);
    LabelVector u, v;
    for (int i = 0; i < 100; ++i) {
        u.push_back(rng.uniform() < 0.4 ? Label::Minority : Label::Majority);
        v.push_back(rng.uniform() < 0.6 ? Label::Minority : Label::Majority);
    }
    // Contingency-table oracle.
    double n11 = 0, n00 = 0, u1 = 0, v1 = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        n11 += (u[i] == Label::Minority && v[i] == Label::Minority);
        n00 += (u[i] == Label::Majority && v[i] == Label::Majority);
        u1 += (u[i] == Label::Minority);
        v1 += (v[i] == Label::Minority);
    }
    const double n = 100.0;
    const double po = (n11 + n00) / n;
    const double pe = (u1 / n) * (v1 / n) + ((n - u1) / n) * ((n - v1) / n);
    CHECK(cohen_kappa(u, v) == doctest::Approx((po - pe) / (1 - pe)).epsilon(1e-12));

    // Chance agreement of one: both raters constant and identical.
    const LabelVector constant(5, Label::Majority);
    CHECK(cohen_kappa(constant, constant) == doctest::Approx(1.0));
}

TEST_CASE("average_ranks basics") {
    Matrix scores(2, 4);
    scores << 0.9, 0.8, 0.95, 0.7, 0.5, 0.6, 0.95, 0.6;
    SUBCASE("method A dominates") {
        Matrix dom(2, 4);
        dom << 0.9, 0.8, 0.95, 0.7, 0.5, 0.6, 0.55, 0.6;
        const auto ranks = average_ranks(dom, true);
        CHECK(ranks[0] == doctest::Approx(1.0));
        CHECK(ranks[1] == doctest::Approx(2.0));
    }
    SUBCASE("ties share the midrank") {
        const auto ranks = average_ranks(scores, true);
        // Dataset 3 is tied -> both get 1.5 there.
        CHECK(ranks[0] == doctest::Approx((1 + 1 + 1.5 + 1) / 4.0));
        CHECK(ranks[1] == doctest::Approx((2 + 2 + 1.5 + 2) / 4.0));
    }
}

TEST_CASE("average_ranks matches a sort-based oracle on an 8x44 fuzz matrix") {
    Rng rng(31);
    Matrix scores(8, 44);
    for (Index i = 0; i < 8; ++i) {
        for (Index j = 0; j < 44; ++j) scores(i, j) = rng.uniform();
    }
    const auto ranks = average_ranks(scores, true);
    std::vector<double> expected(8, 0.0);
    for (Index d = 0; d < 44; ++d) {
        for (Index m = 0; m < 8; ++m) {
            double rank = 1.0;
            double ties = 0.0;
            for (Index o = 0; o < 8; ++o) {
                if (o == m) continue;
                if (scores(o, d) > scores(m, d)) rank += 1.0;
                if (scores(o, d) == scores(m, d)) ties += 1.0;
            }
            expected[static_cast<std::size_t>(m)] += rank + ties / 2.0;
        }
    }
    for (auto& e : expected) e /= 44.0;
    for (std::size_t m = 0; m < 8; ++m) {
        CHECK(ranks[m] == doctest::Approx(expected[m]).epsilon(1e-12));
    }
}

TEST_CASE("friedman test closed forms") {
    SUBCASE("identical ranks give statistic zero and p one") {
        const std::vector<double> ranks(4, 2.5);  // (k+1)/2 for k=4
        const FriedmanResult r = friedman_test(ranks, 4, 10);
        CHECK(r.statistic == doctest::Approx(0.0));
        CHECK(r.p_value == doctest::Approx(1.0));
    }
    SUBCASE("perfect ordering, k=3, N=10") {
        const std::vector<double> ranks{1.0, 2.0, 3.0};
        const FriedmanResult r = friedman_test(ranks, 3, 10);
        CHECK(r.statistic == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(r.degrees_of_freedom == 2);
        // df = 2 has the closed-form tail exp(-x/2).
        CHECK(r.p_value == doctest::Approx(std::exp(-10.0)).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(4.539993e-5).epsilon(1e-5));
    }
    SUBCASE("hand-computed 4-method, 5-dataset instance") {
        // Every dataset orders the methods identically: ranks (1,2,3,4).
        // chi2 = 12*5/(4*5) * (30 - 4*25/4) = 3 * 5 = 15.00
        const std::vector<double> ranks{1.0, 2.0, 3.0, 4.0};
        const FriedmanResult r = friedman_test(ranks, 4, 5);
        CHECK(r.statistic == doctest::Approx(15.0).epsilon(1e-12));
        CHECK(r.degrees_of_freedom == 3);
        CHECK(r.p_value == doctest::Approx(0.0018166).epsilon(1e-4));
    }
    SUBCASE("statistic is invariant under method relabelling") {
        std::vector<double> ranks{1.4, 3.2, 2.6, 2.8};
        const double a = friedman_test(ranks, 4, 12).statistic;
        std::reverse(ranks.begin(), ranks.end());
        CHECK(friedman_test(ranks, 4, 12).statistic == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("holm ladder and step-down behaviour") {
    SUBCASE("threshold ladder for seven comparisons") {
        const std::vector<double> p(7, 1e-9);
        const auto out = holm_test(p, 0.05);
        // All p equal: ordering is by original position (stable sort).
        CHECK(out[0].threshold == doctest::Approx(0.05 / 7.0).epsilon(1e-12));
        CHECK(out[0].threshold == doctest::Approx(0.00714285714).epsilon(1e-6));
        CHECK(out[6].threshold == doctest::Approx(0.05));
        for (const auto& o : out) CHECK(o.reject);
    }
    SUBCASE("all p = 1 rejects nothing") {
        const std::vector<double> p(5, 1.0);
        for (const auto& o : holm_test(p, 0.05)) CHECK_FALSE(o.reject);
    }
    SUBCASE("hand step-down with two comparisons") {
        const std::vector<double> p{0.001, 0.04};
        const auto out = holm_test(p, 0.05);
        CHECK(out[0].threshold == doctest::Approx(0.025));
        CHECK(out[0].reject);
        CHECK(out[1].threshold == doctest::Approx(0.05));
        CHECK(out[1].reject);
    }
    SUBCASE("first failure stops later rejections") {
        // Sorted ladder: 0.0001 vs 0.05/3 (reject), 0.03 vs 0.025 (fail,
        // stop), 0.04 vs 0.05 (would pass but is blocked by the step-down).
        const std::vector<double> p{0.03, 0.0001, 0.04};
        const auto out = holm_test(p, 0.05);
        CHECK(out[1].reject);
        CHECK_FALSE(out[0].reject);
        CHECK_FALSE(out[2].reject);
    }
    SUBCASE("monotonicity: lowering a p-value never converts reject to accept") {
        Rng rng(41);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> p;
            for (int i = 0; i < 6; ++i) p.push_back(rng.uniform());
            const auto base = holm_test(p, 0.05);
            std::vector<double> lowered = p;
            const std::size_t which = static_cast<std::size_t>(rng.below(6));
            lowered[which] *= 0.5;
            const auto after = holm_test(lowered, 0.05);
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (base[i].reject) CHECK(after[i].reject);
            }
        }
    }
}

TEST_CASE("holm validates inputs") {
    CHECK_THROWS(holm_test(std::vector<double>{0.5}, 0.0));
    CHECK_THROWS(holm_test(std::vector<double>{1.5}, 0.05));
}

TEST_CASE("regularized incomplete gamma sanity") {
    // P + Q = 1 across a range of arguments.
    for (double a : {0.5, 1.0, 2.5, 10.0}) {
        for (double x : {0.1, 1.0, 5.0, 20.0}) {
            CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // Known point: chi-square df=2 upper tail is exp(-x/2).
    CHECK(chi_squared_upper_tail(7.0, 2) == doctest::Approx(std::exp(-3.5)).epsilon(1e-10));
    // Known point: chi-square df=1 relates to the normal tail.
    CHECK(chi_squared_upper_tail(4.0, 1) ==
          doctest::Approx(2.0 * normal_upper_tail(2.0)).epsilon(1e-10));
}
