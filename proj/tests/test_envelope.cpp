#include "dsenlg/envelope.hpp"

#include "dsenlg/rng.hpp"

#include <doctest.h>

#include <algorithm>

using namespace dsenlg;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform() * 4.0 - 2.0;
    }
    return m;
}

/// Independent oracle: full distance sort with (distance, index) ordering.
std::vector<Index> knn_oracle(const Matrix& ref, const RowVector& q, int k, Index exclude) {
    std::vector<std::pair<double, Index>> all;
    for (Index i = 0; i < ref.rows(); ++i) {
        if (i == exclude) continue;
        all.emplace_back((ref.row(i) - q).squaredNorm(), i);
    }
    std::sort(all.begin(), all.end());
    std::vector<Index> out;
    for (int i = 0; i < k; ++i) out.push_back(all[static_cast<std::size_t>(i)].second);
    return out;
}

}  // namespace

TEST_CASE("knn on a 1-D line picks the two nearest values") {
    Matrix ref(4, 1);
    ref << 0, 1, 2, 10;
    const auto got = knn(ref, ref.row(0), 2, 0);
    CHECK(got == std::vector<Index>{1, 2});
}

TEST_CASE("knn breaks distance ties toward the smaller index") {
    Matrix ref(3, 1);
    ref << -1, 1, 5;
    RowVector q(1);
    q << 0;  // rows 0 and 1 are equidistant
    const auto got = knn(ref, q, 2, -1);
    CHECK(got == std::vector<Index>{0, 1});
}

TEST_CASE("knn matches the exhaustive sort oracle on random 3-D points") {
    const Matrix ref = random_matrix(20, 3, 11);
    for (Index qi = 0; qi < ref.rows(); ++qi) {
        CHECK(knn(ref, ref.row(qi), 5, qi) == knn_oracle(ref, ref.row(qi), 5, qi));
    }
}

TEST_CASE("knn rejects k larger than the available rows") {
    const Matrix ref = random_matrix(4, 2, 5);
    CHECK_THROWS(knn(ref, ref.row(0), 4, 0));
    CHECK_NOTHROW(knn(ref, ref.row(0), 4, -1));
}

TEST_CASE("snc produces the (K+1)s widening") {
    const Matrix x = random_matrix(150, 4, 3);
    const EnvelopeSet env = snc(x, 3);
    CHECK(env.samples.rows() == 150);
    CHECK(env.samples.cols() == 16);
    // First s columns reproduce the original matrix exactly.
    CHECK((env.samples.leftCols(4) - x).cwiseAbs().maxCoeff() == 0.0);
    // Neighbour distances are non-decreasing along each row.
    for (Index i = 0; i < x.rows(); ++i) {
        const auto& src = env.source_indices[static_cast<std::size_t>(i)];
        REQUIRE(src.size() == 4);
        double prev = -1.0;
        for (std::size_t j = 1; j < src.size(); ++j) {
            const double d = (x.row(src[j]) - x.row(i)).norm();
            CHECK(d >= prev);
            prev = d;
        }
    }
}

TEST_CASE("snc pairs identical rows as mutual first neighbours") {
    Matrix x(4, 2);
    x << 0, 0, 0, 0, 5, 5, 9, 9;
    const EnvelopeSet env = snc(x, 1);
    CHECK(env.source_indices[0][1] == 1);
    CHECK(env.source_indices[1][1] == 0);
}

TEST_CASE("snc with K=0 is a pass-through") {
    const Matrix x = random_matrix(5, 3, 21);
    const EnvelopeSet env = snc(x, 0);
    CHECK(env.samples.rows() == 5);
    CHECK(env.samples.cols() == 3);
    CHECK((env.samples - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("snc rejects n <= K") {
    const Matrix x = random_matrix(3, 2, 2);
    CHECK_THROWS(snc(x, 3));
}

TEST_CASE("snc_transform uses training neighbours without self-exclusion") {
    const Matrix train = random_matrix(12, 4, 31);
    // A query equal to a training row gets that row as first neighbour.
    Matrix query = train.row(7);
    const EnvelopeSet env = snc_transform(train, query, 3);
    CHECK(env.source_indices[0][1] == 7);
    CHECK(env.samples.cols() == 16);
}

TEST_CASE("snc_transform matches the oracle for far-away queries") {
    const Matrix train = random_matrix(15, 3, 41);
    Matrix query(1, 3);
    query << 40, 40, 40;
    const EnvelopeSet env = snc_transform(train, query, 4);
    const auto expect = knn_oracle(train, query.row(0), 4, -1);
    for (int j = 0; j < 4; ++j) {
        CHECK(env.source_indices[0][static_cast<std::size_t>(j) + 1] ==
              expect[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("snc_transform output shape") {
    const Matrix train = random_matrix(30, 4, 51);
    const Matrix query = random_matrix(10, 4, 52);
    const EnvelopeSet env = snc_transform(train, query, 3);
    CHECK(env.samples.rows() == 10);
    CHECK(env.samples.cols() == 16);
}
