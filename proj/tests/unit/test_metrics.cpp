#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rfveil/metrics.hpp"
#include "rfveil/rng.hpp"

namespace {

double trapezoid_area(const rfveil::RocCurve& roc) {
    double area = 0.0;
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        const double dx = roc.points[i].first - roc.points[i - 1].first;
        const double my = 0.5 * (roc.points[i].second + roc.points[i - 1].second);
        area += dx * my;
    }
    return area;
}

}  // namespace

TEST_CASE("auc equals the pairwise win fraction on hand-checked sets") {
    // One negative (0.95) outscores both positives: 2 wins out of 4 pairs.
    rfveil::RocCurve mixed = rfveil::roc_and_auc({0.9, 0.8}, {0.1, 0.95});
    CHECK(mixed.auc == 0.5);

    rfveil::RocCurve separated = rfveil::roc_and_auc({0.9, 0.8}, {0.1, 0.2});
    CHECK(separated.auc == 1.0);
    // Perfect separation passes through the (0, 1) corner.
    bool corner = false;
    for (const auto& [fpr, tpr] : separated.points)
        corner = corner || (fpr == 0.0 && tpr == 1.0);
    CHECK(corner);

    rfveil::RocCurve inverted = rfveil::roc_and_auc({0.1, 0.2}, {0.9, 0.8});
    CHECK(inverted.auc == 0.0);

    // Tie between a positive and a negative counts half a win:
    // pairs (0.5,0.5)=0.5, (0.5,0.3)=1, (0.7,0.5)=1, (0.7,0.3)=1 -> 3.5/4.
    rfveil::RocCurve tied = rfveil::roc_and_auc({0.5, 0.7}, {0.5, 0.3});
    CHECK(tied.auc == 0.875);

    CHECK(rfveil::brute_force_auc({0.9, 0.8}, {0.1, 0.95}) == 0.5);
    CHECK(rfveil::brute_force_auc({0.5, 0.7}, {0.5, 0.3}) == 0.875);

    CHECK_THROWS_AS(rfveil::roc_and_auc({}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::roc_and_auc({0.1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::brute_force_auc({}, {0.1}), std::invalid_argument);
}

TEST_CASE("threshold-sweep auc matches the quadratic reference bit for bit") {
    rfveil::Rng rng(2024);
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t np = 1 + rng.uniform_index(300);
        const std::size_t nn = 1 + rng.uniform_index(300);
        std::vector<double> pos(np), neg(nn);
        // Quantized scores force plenty of exact ties across the two sets.
        for (auto& v : pos) v = std::floor(rng.uniform() * 20.0) / 20.0 + 0.02;
        for (auto& v : neg) v = std::floor(rng.uniform() * 20.0) / 20.0;
        const rfveil::RocCurve roc = rfveil::roc_and_auc(pos, neg);
        const double ref = rfveil::brute_force_auc(pos, neg);
        CHECK(roc.auc == ref);
        CHECK(trapezoid_area(roc) == doctest::Approx(roc.auc).epsilon(1e-12));
    }
}

TEST_CASE("roc curves run from (0,0) to (1,1) with monotone coordinates") {
    rfveil::Rng rng(7);
    std::vector<double> pos(40), neg(60);
    for (auto& v : pos) v = rng.gaussian() + 1.0;
    for (auto& v : neg) v = rng.gaussian();
    const rfveil::RocCurve roc = rfveil::roc_and_auc(pos, neg);

    REQUIRE(roc.points.size() >= 2);
    REQUIRE(roc.thresholds.size() == roc.points.size());
    CHECK(roc.points.front().first == 0.0);
    CHECK(roc.points.front().second == 0.0);
    CHECK(roc.points.back().first == 1.0);
    CHECK(roc.points.back().second == 1.0);
    CHECK(roc.thresholds.front() == std::numeric_limits<double>::infinity());
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        CHECK(roc.points[i].first >= roc.points[i - 1].first);
        CHECK(roc.points[i].second >= roc.points[i - 1].second);
        CHECK(roc.thresholds[i] < roc.thresholds[i - 1]);
    }
    CHECK(roc.auc > 0.6);  // shifted Gaussians separate better than chance
}

TEST_CASE("spearman correlation matches rank-based references") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> y = {5.0, 6.0, 7.0, 8.0, 7.0};
    CHECK(rfveil::spearman_rank_correlation(x, y) ==
          doctest::Approx(0.8207826816681233).epsilon(1e-12));

    // Average ranks for the tied pair in the first argument.
    CHECK(rfveil::spearman_rank_correlation({1.0, 2.0, 2.0, 3.0}, {10.0, 20.0, 30.0, 40.0}) ==
          doctest::Approx(0.9486832980505139).epsilon(1e-12));

    CHECK(rfveil::spearman_rank_correlation({1.0, 2.0, 3.0}, {30.0, 20.0, 10.0}) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rfveil::spearman_rank_correlation({1.0, 2.0, 3.0}, {10.0, 200.0, 3000.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Monotone transforms of the data cannot change rank correlation.
    rfveil::Rng rng(31);
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.gaussian();
        b[i] = rng.gaussian() + 0.5 * a[i];
    }
    std::vector<double> a_exp = a;
    for (auto& v : a_exp) v = std::exp(v);
    CHECK(rfveil::spearman_rank_correlation(a, b) ==
          doctest::Approx(rfveil::spearman_rank_correlation(a_exp, b)).epsilon(1e-12));

    CHECK(rfveil::spearman_rank_correlation({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK_THROWS_AS(rfveil::spearman_rank_correlation({1.0}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(rfveil::spearman_rank_correlation({1.0}, {2.0}), std::invalid_argument);
}

TEST_CASE("ks distance is the largest gap between empirical cdfs") {
    CHECK(rfveil::ks_distance({1.0, 2.0, 3.0}, {1.5, 2.5}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rfveil::ks_distance({0.0, 0.1, 0.2, 0.3}, {1.0, 1.1}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rfveil::ks_distance({1.0, 2.0, 2.0, 3.0}, {2.0, 2.0, 4.0}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const std::vector<double> same = {0.4, 0.1, 0.9, 0.5};
    CHECK(rfveil::ks_distance(same, same) == 0.0);

    // Symmetric in its arguments, and bounded by [0, 1].
    rfveil::Rng rng(12);
    std::vector<double> a(33), b(57);
    for (auto& v : a) v = rng.gaussian();
    for (auto& v : b) v = rng.gaussian() + 0.3;
    const double d_ab = rfveil::ks_distance(a, b);
    CHECK(d_ab == rfveil::ks_distance(b, a));
    CHECK(d_ab > 0.0);
    CHECK(d_ab <= 1.0);

    CHECK_THROWS_AS(rfveil::ks_distance({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::ks_distance({1.0}, {}), std::invalid_argument);
}
