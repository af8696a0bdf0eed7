#include "rfveil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rfveil {

RocCurve roc_and_auc(const std::vector<double>& positive_scores,
                     const std::vector<double>& negative_scores) {
    if (positive_scores.empty() || negative_scores.empty())
        throw std::invalid_argument("roc_and_auc: both score sets must be nonempty");

    // (score, is_positive), descending by score.
    std::vector<std::pair<double, int>> all;
    all.reserve(positive_scores.size() + negative_scores.size());
    for (double s : positive_scores) all.emplace_back(s, 1);
    for (double s : negative_scores) all.emplace_back(s, 0);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;  // grouping only; ties are merged below
    });

    const std::uint64_t np = positive_scores.size();
    const std::uint64_t nn = negative_scores.size();

    RocCurve roc;
    roc.points.emplace_back(0.0, 0.0);
    roc.thresholds.push_back(std::numeric_limits<double>::infinity());

    std::uint64_t tp = 0, fp = 0;
    std::uint64_t area2 = 0;  // 2 * area * np * nn, exact
    std::size_t i = 0;
    while (i < all.size()) {
        const double s = all[i].first;
        std::uint64_t dtp = 0, dfp = 0;
        while (i < all.size() && all[i].first == s) {
            if (all[i].second) ++dtp;
            else ++dfp;
            ++i;
        }
        // Trapezoid over the tie block: width dfp, heights tp and tp+dtp.
        area2 += dfp * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        roc.points.emplace_back(static_cast<double>(fp) / static_cast<double>(nn),
                                static_cast<double>(tp) / static_cast<double>(np));
        roc.thresholds.push_back(s);
    }
    roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(np) * static_cast<double>(nn));
    return roc;
}

double brute_force_auc(const std::vector<double>& positive_scores,
                       const std::vector<double>& negative_scores) {
    if (positive_scores.empty() || negative_scores.empty())
        throw std::invalid_argument("brute_force_auc: both score sets must be nonempty");
    std::uint64_t wins2 = 0;  // 2*wins + ties
    for (double p : positive_scores)
        for (double n : negative_scores) {
            if (p > n) wins2 += 2;
            else if (p == n) wins2 += 1;
        }
    return static_cast<double>(wins2) /
           (2.0 * static_cast<double>(positive_scores.size()) *
            static_cast<double>(negative_scores.size()));
}

namespace {
std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}
}  // namespace

double spearman_rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("spearman: need >= 2 points");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;  // a constant input has no ranking
    return sxy / std::sqrt(sxx * syy);
}

double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace rfveil
