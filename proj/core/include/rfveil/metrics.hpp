#pragma once

#include <utility>
#include <vector>

namespace rfveil {

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    std::vector<double> thresholds;                 // aligned with points
    double auc = 0.0;
};

// Threshold sweep over all distinct scores; higher score = more positive.
// The AUC is computed with exact integer arithmetic so it equals the
// Mann-Whitney statistic (pairwise wins + half ties) bit-for-bit.
RocCurve roc_and_auc(const std::vector<double>& positive_scores,
                     const std::vector<double>& negative_scores);

// O(n_pos * n_neg) reference: P(pos > neg) + 0.5 P(pos == neg).
double brute_force_auc(const std::vector<double>& positive_scores,
                       const std::vector<double>& negative_scores);

// Spearman rank correlation with average ranks for ties.
double spearman_rank_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample Kolmogorov-Smirnov distance: sup |F_a - F_b|.
double ks_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rfveil
