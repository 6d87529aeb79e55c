#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace imbench {

// Continuous scores (higher = more minority-like) with true labels on a
// held-out set. Input to every curve metric.
struct ScoredPredictions {
    std::vector<double> scores;
    std::vector<int> labels; // 1 = positive/minority, 0 = negative/majority
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

enum class CurveKind { roc, pr };

// Threshold-sweep curve. ROC points are (FPR, TPR) from (0,0) to (1,1);
// PR points are (recall, precision) at each achieved threshold.
struct CurvePoints {
    CurveKind kind;
    std::vector<std::pair<double, double>> points;
};

// Predict positive iff score >= threshold.
ConfusionCounts confusion_at(const ScoredPredictions& sp, double threshold);

CurvePoints roc_curve(const ScoredPredictions& sp);
CurvePoints pr_curve(const ScoredPredictions& sp);

// Trapezoidal area under the ROC curve over all distinct thresholds; equals
// P(score+ > score-) + P(tie)/2. Throws UndefinedMetricError on single-class
// input.
double roc_auc(const ScoredPredictions& sp);

// Average precision: sum of precision * recall-increment over descending
// thresholds (no linear interpolation between PR points). Throws
// UndefinedMetricError when there are no positives.
double pr_auc(const ScoredPredictions& sp);

// Trapezoidal ROC area restricted to FPR in [0, fpr_cap], right endpoint
// interpolated on the crossing segment, normalized by fpr_cap so a perfect
// ranking scores 1. fpr_cap = 1 reproduces roc_auc exactly.
double partial_roc_auc(const ScoredPredictions& sp, double fpr_cap);

struct ScalarMetrics {
    double balanced_accuracy;
    double precision; // 0 when tp+fp == 0
    double recall;
    double mcc; // 0 when any denominator factor is 0
};

ScalarMetrics scalar_metrics(const ScoredPredictions& sp, double threshold);
ScalarMetrics scalar_metrics(const ConfusionCounts& c);

// Maximum F1 over all distinct-score thresholds, with 0/0 treated as 0.
double f1_max(const ScoredPredictions& sp);

} // namespace imbench
