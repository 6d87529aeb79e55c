#include "imbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "imbench/errors.hpp"

namespace imbench {

namespace {

struct Counts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

Counts count_classes(const ScoredPredictions& sp) {
    if (sp.scores.size() != sp.labels.size()) {
        throw UndefinedMetricError("scores and labels differ in length");
    }
    Counts c;
    for (int l : sp.labels) (l == 1 ? c.positives : c.negatives)++;
    return c;
}

// Indices sorted by descending score; the threshold sweep visits groups of
// equal scores at once so exact ties contribute their trapezoid exactly.
std::vector<std::size_t> by_descending_score(const ScoredPredictions& sp) {
    std::vector<std::size_t> order(sp.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sp.scores[a] > sp.scores[b] || (sp.scores[a] == sp.scores[b] && a < b);
    });
    return order;
}

// Visits each distinct threshold in descending score order with cumulative
// (tp, fp) counts after including the whole tie group.
template <typename Fn>
void sweep_thresholds(const ScoredPredictions& sp, Fn&& fn) {
    const auto order = by_descending_score(sp);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = sp.scores[order[i]];
        std::size_t j = i;
        while (j < order.size() && sp.scores[order[j]] == threshold) {
            (sp.labels[order[j]] == 1 ? tp : fp)++;
            ++j;
        }
        fn(threshold, tp, fp);
        i = j;
    }
}

} // namespace

ConfusionCounts confusion_at(const ScoredPredictions& sp, double threshold) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < sp.scores.size(); ++i) {
        const bool predicted = sp.scores[i] >= threshold;
        const bool actual = sp.labels[i] == 1;
        if (predicted && actual) ++c.tp;
        else if (predicted && !actual) ++c.fp;
        else if (!predicted && actual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

CurvePoints roc_curve(const ScoredPredictions& sp) {
    const auto counts = count_classes(sp);
    if (counts.positives == 0 || counts.negatives == 0) {
        throw UndefinedMetricError("ROC curve needs both classes");
    }
    CurvePoints curve{CurveKind::roc, {{0.0, 0.0}}};
    const double p = static_cast<double>(counts.positives);
    const double n = static_cast<double>(counts.negatives);
    sweep_thresholds(sp, [&](double, std::size_t tp, std::size_t fp) {
        curve.points.emplace_back(static_cast<double>(fp) / n, static_cast<double>(tp) / p);
    });
    return curve;
}

CurvePoints pr_curve(const ScoredPredictions& sp) {
    const auto counts = count_classes(sp);
    if (counts.positives == 0) throw UndefinedMetricError("PR curve needs positives");
    CurvePoints curve{CurveKind::pr, {}};
    const double p = static_cast<double>(counts.positives);
    sweep_thresholds(sp, [&](double, std::size_t tp, std::size_t fp) {
        const double recall = static_cast<double>(tp) / p;
        const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) /
                                                          static_cast<double>(tp + fp);
        curve.points.emplace_back(recall, precision);
    });
    return curve;
}

double partial_roc_auc(const ScoredPredictions& sp, double fpr_cap) {
    if (!(fpr_cap > 0.0) || fpr_cap > 1.0) {
        throw UndefinedMetricError("fpr_cap must be in (0, 1]");
    }
    const auto curve = roc_curve(sp);
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        auto [x0, y0] = curve.points[i - 1];
        auto [x1, y1] = curve.points[i];
        if (x0 >= fpr_cap) break;
        if (x1 > fpr_cap) {
            // clip the crossing segment at the cap
            const double t = (fpr_cap - x0) / (x1 - x0);
            x1 = fpr_cap;
            y1 = y0 + t * (y1 - y0);
        }
        area += (x1 - x0) * (y0 + y1) / 2.0;
    }
    return area / fpr_cap;
}

double roc_auc(const ScoredPredictions& sp) { return partial_roc_auc(sp, 1.0); }

double pr_auc(const ScoredPredictions& sp) {
    const auto counts = count_classes(sp);
    if (counts.positives == 0) throw UndefinedMetricError("PR AUC needs positives");
    const double p = static_cast<double>(counts.positives);
    double area = 0.0;
    double prev_recall = 0.0;
    sweep_thresholds(sp, [&](double, std::size_t tp, std::size_t fp) {
        const double recall = static_cast<double>(tp) / p;
        const double precision =
            tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    });
    return area;
}

ScalarMetrics scalar_metrics(const ConfusionCounts& c) {
    ScalarMetrics m{};
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);

    const double tpr = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double tnr = tn + fp > 0 ? tn / (tn + fp) : 0.0;
    m.recall = tpr;
    m.balanced_accuracy = (tpr + tnr) / 2.0;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;

    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = denom > 0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    return m;
}

ScalarMetrics scalar_metrics(const ScoredPredictions& sp, double threshold) {
    return scalar_metrics(confusion_at(sp, threshold));
}

double f1_max(const ScoredPredictions& sp) {
    const auto counts = count_classes(sp);
    if (counts.positives == 0) throw UndefinedMetricError("F1 max needs positives");
    const double p = static_cast<double>(counts.positives);
    double best = 0.0;
    sweep_thresholds(sp, [&](double, std::size_t tp, std::size_t fp) {
        if (tp == 0) return; // precision and recall both 0 -> F1 defined as 0
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = static_cast<double>(tp) / p;
        best = std::max(best, 2.0 * precision * recall / (precision + recall));
    });
    return best;
}

} // namespace imbench
