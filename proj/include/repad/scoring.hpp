#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "repad/detector.hpp"

namespace repad {

enum class LabelKind { Point, Collective };

/// Ground-truth anomaly over inclusive time indices. Point labels have
/// start == end; collective labels span at least two indices.
struct AnomalyLabel {
    LabelKind kind = LabelKind::Point;
    std::int64_t start = 0;
    std::int64_t end = 0;
};

bool operator==(const AnomalyLabel& a, const AnomalyLabel& b);

struct ScoringConfig {
    std::int64_t k = 3;  // detection tolerance in time steps
};

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
};

struct MatchReport {
    ConfusionCounts counts;
    std::vector<bool> label_detected;          // parallel to the label list
    std::vector<std::int64_t> false_positives; // detections outside all windows
};

/// Tolerance window for a label: a point anomaly at A is credited when a
/// detection falls in [A-K, A+K]; a collective anomaly [C, D] when one
/// falls in [C-K, D]. Both inputs must be sorted ascending; labels must be
/// disjoint. Each label yields at most one TP; every detection outside all
/// windows is one FP.
ConfusionCounts match_detections(std::span<const AnomalyLabel> labels,
                                 std::span<const std::int64_t> detections,
                                 const ScoringConfig& cfg);

MatchReport match_details(std::span<const AnomalyLabel> labels,
                          std::span<const std::int64_t> detections,
                          const ScoringConfig& cfg);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

/// precision = tp/(tp+fp), recall = tp/(tp+fn); both are 1 when their
/// denominator is 0 (nothing predicted / nothing to find).
Prf prf1(const ConfusionCounts& counts);

struct TimingStats {
    double dt_train_mean_s = 0.0;
    double dt_train_std_s = 0.0;
    double dt_notrain_mean_s = 0.0;
    double dt_notrain_std_s = 0.0;
    double retrain_ratio = 0.0;  // threshold-triggered retrains / points
    std::int64_t train_steps = 0;
    std::int64_t retrain_events = 0;
    std::int64_t total_steps = 0;
};

/// Splits the stream into steps where any model training ran (warm-up
/// included) and steps without, reporting mean and population standard
/// deviation of per-step wall time for each side. The retrain ratio counts
/// only threshold-triggered retrainings.
TimingStats timing_stats(std::span<const StepOutcome> outcomes);

}  // namespace repad
