#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "repad/cells.hpp"

namespace repad {

struct DetectorConfig {
    int look_back = 3;        // training window length
    int predict_forward = 1;  // forecast horizon; only 1 is supported
    std::size_t window_w = 0; // cap on retained AARE values; must be >= 3
    double sigma_multiplier = 3.0;
    CellKind cell_kind = CellKind::Lstm;
    TrainingConfig training;

    void validate() const;  // throws InvalidConfigError

    // First time index at which detection is possible: three AARE values
    // (first one at look_back + 2) must precede the current point.
    std::int64_t warmup_end() const { return look_back + 4; }
};

enum class Verdict { Warmup, Normal, Anomalous };

const char* to_string(Verdict v);

struct ThresholdSnapshot {
    double mu = 0.0;
    double sigma = 0.0;
    double thd = 0.0;
};

struct StepOutcome {
    std::int64_t t = 0;
    double value = 0.0;
    std::optional<double> predicted;          // forecast made for this index
    std::optional<double> aare;               // final AARE recorded at t
    std::optional<ThresholdSnapshot> threshold;
    Verdict verdict = Verdict::Warmup;
    bool retrained = false;   // threshold-triggered retraining ran
    bool trained = false;     // any model training ran (includes warm-up)
    bool data_error = false;  // non-finite input; point skipped
    std::chrono::nanoseconds elapsed{0};
};

/// Average absolute relative error over the last three points:
/// (1/3) * sum |actual - predicted| / max(|actual|, 1e-8).
double aare(std::span<const double> actuals, std::span<const double> predicted);

/// Detection threshold over the retained AARE history: mean plus
/// sigma_multiplier population standard deviations, computed over all
/// retained values when fewer than window_w exist and over the window_w
/// most recent otherwise. Needs at least three values.
ThresholdSnapshot threshold(std::span<const double> recent_aares,
                            std::size_t window_w, double sigma_multiplier);

/// Streaming anomaly detector. Feed points in time order through step();
/// each call trains/retrains models as required, maintains the bounded
/// AARE history, and returns the verdict for the arriving point.
///
/// Timeline for look_back = 3 (time indices start at 0):
///   t < 2          no model can exist yet.
///   2 <= t < 7     warm-up: a fresh model is trained on the three newest
///                  points at every step; forecasts accumulate, and the
///                  first AARE values appear at t = 5.
///   t >= 7         detection: AARE_t is compared with a threshold formed
///                  from AARE values strictly before t. On a breach the
///                  model is retrained on the three points before t and
///                  the forecast for t is re-issued; only if the new AARE
///                  still breaches is the point reported anomalous.
///
/// Single-owner: call step() from one logical thread at a time. Distinct
/// instances are independent.
class Detector {
public:
    explicit Detector(DetectorConfig cfg);

    StepOutcome step(double value);

    const DetectorConfig& config() const { return cfg_; }
    std::int64_t points_seen() const { return next_t_; }
    std::int64_t retrain_count() const { return retrain_events_; }
    std::int64_t train_count() const { return train_events_; }
    std::size_t retained_aare_count() const { return aares_.size(); }

    /// Retained AARE values, oldest first (at most window_w of them).
    std::vector<double> aare_history() const;

private:
    struct Model {
        CellParameters params;
        WindowNormalizer norm;
    };

    std::optional<double> lookup(const std::deque<std::pair<std::int64_t, double>>& d,
                                 std::int64_t idx) const;
    bool aare_inputs_ready(std::int64_t t) const;
    double aare_at(std::int64_t t) const;
    void train_on_recent_window(bool include_current);
    void forecast_next(std::int64_t t);
    void append_aare(std::int64_t t, double value);

    DetectorConfig cfg_;
    std::int64_t next_t_ = 0;
    std::int64_t retrain_events_ = 0;
    std::int64_t train_events_ = 0;
    std::deque<std::pair<std::int64_t, double>> recent_;  // last look_back+1 finite points
    std::deque<std::pair<std::int64_t, double>> preds_;   // forecasts by index
    std::deque<std::pair<std::int64_t, double>> aares_;   // bounded by window_w
    std::optional<Model> model_;
};

}  // namespace repad
