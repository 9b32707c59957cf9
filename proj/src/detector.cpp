#include "repad/detector.hpp"

#include <algorithm>
#include <cmath>

#include "repad/errors.hpp"

namespace repad {
namespace {

constexpr double kAareDenominatorFloor = 1e-8;

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Warmup: return "warmup";
    case Verdict::Normal: return "normal";
    case Verdict::Anomalous: return "anomalous";
    }
    return "unknown";
}

void DetectorConfig::validate() const {
    if (look_back < 2) {
        throw InvalidConfigError("look_back must be at least 2");
    }
    if (predict_forward != 1) {
        throw InvalidConfigError("only predict_forward = 1 is supported");
    }
    if (window_w < 3) {
        throw InvalidConfigError("window_w must be at least 3");
    }
    if (sigma_multiplier <= 0.0) {
        throw InvalidConfigError("sigma_multiplier must be positive");
    }
    if (training.epochs < 1 || training.learning_rate <= 0.0 ||
        training.hidden_dim < 1) {
        throw InvalidConfigError("invalid training configuration");
    }
}

double aare(std::span<const double> actuals, std::span<const double> predicted) {
    if (actuals.size() != 3 || predicted.size() != 3) {
        throw std::invalid_argument("aare spans the last three points");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!std::isfinite(actuals[i]) || !std::isfinite(predicted[i])) {
            throw NumericInputError("aare inputs must be finite");
        }
        const double denom = std::max(std::abs(actuals[i]), kAareDenominatorFloor);
        sum += std::abs(actuals[i] - predicted[i]) / denom;
    }
    return sum / 3.0;
}

ThresholdSnapshot threshold(std::span<const double> recent_aares,
                            std::size_t window_w, double sigma_multiplier) {
    const std::size_t count = std::min(recent_aares.size(), window_w);
    if (count < 3) {
        throw InsufficientHistoryError(
            "threshold needs at least three AARE values");
    }
    const double* first = recent_aares.data() + (recent_aares.size() - count);
    double mu = 0.0;
    for (std::size_t i = 0; i < count; ++i) mu += first[i];
    mu /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        var += (first[i] - mu) * (first[i] - mu);
    }
    var /= static_cast<double>(count);  // population variance
    ThresholdSnapshot s;
    s.mu = mu;
    s.sigma = std::sqrt(var);
    s.thd = mu + sigma_multiplier * s.sigma;
    return s;
}

Detector::Detector(DetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<double> Detector::aare_history() const {
    std::vector<double> out;
    out.reserve(aares_.size());
    for (const auto& [idx, v] : aares_) out.push_back(v);
    return out;
}

std::optional<double> Detector::lookup(
    const std::deque<std::pair<std::int64_t, double>>& d, std::int64_t idx) const {
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
        if (it->first == idx) return it->second;
        if (it->first < idx) break;  // entries ascend in index
    }
    return std::nullopt;
}

bool Detector::aare_inputs_ready(std::int64_t t) const {
    for (std::int64_t y = t - 2; y <= t; ++y) {
        if (!lookup(recent_, y) || !lookup(preds_, y)) return false;
    }
    return true;
}

double Detector::aare_at(std::int64_t t) const {
    double actual[3];
    double predicted[3];
    for (std::int64_t y = t - 2; y <= t; ++y) {
        actual[y - (t - 2)] = *lookup(recent_, y);
        predicted[y - (t - 2)] = *lookup(preds_, y);
    }
    return aare(actual, predicted);
}

// Trains a fresh model on the newest look_back points, optionally leaving
// out the point that just arrived (the retraining rule uses the window that
// ends one step before the current point).
void Detector::train_on_recent_window(bool include_current) {
    const std::size_t lb = static_cast<std::size_t>(cfg_.look_back);
    const std::size_t skip = include_current ? 0 : 1;
    std::vector<double> window(lb);
    const std::size_t base = recent_.size() - lb - skip;
    for (std::size_t i = 0; i < lb; ++i) window[i] = recent_[base + i].second;
    TrainedModel m = train_window(cfg_.cell_kind, window, cfg_.training);
    model_ = Model{std::move(m.params), m.normalizer};
    ++train_events_;
}

// Forecast for t+1 from the window ending at the current point.
void Detector::forecast_next(std::int64_t t) {
    const std::size_t lb = static_cast<std::size_t>(cfg_.look_back);
    std::vector<double> window(lb);
    const std::size_t base = recent_.size() - lb;
    for (std::size_t i = 0; i < lb; ++i) window[i] = recent_[base + i].second;
    const double value = predict_next(model_->params, model_->norm, window);
    preds_.emplace_back(t + 1, value);
}

void Detector::append_aare(std::int64_t t, double value) {
    aares_.emplace_back(t, value);
    while (aares_.size() > cfg_.window_w) aares_.pop_front();
}

StepOutcome Detector::step(double value) {
    const auto start = std::chrono::steady_clock::now();
    const std::int64_t t = next_t_++;
    const std::int64_t lb = cfg_.look_back;

    StepOutcome out;
    out.t = t;
    out.value = value;

    if (!std::isfinite(value)) {
        // The point is consumed but takes no part in prediction or
        // thresholding; downstream steps re-prime the forecast chain.
        out.data_error = true;
        out.verdict = (t < cfg_.warmup_end()) ? Verdict::Warmup : Verdict::Normal;
        out.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - start);
        return out;
    }

    recent_.emplace_back(t, value);
    while (recent_.size() > static_cast<std::size_t>(lb) + 1) recent_.pop_front();

    if (t < lb - 1) {
        out.verdict = Verdict::Warmup;
    } else if (t < cfg_.warmup_end()) {
        // Warm-up: a fresh model at every point, forecasting the next one.
        train_on_recent_window(/*include_current=*/true);
        out.trained = true;
        out.predicted = lookup(preds_, t);
        forecast_next(t);
        if (aare_inputs_ready(t)) {
            const double a = aare_at(t);
            append_aare(t, a);
            out.aare = a;
        }
        out.verdict = Verdict::Warmup;
    } else {
        out.predicted = lookup(preds_, t);
        if (!aare_inputs_ready(t)) {
            // A data gap broke the forecast chain; train afresh so AARE can
            // resume once three consecutive forecasts exist again.
            if (recent_.size() >= static_cast<std::size_t>(lb)) {
                train_on_recent_window(/*include_current=*/true);
                out.trained = true;
                forecast_next(t);
            }
            out.verdict = Verdict::Normal;
        } else {
            const double a = aare_at(t);
            if (aares_.size() < 3) {
                // Not enough history before t for a threshold yet (first
                // eligible step): record and move on.
                append_aare(t, a);
                out.aare = a;
                forecast_next(t);
                out.verdict = Verdict::Normal;
            } else {
                const auto hist = aare_history();
                const ThresholdSnapshot snap =
                    threshold(hist, cfg_.window_w, cfg_.sigma_multiplier);
                out.threshold = snap;
                if (a <= snap.thd) {
                    append_aare(t, a);
                    out.aare = a;
                    forecast_next(t);  // current model preserved
                    out.verdict = Verdict::Normal;
                } else {
                    // Breach: retrain on the look_back points before t and
                    // re-issue the forecast for t.
                    train_on_recent_window(/*include_current=*/false);
                    ++retrain_events_;
                    out.retrained = true;
                    out.trained = true;

                    std::vector<double> window(static_cast<std::size_t>(lb));
                    const std::size_t base = recent_.size() - lb - 1;
                    for (std::size_t i = 0; i < window.size(); ++i) {
                        window[i] = recent_[base + i].second;
                    }
                    const double re_predicted =
                        predict_next(model_->params, model_->norm, window);
                    for (auto& [idx, v] : preds_) {
                        if (idx == t) v = re_predicted;
                    }
                    out.predicted = re_predicted;

                    const double a2 = aare_at(t);
                    out.verdict =
                        (a2 < snap.thd) ? Verdict::Normal : Verdict::Anomalous;
                    append_aare(t, a2);
                    out.aare = a2;
                    forecast_next(t);  // adopted model forecasts t+1
                }
            }
        }
    }

    while (!preds_.empty() && preds_.front().first < t - 1) preds_.pop_front();

    out.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    return out;
}

}  // namespace repad
