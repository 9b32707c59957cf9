#include "repad/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "repad/errors.hpp"

namespace repad {
namespace {

struct Window {
    std::int64_t lo;
    std::int64_t hi;
};

Window tolerance_window(const AnomalyLabel& label, std::int64_t k) {
    if (label.kind == LabelKind::Point) {
        return {label.start - k, label.end + k};
    }
    return {label.start - k, label.end};
}

void validate_inputs(std::span<const AnomalyLabel> labels,
                     std::span<const std::int64_t> detections) {
    for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        if (labels[i + 1].start <= labels[i].end) {
            throw std::invalid_argument("labels must be sorted and disjoint");
        }
    }
    for (const auto& l : labels) {
        if (l.end < l.start ||
            (l.kind == LabelKind::Point && l.start != l.end) ||
            (l.kind == LabelKind::Collective && l.end <= l.start)) {
            throw std::invalid_argument("malformed anomaly label");
        }
    }
    if (!std::is_sorted(detections.begin(), detections.end())) {
        throw std::invalid_argument("detections must be sorted ascending");
    }
}

}  // namespace

bool operator==(const AnomalyLabel& a, const AnomalyLabel& b) {
    return a.kind == b.kind && a.start == b.start && a.end == b.end;
}

MatchReport match_details(std::span<const AnomalyLabel> labels,
                          std::span<const std::int64_t> detections,
                          const ScoringConfig& cfg) {
    validate_inputs(labels, detections);

    MatchReport report;
    report.label_detected.resize(labels.size(), false);

    std::vector<Window> windows;
    windows.reserve(labels.size());
    for (const auto& l : labels) windows.push_back(tolerance_window(l, cfg.k));

    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::lower_bound(detections.begin(), detections.end(),
                                   windows[i].lo);
        const bool hit = it != detections.end() && *it <= windows[i].hi;
        report.label_detected[i] = hit;
        if (hit) {
            ++report.counts.tp;
        } else {
            ++report.counts.fn;
        }
    }

    // Windows are sorted by lo (labels are disjoint and sorted) but their
    // ends need not be monotone; a prefix maximum makes membership a single
    // binary search per detection.
    std::vector<std::int64_t> lows;
    std::vector<std::int64_t> prefix_max_hi;
    lows.reserve(windows.size());
    prefix_max_hi.reserve(windows.size());
    for (const auto& w : windows) {
        lows.push_back(w.lo);
        const std::int64_t prev =
            prefix_max_hi.empty() ? w.hi : std::max(prefix_max_hi.back(), w.hi);
        prefix_max_hi.push_back(prev);
    }

    for (std::int64_t d : detections) {
        auto it = std::upper_bound(lows.begin(), lows.end(), d);
        bool covered = false;
        if (it != lows.begin()) {
            const std::size_t idx = static_cast<std::size_t>(it - lows.begin()) - 1;
            covered = prefix_max_hi[idx] >= d;
        }
        if (!covered) {
            ++report.counts.fp;
            report.false_positives.push_back(d);
        }
    }
    return report;
}

ConfusionCounts match_detections(std::span<const AnomalyLabel> labels,
                                 std::span<const std::int64_t> detections,
                                 const ScoringConfig& cfg) {
    return match_details(labels, detections, cfg).counts;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    if (denom == 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

Prf prf1(const ConfusionCounts& c) {
    Prf r;
    r.precision = (c.tp + c.fp == 0)
                      ? 1.0
                      : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    r.recall = (c.tp + c.fn == 0)
                   ? 1.0
                   : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

TimingStats timing_stats(std::span<const StepOutcome> outcomes) {
    if (outcomes.empty()) {
        throw EmptyStreamError("timing_stats: no outcomes");
    }

    // Two-pass mean / population std per partition.
    auto stats = [&outcomes](bool trained, double& mean, double& stddev,
                             std::int64_t& count) {
        double sum = 0.0;
        count = 0;
        for (const auto& o : outcomes) {
            if (o.trained == trained) {
                sum += std::chrono::duration<double>(o.elapsed).count();
                ++count;
            }
        }
        if (count == 0) {
            mean = 0.0;
            stddev = 0.0;
            return;
        }
        mean = sum / static_cast<double>(count);
        double var = 0.0;
        for (const auto& o : outcomes) {
            if (o.trained == trained) {
                const double d =
                    std::chrono::duration<double>(o.elapsed).count() - mean;
                var += d * d;
            }
        }
        stddev = std::sqrt(var / static_cast<double>(count));
    };

    TimingStats s;
    s.total_steps = static_cast<std::int64_t>(outcomes.size());
    stats(true, s.dt_train_mean_s, s.dt_train_std_s, s.train_steps);
    std::int64_t notrain_count = 0;
    stats(false, s.dt_notrain_mean_s, s.dt_notrain_std_s, notrain_count);
    for (const auto& o : outcomes) {
        if (o.retrained) ++s.retrain_events;
    }
    s.retrain_ratio = static_cast<double>(s.retrain_events) /
                      static_cast<double>(outcomes.size());
    return s;
}

}  // namespace repad
