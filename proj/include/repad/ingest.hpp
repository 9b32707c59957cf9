#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "repad/scoring.hpp"

namespace repad {

/// Missing-value marker used by the air-quality dataset; runs of this value
/// are the ground-truth anomalies.
constexpr double kMissingSentinel = -200.0;

struct TimeSeries {
    std::string name;
    std::vector<double> values;
    std::chrono::seconds interval{3600};
    std::string origin;  // timestamp text of the first point, as parsed
};

struct LabeledSeries {
    TimeSeries series;
    std::vector<AnomalyLabel> labels;  // sorted, disjoint
};

/// Parses one column of the UCI air-quality CSV: semicolon delimited,
/// decimal commas, a header row with the column names, trailing empty
/// columns and blank rows. Rows with an empty first (date) field are
/// skipped. Sentinel values are preserved verbatim. When expected_rows is
/// given, a differing row count raises IntegrityError.
TimeSeries parse_air_quality(std::istream& source, const std::string& column,
                             std::optional<std::size_t> expected_rows = {});

TimeSeries load_air_quality(const std::filesystem::path& path,
                            const std::string& column,
                            std::optional<std::size_t> expected_rows = {});

/// Maximal runs of the sentinel value: a run of one index becomes a point
/// label, longer runs become collective labels spanning the run.
std::vector<AnomalyLabel> find_sentinel_runs(std::span<const double> values,
                                             double sentinel = kMissingSentinel);

LabeledSeries label_sentinels(TimeSeries series,
                              double sentinel = kMissingSentinel);

enum class SynthPattern { Constant, Sine, RandomWalk };

/// Deterministic synthetic stream with sentinel anomalies written over the
/// injected label spans. Labels must be sorted, disjoint, and inside
/// [0, length). Same arguments, same output.
LabeledSeries synth_stream(std::size_t length, SynthPattern pattern,
                           std::vector<AnomalyLabel> injected,
                           std::uint32_t seed);

}  // namespace repad
