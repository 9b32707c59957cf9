#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "repad/detector.hpp"
#include "repad/ingest.hpp"
#include "repad/scoring.hpp"

namespace repad {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kGeneratorVersion = "repad 1.0.0";

struct RunConfig {
    std::string data_path;  // dataset CSV; empty when synthetic is set
    std::string column;     // column to extract from the CSV
    std::string synthetic;  // synthetic spec, e.g. "sine:2000:p@500,c@800-840"
    DetectorConfig detector;  // window_w == 0 resolves to the series length
    std::int64_t k = 3;
    std::string out_dir;  // empty: nothing written to disk
    enum class Format { Json, Csv } format = Format::Json;
};

struct EvaluationReport {
    RunConfig config;
    std::string started_at;  // UTC, ISO 8601
    std::string series_name;
    std::size_t series_length = 0;
    std::size_t window_w_resolved = 0;
    std::vector<AnomalyLabel> labels;
    std::vector<bool> label_detected;
    std::vector<std::int64_t> detections;
    std::vector<std::int64_t> false_positives;
    ConfusionCounts counts;
    Prf metrics;
    TimingStats timing;
    std::vector<StepOutcome> trace;  // one record per stream point
};

/// Parses "pattern:length[:labels]" where pattern is constant|sine|walk and
/// labels is a comma list of p@IDX / c@START-END entries.
LabeledSeries parse_synthetic_spec(const std::string& spec, std::uint32_t seed);

/// Streams the configured series through one detector, scores the anomalous
/// verdicts against the ground-truth labels, and (when out_dir is set)
/// writes the report and the per-point trace. Deterministic apart from the
/// elapsed-time fields.
EvaluationReport run_benchmark(const RunConfig& cfg);

/// Serialized report, excluding the trace (which goes to its own CSV).
std::string report_to_json(const EvaluationReport& report);

void write_trace_csv(const EvaluationReport& report,
                     const std::filesystem::path& path);

/// Writes report.json or report.csv plus trace.csv under dir.
void write_report(const EvaluationReport& report,
                  const std::filesystem::path& dir);

/// Plot-ready extracts: aare_thd.csv (t, aare, thd wherever an AARE was
/// recorded) and anomalies.csv (t, value, verdict for every point).
void emit_plot_series(const EvaluationReport& report,
                      const std::filesystem::path& dir);

}  // namespace repad
