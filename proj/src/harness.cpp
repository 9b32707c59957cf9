#include "repad/harness.hpp"

#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "repad/errors.hpp"

namespace repad {
namespace {

std::string utc_now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::int64_t parse_index(const std::string& s) {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad index: " + s);
    return v;
}

const char* label_kind_name(LabelKind k) {
    return k == LabelKind::Point ? "point" : "collective";
}

std::ostream& csv_double(std::ostream& os, double v) {
    os << std::setprecision(17) << v;
    return os;
}

}  // namespace

LabeledSeries parse_synthetic_spec(const std::string& spec, std::uint32_t seed) {
    const auto parts = split(spec, ':');
    if (parts.size() < 2 || parts.size() > 3) {
        throw std::invalid_argument(
            "synthetic spec is pattern:length[:labels], got '" + spec + "'");
    }
    SynthPattern pattern;
    if (parts[0] == "constant") {
        pattern = SynthPattern::Constant;
    } else if (parts[0] == "sine") {
        pattern = SynthPattern::Sine;
    } else if (parts[0] == "walk") {
        pattern = SynthPattern::RandomWalk;
    } else {
        throw std::invalid_argument("unknown synthetic pattern '" + parts[0] +
                                    "' (use constant|sine|walk)");
    }
    const std::int64_t length = parse_index(parts[1]);
    if (length <= 0) throw std::invalid_argument("synthetic length must be > 0");

    std::vector<AnomalyLabel> labels;
    if (parts.size() == 3 && !parts[2].empty()) {
        for (const auto& entry : split(parts[2], ',')) {
            if (entry.size() < 3 || entry[1] != '@') {
                throw std::invalid_argument("bad label entry '" + entry + "'");
            }
            AnomalyLabel l;
            if (entry[0] == 'p') {
                l.kind = LabelKind::Point;
                l.start = l.end = parse_index(entry.substr(2));
            } else if (entry[0] == 'c') {
                l.kind = LabelKind::Collective;
                const auto range = split(entry.substr(2), '-');
                if (range.size() != 2) {
                    throw std::invalid_argument("bad range '" + entry + "'");
                }
                l.start = parse_index(range[0]);
                l.end = parse_index(range[1]);
            } else {
                throw std::invalid_argument("bad label entry '" + entry + "'");
            }
            labels.push_back(l);
        }
    }
    return synth_stream(static_cast<std::size_t>(length), pattern,
                        std::move(labels), seed);
}

EvaluationReport run_benchmark(const RunConfig& cfg) {
    if (cfg.synthetic.empty() && cfg.data_path.empty()) {
        throw InvalidConfigError("either a dataset or a synthetic spec is required");
    }

    LabeledSeries labeled =
        cfg.synthetic.empty()
            ? label_sentinels(load_air_quality(cfg.data_path, cfg.column))
            : parse_synthetic_spec(cfg.synthetic, cfg.detector.training.seed);

    DetectorConfig dcfg = cfg.detector;
    if (dcfg.window_w == 0) {
        dcfg.window_w = std::max<std::size_t>(labeled.series.values.size(), 3);
    }

    EvaluationReport report;
    report.config = cfg;
    report.started_at = utc_now_iso8601();
    report.series_name = labeled.series.name;
    report.series_length = labeled.series.values.size();
    report.window_w_resolved = dcfg.window_w;
    report.labels = labeled.labels;

    Detector detector(dcfg);
    report.trace.reserve(labeled.series.values.size());
    for (double v : labeled.series.values) {
        report.trace.push_back(detector.step(v));
    }

    for (const auto& o : report.trace) {
        if (o.verdict == Verdict::Anomalous) report.detections.push_back(o.t);
    }

    const MatchReport match =
        match_details(report.labels, report.detections, ScoringConfig{cfg.k});
    report.counts = match.counts;
    report.label_detected = match.label_detected;
    report.false_positives = match.false_positives;
    report.metrics = prf1(report.counts);
    report.timing = timing_stats(report.trace);

    if (!cfg.out_dir.empty()) {
        write_report(report, cfg.out_dir);
    }
    return report;
}

std::string report_to_json(const EvaluationReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["generator"] = kGeneratorVersion;
    j["started_at"] = r.started_at;

    nlohmann::json cfg;
    cfg["data_path"] = r.config.data_path;
    cfg["column"] = r.config.column;
    cfg["synthetic"] = r.config.synthetic;
    cfg["cell"] = to_string(r.config.detector.cell_kind);
    cfg["look_back"] = r.config.detector.look_back;
    cfg["predict_forward"] = r.config.detector.predict_forward;
    cfg["window_w"] = r.config.detector.window_w;  // 0 = auto
    cfg["window_w_resolved"] = r.window_w_resolved;
    cfg["sigma_multiplier"] = r.config.detector.sigma_multiplier;
    cfg["epochs"] = r.config.detector.training.epochs;
    cfg["learning_rate"] = r.config.detector.training.learning_rate;
    cfg["seed"] = r.config.detector.training.seed;
    cfg["hidden_dim"] = r.config.detector.training.hidden_dim;
    cfg["k"] = r.config.k;
    j["config"] = cfg;

    j["series"] = {{"name", r.series_name},
                   {"length", r.series_length}};

    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        labels.push_back({{"kind", label_kind_name(r.labels[i].kind)},
                          {"start", r.labels[i].start},
                          {"end", r.labels[i].end},
                          {"detected", r.label_detected.size() > i &&
                                           r.label_detected[i]}});
    }
    j["labels"] = labels;
    j["detections"] = r.detections;
    j["false_positives"] = r.false_positives;
    j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}};
    j["metrics"] = {{"precision", r.metrics.precision},
                    {"recall", r.metrics.recall},
                    {"f1", r.metrics.f1}};
    j["timing"] = {{"dt_train_mean_s", r.timing.dt_train_mean_s},
                   {"dt_train_std_s", r.timing.dt_train_std_s},
                   {"dt_notrain_mean_s", r.timing.dt_notrain_mean_s},
                   {"dt_notrain_std_s", r.timing.dt_notrain_std_s},
                   {"retrain_ratio", r.timing.retrain_ratio},
                   {"retrain_events", r.timing.retrain_events},
                   {"train_steps", r.timing.train_steps},
                   {"total_steps", r.timing.total_steps}};
    j["trace_file"] = "trace.csv";
    return j.dump(2);
}

void write_trace_csv(const EvaluationReport& report,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,value,predicted,aare,mu,sigma,thd,verdict,trained,retrained,"
           "data_error,elapsed_ns\n";
    for (const auto& o : report.trace) {
        out << o.t << ',';
        csv_double(out, o.value) << ',';
        if (o.predicted) csv_double(out, *o.predicted);
        out << ',';
        if (o.aare) csv_double(out, *o.aare);
        out << ',';
        if (o.threshold) {
            csv_double(out, o.threshold->mu) << ',';
            csv_double(out, o.threshold->sigma) << ',';
            csv_double(out, o.threshold->thd) << ',';
        } else {
            out << ",,,";
        }
        out << to_string(o.verdict) << ',' << (o.trained ? 1 : 0) << ','
            << (o.retrained ? 1 : 0) << ',' << (o.data_error ? 1 : 0) << ','
            << o.elapsed.count() << '\n';
    }
}

void write_report(const EvaluationReport& report,
                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_trace_csv(report, dir / "trace.csv");

    if (report.config.format == RunConfig::Format::Json) {
        std::ofstream out(dir / "report.json");
        if (!out) throw std::runtime_error("cannot write report.json");
        out << report_to_json(report) << '\n';
        return;
    }

    std::ofstream out(dir / "report.csv");
    if (!out) throw std::runtime_error("cannot write report.csv");
    out << "key,value\n";
    out << "schema_version," << kReportSchemaVersion << '\n';
    out << "generator," << kGeneratorVersion << '\n';
    out << "started_at," << report.started_at << '\n';
    out << "series," << report.series_name << '\n';
    out << "length," << report.series_length << '\n';
    out << "cell," << to_string(report.config.detector.cell_kind) << '\n';
    out << "look_back," << report.config.detector.look_back << '\n';
    out << "predict_forward," << report.config.detector.predict_forward << '\n';
    out << "window_w," << report.window_w_resolved << '\n';
    out << "sigma_multiplier," << report.config.detector.sigma_multiplier << '\n';
    out << "epochs," << report.config.detector.training.epochs << '\n';
    out << "learning_rate," << report.config.detector.training.learning_rate << '\n';
    out << "seed," << report.config.detector.training.seed << '\n';
    out << "hidden_dim," << report.config.detector.training.hidden_dim << '\n';
    out << "k," << report.config.k << '\n';
    out << "tp," << report.counts.tp << '\n';
    out << "fp," << report.counts.fp << '\n';
    out << "fn," << report.counts.fn << '\n';
    out << "precision,";
    csv_double(out, report.metrics.precision) << '\n';
    out << "recall,";
    csv_double(out, report.metrics.recall) << '\n';
    out << "f1,";
    csv_double(out, report.metrics.f1) << '\n';
    out << "retrain_ratio,";
    csv_double(out, report.timing.retrain_ratio) << '\n';
    out << "dt_train_mean_s,";
    csv_double(out, report.timing.dt_train_mean_s) << '\n';
    out << "dt_train_std_s,";
    csv_double(out, report.timing.dt_train_std_s) << '\n';
    out << "dt_notrain_mean_s,";
    csv_double(out, report.timing.dt_notrain_mean_s) << '\n';
    out << "dt_notrain_std_s,";
    csv_double(out, report.timing.dt_notrain_std_s) << '\n';
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        out << "label," << label_kind_name(report.labels[i].kind) << ' '
            << report.labels[i].start << '-' << report.labels[i].end << ' '
            << (report.label_detected[i] ? "detected" : "missed") << '\n';
    }
}

void emit_plot_series(const EvaluationReport& report,
                      const std::filesystem::path& dir) {
    if (report.trace.empty()) {
        throw std::invalid_argument("emit_plot_series: empty trace");
    }
    std::filesystem::create_directories(dir);

    std::ofstream aare_out(dir / "aare_thd.csv");
    if (!aare_out) throw std::runtime_error("cannot write aare_thd.csv");
    aare_out << "t,aare,thd\n";
    for (const auto& o : report.trace) {
        if (!o.aare) continue;
        aare_out << o.t << ',';
        csv_double(aare_out, *o.aare) << ',';
        if (o.threshold) csv_double(aare_out, o.threshold->thd);
        aare_out << '\n';
    }

    std::ofstream verdict_out(dir / "anomalies.csv");
    if (!verdict_out) throw std::runtime_error("cannot write anomalies.csv");
    verdict_out << "t,value,verdict\n";
    for (const auto& o : report.trace) {
        verdict_out << o.t << ',';
        csv_double(verdict_out, o.value) << ',' << to_string(o.verdict) << '\n';
    }
}

}  // namespace repad
