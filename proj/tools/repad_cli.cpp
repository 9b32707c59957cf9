// Benchmark runner: streams a series through the detector, prints the
// summary, and optionally writes report/trace/plot files.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "repad/harness.hpp"

namespace {

repad::CellKind parse_cell(const std::string& name) {
    if (name == "rnn") return repad::CellKind::VanillaRnn;
    if (name == "lstm") return repad::CellKind::Lstm;
    if (name == "gru") return repad::CellKind::Gru;
    throw CLI::ValidationError("--cell must be rnn, lstm, or gru");
}

void print_summary(const repad::EvaluationReport& r) {
    std::printf("series           %s (%zu points, W=%zu)\n",
                r.series_name.c_str(), r.series_length, r.window_w_resolved);
    std::printf("labels           %zu (", r.labels.size());
    std::size_t points = 0;
    for (const auto& l : r.labels) {
        if (l.kind == repad::LabelKind::Point) ++points;
    }
    std::printf("%zu point, %zu collective)\n", points, r.labels.size() - points);
    std::printf("detections       %zu anomalous points\n", r.detections.size());
    std::printf("tp/fp/fn         %lld / %lld / %lld\n",
                static_cast<long long>(r.counts.tp),
                static_cast<long long>(r.counts.fp),
                static_cast<long long>(r.counts.fn));
    std::printf("precision        %.3f\n", r.metrics.precision);
    std::printf("recall           %.3f\n", r.metrics.recall);
    std::printf("f1               %.3f\n", r.metrics.f1);
    std::printf("retrain ratio    %.4f (%lld events)\n", r.timing.retrain_ratio,
                static_cast<long long>(r.timing.retrain_events));
    std::printf("dt-train         %.6fs avg, %.6fs std (%lld steps)\n",
                r.timing.dt_train_mean_s, r.timing.dt_train_std_s,
                static_cast<long long>(r.timing.train_steps));
    std::printf("dt-notrain       %.6fs avg, %.6fs std\n",
                r.timing.dt_notrain_mean_s, r.timing.dt_notrain_std_s);
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        if (!r.label_detected[i]) {
            std::printf("missed window    [%lld, %lld]\n",
                        static_cast<long long>(r.labels[i].start),
                        static_cast<long long>(r.labels[i].end));
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time lightweight time-series anomaly detection benchmark"};

    std::string data_path;
    std::string column;
    std::string synthetic;
    std::string cell = "lstm";
    std::string window_w = "auto";
    std::string out_dir;
    std::string format = "json";
    bool assert_bands = false;
    repad::RunConfig cfg;

    app.add_option("--data", data_path, "Air-quality CSV file");
    app.add_option("--column", column, "Series column name, e.g. PT08.S1(CO)");
    app.add_option("--synthetic", synthetic,
                   "Synthetic spec pattern:length[:labels] "
                   "(e.g. sine:2000:p@500,c@800-840)");
    app.add_option("--cell", cell, "Recurrent cell: rnn|lstm|gru")
        ->capture_default_str();
    app.add_option("--epochs", cfg.detector.training.epochs, "Training epochs")
        ->capture_default_str();
    app.add_option("--lr", cfg.detector.training.learning_rate, "Learning rate")
        ->capture_default_str();
    app.add_option("--hidden", cfg.detector.training.hidden_dim, "Hidden units")
        ->capture_default_str();
    app.add_option("--seed", cfg.detector.training.seed, "Random seed")
        ->capture_default_str();
    app.add_option("--lookback", cfg.detector.look_back, "Look-back window")
        ->capture_default_str();
    app.add_option("--window-w", window_w,
                   "AARE history bound W (number or 'auto' = series length)")
        ->capture_default_str();
    app.add_option("--k", cfg.k, "Detection tolerance K")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory for report/trace/plots");
    app.add_option("--format", format, "Report format: json|csv")
        ->capture_default_str();
    app.add_flag("--assert", assert_bands,
                 "Exit nonzero unless recall >= 0.90, F1 >= 0.85, "
                 "retrain ratio <= 0.05, and dt-train > dt-notrain");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synthetic.empty() && (data_path.empty() || column.empty())) {
            std::fprintf(stderr,
                         "error: provide --synthetic or both --data and --column\n");
            return 1;
        }
        cfg.data_path = data_path;
        cfg.column = column;
        cfg.synthetic = synthetic;
        cfg.out_dir = out_dir;
        cfg.detector.cell_kind = parse_cell(cell);
        if (format == "json") {
            cfg.format = repad::RunConfig::Format::Json;
        } else if (format == "csv") {
            cfg.format = repad::RunConfig::Format::Csv;
        } else {
            std::fprintf(stderr, "error: --format must be json or csv\n");
            return 1;
        }
        if (window_w == "auto") {
            cfg.detector.window_w = 0;
        } else {
            try {
                cfg.detector.window_w = std::stoull(window_w);
            } catch (const std::exception&) {
                std::fprintf(stderr,
                             "error: --window-w takes a number or 'auto'\n");
                return 1;
            }
        }

        const repad::EvaluationReport report = repad::run_benchmark(cfg);
        print_summary(report);
        if (!out_dir.empty()) {
            repad::emit_plot_series(report, out_dir);
            std::printf("wrote report, trace, and plot files to %s\n",
                        out_dir.c_str());
        }

        if (assert_bands) {
            const bool ok = report.metrics.recall >= 0.90 &&
                            report.metrics.f1 >= 0.85 &&
                            report.timing.retrain_ratio <= 0.05 &&
                            report.timing.dt_train_mean_s >
                                report.timing.dt_notrain_mean_s;
            if (!ok) {
                std::fprintf(stderr, "acceptance bands not met\n");
                return 2;
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
