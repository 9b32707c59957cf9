#include "support/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace testsupport {
namespace {

struct ColumnSpec {
    double level;
    double amp_day;
    double amp_week;
    double phase;
    double noise_sigma;
    std::uint32_t seed;
};

// Air-sensor-like dynamics: daily and weekly cycles over a baseline with
// mildly autocorrelated noise. The baseline-to-sentinel contrast is chosen
// so a missing-value jump dominates the drift the detector sees between
// retrainings.
const ColumnSpec kSpecs[3] = {
    {1150.0, 190.0, 55.0, 1.10, 15.0, 5001},
    {1000.0, 165.0, 50.0, 2.30, 13.0, 5002},
    {1300.0, 215.0, 60.0, 0.40, 17.0, 5003},
};

double uniform01(std::mt19937& rng) {
    return std::ldexp(static_cast<double>(rng()), -32);
}

int days_in_month(int year, int month) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0))) {
        return 29;
    }
    return d[month - 1];
}

struct HourClock {
    int year = 2004, month = 3, day = 10, hour = 18;

    void advance() {
        if (++hour < 24) return;
        hour = 0;
        if (++day <= days_in_month(year, month)) return;
        day = 1;
        if (++month <= 12) return;
        month = 1;
        ++year;
    }

    std::string date() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%02d/%02d/%04d", day, month, year);
        return buf;
    }

    std::string time() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%02d.00.00", hour);
        return buf;
    }
};

// One decimal place, decimal comma.
std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    for (char& c : buf) {
        if (c == '.') c = ',';
    }
    return buf;
}

}  // namespace

std::vector<repad::AnomalyLabel> surrogate_labels() {
    using repad::AnomalyLabel;
    using repad::LabelKind;
    std::vector<AnomalyLabel> labels{
        {LabelKind::Point, 700, 700},
        {LabelKind::Collective, 1230, 1238},
        {LabelKind::Collective, 1790, 1795},
        {LabelKind::Collective, 2340, 2361},
        {LabelKind::Point, 2910, 2910},
        {LabelKind::Collective, 3450, 3455},
        {LabelKind::Collective, 4010, 4017},
        {LabelKind::Collective, 4560, 4565},
        {LabelKind::Point, 5110, 5110},
        {LabelKind::Collective, 5660, 5668},
        {LabelKind::Collective, 6210, 6214},
        {LabelKind::Collective, 6760, 6771},
        {LabelKind::Collective, 7310, 7315},
        {LabelKind::Collective, 7860, 7887},
        {LabelKind::Collective, 8410, 8415},
        {LabelKind::Collective, 8960, 8967},
    };
    return labels;
}

std::vector<double> surrogate_column_values(std::size_t column_index) {
    if (column_index >= 3) throw std::out_of_range("surrogate column index");
    const ColumnSpec& spec = kSpecs[column_index];
    std::mt19937 rng(spec.seed);

    std::vector<double> values(kSurrogateRows);
    double noise = 0.0;
    for (std::size_t t = 0; t < kSurrogateRows; ++t) {
        const double td = static_cast<double>(t);
        // cycles fade in over the first days so the detector's error history
        // forms on quiet data first
        const double ramp = std::min(1.0, td / 300.0);
        noise = 0.75 * noise +
                spec.noise_sigma * (2.0 * uniform01(rng) - 1.0);
        double v = spec.level +
                   ramp * spec.amp_day *
                       std::sin(2.0 * M_PI * td / 24.0 + spec.phase) +
                   ramp * spec.amp_week *
                       std::sin(2.0 * M_PI * td / 168.0 + 0.5) +
                   noise;
        values[t] = std::max(v, 250.0);
    }

    for (const auto& l : surrogate_labels()) {
        for (std::int64_t i = l.start; i <= l.end; ++i) {
            values[static_cast<std::size_t>(i)] = -200.0;
        }
    }
    return values;
}

SurrogateBenchmark write_surrogate_benchmark(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    SurrogateBenchmark bench;
    bench.csv_path = dir / "air_quality_surrogate.csv";
    bench.labels = surrogate_labels();
    bench.columns = surrogate_columns();

    std::vector<std::vector<double>> cols(3);
    for (std::size_t c = 0; c < 3; ++c) cols[c] = surrogate_column_values(c);

    std::ofstream out(bench.csv_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + bench.csv_path.string());
    }
    out << "Date;Time;CO(GT);PT08.S1(CO);NMHC(GT);C6H6(GT);PT08.S2(NMHC);"
           "NOx(GT);PT08.S3(NOx);NO2(GT);PT08.S4(NO2);PT08.S5(O3);T;RH;AH;;\r\n";

    HourClock clock;
    for (std::size_t t = 0; t < kSurrogateRows; ++t) {
        out << clock.date() << ';' << clock.time() << ';';
        out << "2,0;";                            // CO(GT) filler
        out << format_value(cols[0][t]) << ';';   // PT08.S1(CO)
        out << "150;";                            // NMHC(GT) filler
        out << format_value(cols[1][t]) << ';';   // C6H6(GT)
        out << format_value(cols[2][t]) << ';';   // PT08.S2(NMHC)
        out << "166;1056;113;1692;1268;13,6;48,9;0,7578;;\r\n";
        clock.advance();
    }
    // the published file ends with filler rows and blank lines
    out << ";;;;;;;;;;;;;;;;\r\n\r\n";
    return bench;
}

}  // namespace testsupport
