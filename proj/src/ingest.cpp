#include "repad/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "repad/errors.hpp"

namespace repad {
namespace {

std::vector<std::string> split_semicolon(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(';', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_decimal_comma(const std::string& cell, std::size_t line_no) {
    std::string s = cell;
    std::replace(s.begin(), s.end(), ',', '.');
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw CsvParseError("line " + std::to_string(line_no) +
                            ": cannot parse numeric cell '" + cell + "'");
    }
    return v;
}

double uniform01(std::mt19937& rng) {
    return std::ldexp(static_cast<double>(rng()), -32);
}

}  // namespace

TimeSeries parse_air_quality(std::istream& source, const std::string& column,
                             std::optional<std::size_t> expected_rows) {
    std::string line;
    if (!std::getline(source, line)) {
        throw CsvParseError("empty input: no header row");
    }
    strip_cr(line);
    const auto header = split_semicolon(line);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) {
            col = i;
            break;
        }
    }
    if (col == header.size()) {
        std::string available;
        for (const auto& h : header) {
            if (h.empty()) continue;
            if (!available.empty()) available += ", ";
            available += h;
        }
        throw ColumnNotFoundError("column '" + column +
                                  "' not in header (have: " + available + ")");
    }

    TimeSeries ts;
    ts.name = column;
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_semicolon(line);
        if (fields[0].empty()) continue;  // trailing filler rows
        if (col >= fields.size()) {
            throw CsvParseError("line " + std::to_string(line_no) +
                                ": row has too few fields");
        }
        if (ts.values.empty() && fields.size() > 1) {
            ts.origin = fields[0] + " " + fields[1];
        }
        ts.values.push_back(parse_decimal_comma(fields[col], line_no));
    }

    if (expected_rows && ts.values.size() != *expected_rows) {
        throw IntegrityError("expected " + std::to_string(*expected_rows) +
                             " data rows, parsed " +
                             std::to_string(ts.values.size()));
    }
    return ts;
}

TimeSeries load_air_quality(const std::filesystem::path& path,
                            const std::string& column,
                            std::optional<std::size_t> expected_rows) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_air_quality(in, column, expected_rows);
}

std::vector<AnomalyLabel> find_sentinel_runs(std::span<const double> values,
                                             double sentinel) {
    std::vector<AnomalyLabel> labels;
    std::size_t i = 0;
    while (i < values.size()) {
        if (values[i] != sentinel) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == sentinel) ++j;
        AnomalyLabel l;
        l.start = static_cast<std::int64_t>(i);
        l.end = static_cast<std::int64_t>(j);
        l.kind = (i == j) ? LabelKind::Point : LabelKind::Collective;
        labels.push_back(l);
        i = j + 1;
    }
    return labels;
}

LabeledSeries label_sentinels(TimeSeries series, double sentinel) {
    LabeledSeries out;
    out.labels = find_sentinel_runs(series.values, sentinel);
    out.series = std::move(series);
    return out;
}

LabeledSeries synth_stream(std::size_t length, SynthPattern pattern,
                           std::vector<AnomalyLabel> injected,
                           std::uint32_t seed) {
    for (std::size_t i = 0; i < injected.size(); ++i) {
        const auto& l = injected[i];
        if (l.start < 0 || l.end < l.start ||
            l.end >= static_cast<std::int64_t>(length)) {
            throw std::invalid_argument("injected label out of range");
        }
        if (i > 0 && l.start <= injected[i - 1].end) {
            throw std::invalid_argument("injected labels overlap");
        }
    }

    std::mt19937 rng(seed);
    TimeSeries ts;
    ts.values.resize(length);
    double walk = 100.0;
    for (std::size_t t = 0; t < length; ++t) {
        switch (pattern) {
        case SynthPattern::Constant:
            ts.values[t] = 100.0;
            ts.name = "synthetic-constant";
            break;
        case SynthPattern::Sine:
            ts.values[t] = 100.0 + 25.0 * std::sin(2.0 * M_PI * t / 48.0) +
                           (uniform01(rng) - 0.5);
            ts.name = "synthetic-sine";
            break;
        case SynthPattern::RandomWalk:
            walk += 2.0 * uniform01(rng) - 1.0;
            ts.values[t] = walk;
            ts.name = "synthetic-walk";
            break;
        }
    }

    for (const auto& l : injected) {
        for (std::int64_t i = l.start; i <= l.end; ++i) {
            ts.values[static_cast<std::size_t>(i)] = kMissingSentinel;
        }
    }

    LabeledSeries out;
    out.series = std::move(ts);
    out.labels = std::move(injected);
    return out;
}

}  // namespace repad
