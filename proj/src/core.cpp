#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sagaze/csv.hpp"
#include "sagaze/error.hpp"
#include "sagaze/types.hpp"

namespace sagaze {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NegativeSpeed: return "NegativeSpeed";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::TooShort: return "TooShort";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NotADistribution: return "NotADistribution";
    case Errc::NotStochastic: return "NotStochastic";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::TooFewTrials: return "TooFewTrials";
    case Errc::TooFewRuns: return "TooFewRuns";
    case Errc::ZeroDuration: return "ZeroDuration";
    case Errc::NoRuns: return "NoRuns";
    case Errc::ConstantSeries: return "ConstantSeries";
    case Errc::ConstantSpeed: return "ConstantSpeed";
    case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "UnknownError";
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

namespace {

struct Line {
    std::string_view text;
    std::size_t number; // 1-based, counting the header
};

// Splits into lines, tolerating CRLF and a missing final newline. Interior
// empty lines are kept so they can be reported as malformed.
std::vector<Line> split_lines(std::string_view bytes) {
    std::vector<Line> lines;
    std::size_t start = 0;
    std::size_t number = 1;
    while (start <= bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        std::string_view line = bytes.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({line, number});
        if (end == bytes.size()) break;
        start = end + 1;
        ++number;
    }
    while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_field(std::string_view field, const char* column, std::size_t line_number) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        raise(Errc::MalformedRow,
              "line " + std::to_string(line_number) + ": bad " + column + " value '" +
                  std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
        raise(Errc::MalformedRow,
              "line " + std::to_string(line_number) + ": non-finite " + column);
    }
    return value;
}

std::string_view strip_bom(std::string_view bytes) {
    if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
    return bytes;
}

void check_header(const std::vector<Line>& lines, std::string_view expected) {
    if (lines.empty()) raise(Errc::EmptyInput, "input has no content");
    if (lines[0].text != expected) {
        raise(Errc::MalformedRow, "line 1: expected header '" + std::string(expected) + "'");
    }
}

} // namespace

GazeTrace parse_gaze_csv(std::string_view bytes, std::string trial_id) {
    auto lines = split_lines(strip_bom(bytes));
    check_header(lines, "t_ms,x,y,object");
    if (lines.size() < 2) raise(Errc::EmptyInput, "no gaze samples");

    GazeTrace trace;
    trace.trial_id = std::move(trial_id);
    trace.samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [text, number] = lines[i];
        auto fields = split_fields(text);
        if (fields.size() != 4) {
            raise(Errc::MalformedRow,
                  "line " + std::to_string(number) + ": expected 4 columns, got " +
                      std::to_string(fields.size()));
        }
        GazeSample sample;
        sample.t_ms = parse_field(fields[0], "t_ms", number);
        if (sample.t_ms < 0) {
            raise(Errc::MalformedRow, "line " + std::to_string(number) + ": negative t_ms");
        }
        sample.pos.x = parse_field(fields[1], "x", number);
        sample.pos.y = parse_field(fields[2], "y", number);
        sample.object = std::string(fields[3]);
        if (!trace.samples.empty() && sample.t_ms <= trace.samples.back().t_ms) {
            raise(Errc::NonMonotonicTime,
                  "line " + std::to_string(number) + ": t_ms " + format_double(sample.t_ms) +
                      " does not increase past " + format_double(trace.samples.back().t_ms));
        }
        trace.samples.push_back(std::move(sample));
    }
    return trace;
}

TelemetryTrace parse_telemetry_csv(std::string_view bytes, std::string trial_id) {
    auto lines = split_lines(strip_bom(bytes));
    check_header(lines, "t_ms,speed_mps");
    if (lines.size() < 2) raise(Errc::EmptyInput, "no telemetry samples");

    TelemetryTrace trace;
    trace.trial_id = std::move(trial_id);
    trace.samples.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [text, number] = lines[i];
        auto fields = split_fields(text);
        if (fields.size() != 2) {
            raise(Errc::MalformedRow,
                  "line " + std::to_string(number) + ": expected 2 columns, got " +
                      std::to_string(fields.size()));
        }
        TelemetrySample sample;
        sample.t_ms = parse_field(fields[0], "t_ms", number);
        sample.speed_mps = parse_field(fields[1], "speed_mps", number);
        if (sample.speed_mps < 0) {
            raise(Errc::NegativeSpeed,
                  "line " + std::to_string(number) + ": speed " +
                      format_double(sample.speed_mps));
        }
        if (!trace.samples.empty() && sample.t_ms <= trace.samples.back().t_ms) {
            raise(Errc::NonMonotonicTime,
                  "line " + std::to_string(number) + ": t_ms " + format_double(sample.t_ms) +
                      " does not increase past " + format_double(trace.samples.back().t_ms));
        }
        trace.samples.push_back(sample);
    }
    return trace;
}

std::string write_gaze_csv(const GazeTrace& trace) {
    std::string out = "t_ms,x,y,object\n";
    for (const auto& s : trace.samples) {
        out += format_double(s.t_ms);
        out += ',';
        out += format_double(s.pos.x);
        out += ',';
        out += format_double(s.pos.y);
        out += ',';
        out += s.object;
        out += '\n';
    }
    return out;
}

std::string write_telemetry_csv(const TelemetryTrace& trace) {
    std::string out = "t_ms,speed_mps\n";
    for (const auto& s : trace.samples) {
        out += format_double(s.t_ms);
        out += ',';
        out += format_double(s.speed_mps);
        out += '\n';
    }
    return out;
}

std::vector<TrialWarning> validate_trial(const TrialRecord& record, double nominal_hz) {
    std::vector<TrialWarning> warnings;

    const auto& gaze = record.gaze.samples;
    if (gaze.size() >= 2 && nominal_hz > 0) {
        std::vector<double> gaps;
        gaps.reserve(gaze.size() - 1);
        for (std::size_t i = 1; i < gaze.size(); ++i) gaps.push_back(gaze[i].t_ms - gaze[i - 1].t_ms);
        std::sort(gaps.begin(), gaps.end());
        double median = gaps.size() % 2 == 1
                            ? gaps[gaps.size() / 2]
                            : 0.5 * (gaps[gaps.size() / 2 - 1] + gaps[gaps.size() / 2]);
        double nominal_ms = 1000.0 / nominal_hz;
        if (std::abs(median - nominal_ms) > 0.5 * nominal_ms) {
            warnings.push_back({TrialWarning::Kind::SampleRate,
                                "median gaze interval " + format_double(median) +
                                    " ms deviates more than 50% from nominal " +
                                    format_double(nominal_ms) + " ms"});
        }
    }

    const auto& tel = record.telemetry.samples;
    if (gaze.size() >= 2 && tel.size() >= 2) {
        double g0 = gaze.front().t_ms, g1 = gaze.back().t_ms;
        double t0 = tel.front().t_ms, t1 = tel.back().t_ms;
        double inter = std::min(g1, t1) - std::max(g0, t0);
        double uni = std::max(g1, t1) - std::min(g0, t0);
        if (uni > 0 && std::max(inter, 0.0) / uni < 0.9) {
            warnings.push_back({TrialWarning::Kind::Overlap,
                                "gaze/telemetry time spans overlap by " +
                                    format_double(100.0 * std::max(inter, 0.0) / uni) +
                                    "% (< 90%)"});
        }
    }

    return warnings;
}

} // namespace sagaze
