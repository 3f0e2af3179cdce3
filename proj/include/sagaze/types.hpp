#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sagaze {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// One gaze sample. An empty object label means the gaze was on background;
// background is a first-class state, not an error.
struct GazeSample {
    double t_ms = 0.0;
    Vec2 pos;
    std::string object;

    bool on_object() const { return !object.empty(); }
};

// Ordered gaze samples for one trial. Timestamps are strictly increasing
// (enforced at parse time); positions are finite 2D points in arbitrary but
// per-trace-consistent units.
struct GazeTrace {
    std::string trial_id;
    std::vector<GazeSample> samples;

    std::size_t m_total() const { return samples.size(); }

    // last t - first t; 0 for traces with fewer than two samples.
    double duration_ms() const {
        return samples.size() < 2 ? 0.0 : samples.back().t_ms - samples.front().t_ms;
    }
};

struct TelemetrySample {
    double t_ms = 0.0;
    double speed_mps = 0.0;
};

struct TelemetryTrace {
    std::string trial_id;
    std::vector<TelemetrySample> samples;
};

// Gaze and telemetry for one trial, bound by a shared trial id.
struct TrialRecord {
    GazeTrace gaze;
    TelemetryTrace telemetry;
    std::string participant_id;
    int session_index = 0;
};

struct TrialWarning {
    enum class Kind { SampleRate, Overlap };
    Kind kind;
    std::string message;
};

// Non-fatal sanity checks: median gaze inter-sample interval deviating more
// than 50% from the nominal rate, and gaze/telemetry time-span overlap below
// 90%. Never mutates or rejects data.
std::vector<TrialWarning> validate_trial(const TrialRecord& record, double nominal_hz = 90.0);

} // namespace sagaze
