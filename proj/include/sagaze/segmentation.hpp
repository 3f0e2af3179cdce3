#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sagaze/types.hpp"

namespace sagaze {

// Maximal run of consecutive samples sharing one non-background object label.
// Background samples belong to no run and break runs: two same-label runs
// separated by background stay separate.
struct Run {
    std::string object;
    std::size_t start_index = 0; // inclusive sample indices into the trace
    std::size_t end_index = 0;
    double duration_ms = 0.0;    // t(end) - t(start)
    bool is_event = false;

    std::size_t length() const { return end_index - start_index + 1; }
};

struct SegmentationResult {
    std::vector<Run> runs;
    std::size_t m_total = 0;          // total sample count of the trace
    std::size_t background_count = 0; // samples with no object label

    std::size_t c_dect() const; // number of perception events
};

struct SegmentationOptions {
    // Whether the first run of a trace counts as a perception event. Off by
    // default: the first run has no previous object to differ from.
    bool count_first_run = false;
};

// Splits a trace into runs and classifies perception events: every run whose
// label differs from the previous run's label. A run repeating the previous
// label (possible only across a background gap) is not an event.
SegmentationResult segment_runs(const GazeTrace& trace, const SegmentationOptions& options = {});

// Event-run lengths in gaze points, in temporal order. Empty when no events.
std::vector<std::size_t> event_lengths(const SegmentationResult& seg);

} // namespace sagaze
