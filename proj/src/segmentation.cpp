#include "sagaze/segmentation.hpp"

namespace sagaze {

std::size_t SegmentationResult::c_dect() const {
    std::size_t count = 0;
    for (const auto& run : runs) {
        if (run.is_event) ++count;
    }
    return count;
}

SegmentationResult segment_runs(const GazeTrace& trace, const SegmentationOptions& options) {
    SegmentationResult result;
    result.m_total = trace.samples.size();

    const auto& samples = trace.samples;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].on_object()) {
            ++result.background_count;
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i + 1 < samples.size() && samples[i + 1].object == samples[start].object) ++i;
        Run run;
        run.object = samples[start].object;
        run.start_index = start;
        run.end_index = i;
        run.duration_ms = samples[i].t_ms - samples[start].t_ms;
        // An event needs a previous object to differ from; a same-label
        // repeat across a background gap differs from nothing.
        if (result.runs.empty()) {
            run.is_event = options.count_first_run;
        } else {
            run.is_event = result.runs.back().object != run.object;
        }
        result.runs.push_back(std::move(run));
        ++i;
    }
    return result;
}

std::vector<std::size_t> event_lengths(const SegmentationResult& seg) {
    std::vector<std::size_t> lengths;
    for (const auto& run : seg.runs) {
        if (run.is_event) lengths.push_back(run.length());
    }
    return lengths;
}

} // namespace sagaze
