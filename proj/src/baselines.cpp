#include "sagaze/baselines.hpp"

#include <cmath>

#include "sagaze/numerics.hpp"

namespace sagaze {

TransitionModel build_transitions(const SegmentationResult& seg) {
    if (seg.runs.size() < 2) raise(Errc::TooFewRuns, "transition model needs at least 2 runs");

    TransitionModel model;
    auto state_of = [&model](const std::string& label) -> std::size_t {
        for (std::size_t i = 0; i < model.states.size(); ++i) {
            if (model.states[i] == label) return i;
        }
        model.states.push_back(label);
        return model.states.size() - 1;
    };
    for (const auto& run : seg.runs) state_of(run.object);
    std::size_t k = model.states.size();

    model.counts.assign(k, std::vector<std::size_t>(k, 0));
    model.frequencies.assign(k, 0.0);
    for (const auto& run : seg.runs) model.frequencies[state_of(run.object)] += 1.0;
    for (double& f : model.frequencies) f /= static_cast<double>(seg.runs.size());

    for (std::size_t i = 1; i < seg.runs.size(); ++i) {
        std::size_t from = state_of(seg.runs[i - 1].object);
        std::size_t to = state_of(seg.runs[i].object);
        // A same-label repeat across a background gap is not a transition;
        // runs never self-transition.
        if (from != to) ++model.counts[from][to];
    }

    model.probs.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t total = 0;
        for (std::size_t j = 0; j < k; ++j) total += model.counts[i][j];
        if (total == 0) {
            for (std::size_t j = 0; j < k; ++j) model.probs[i][j] = 1.0 / static_cast<double>(k);
        } else {
            for (std::size_t j = 0; j < k; ++j)
                model.probs[i][j] =
                    static_cast<double>(model.counts[i][j]) / static_cast<double>(total);
        }
    }
    return model;
}

double gte(const TransitionModel& model) {
    auto stationary = stationary_distribution(model.probs);
    double h = 0.0;
    for (std::size_t i = 0; i < model.probs.size(); ++i) {
        double row_entropy = 0.0;
        for (double p : model.probs[i]) {
            if (p > 0.0) row_entropy -= p * std::log2(p);
        }
        h += stationary.pi[i] * row_entropy;
    }
    return h;
}

double sge(const TransitionModel& model) {
    return shannon_entropy(stationary_distribution(model.probs).pi);
}

double gaze_rate(const SegmentationResult& seg, const GazeTrace& trace) {
    double duration_s = trace.duration_ms() / 1000.0;
    if (duration_s <= 0.0) raise(Errc::ZeroDuration, "trace spans no time");
    return static_cast<double>(seg.c_dect()) / duration_s;
}

double dwell_time(const SegmentationResult& seg) {
    if (seg.runs.empty()) raise(Errc::NoRuns, "trace has no object runs");
    double sum = 0.0;
    for (const auto& run : seg.runs) sum += run.duration_ms;
    return sum / static_cast<double>(seg.runs.size());
}

} // namespace sagaze
