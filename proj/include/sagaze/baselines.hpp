#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sagaze/segmentation.hpp"
#include "sagaze/types.hpp"

namespace sagaze {

// Markov model over object labels at run granularity. Runs never
// self-transition, so the count diagonal is structurally zero; rows that saw
// no transitions are padded uniform in the probability matrix to keep it
// stochastic.
struct TransitionModel {
    std::vector<std::string> states; // distinct run labels, by first appearance
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::vector<double>> probs;
    std::vector<double> frequencies; // share of runs per state
};

// Counts run-label bigrams over the ordered run sequence, including across
// background gaps; a same-label bigram (repeat across a gap) is not a
// transition. Raises TooFewRuns for fewer than 2 runs.
TransitionModel build_transitions(const SegmentationResult& seg);

// Gaze transition entropy: -sum_i pi_i sum_j p_ij log2 p_ij with pi the
// stationary distribution of the transition matrix.
double gte(const TransitionModel& model);

// Stationary gaze entropy: Shannon entropy of the stationary distribution.
double sge(const TransitionModel& model);

// Perception events per second over the trace time span. Raises ZeroDuration.
double gaze_rate(const SegmentationResult& seg, const GazeTrace& trace);

// Mean run duration in milliseconds over all runs (events or not). Raises
// NoRuns for a run-free (all background) trace.
double dwell_time(const SegmentationResult& seg);

} // namespace sagaze
