#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagaze/numerics.hpp"
#include "sagaze/types.hpp"

namespace sagaze {

// Reciprocal of the mean absolute acceleration, with accelerations from
// first differences of speed: a_k = (v_{k+1} - v_k)/(t_{k+1} - t_k). Raises
// TooFewSamples (< 3 samples) and ConstantSpeed (mean |a| < 1e-9, where the
// score would be unbounded).
double driving_performance(const TelemetryTrace& telemetry);

// Synthetic trial control. theta in [0,1] is the ground-truth awareness
// level the cohort study correlates against.
struct SynthConfig {
    double theta = 0.5;
    std::uint64_t seed = 1;
    double duration_s = 12.0;
    double sample_rate_hz = 90.0;
    int object_count = 6;
};

// Deterministic synthetic trial. Higher theta gives longer, more regular
// perception runs (raises SA_L1/SA_L2), stronger lag-1 dependence in the
// gaze kinematics through an AR(1) coefficient of 0.9*theta (raises SA_L3),
// and lower-variance acceleration (raises driving performance). Raises
// InvalidConfig.
TrialRecord generate_trial(const SynthConfig& config);

// One Table-1-style row: a measure correlated against driving performance.
// Correlations that are not computable (too few surviving pairs, constant
// series) are absent; excluded counts the trials that could not contribute.
struct MeasureRow {
    std::string name;
    std::optional<CorrelationResult> spearman;
    std::optional<CorrelationResult> kendall;
    std::optional<CorrelationResult> pearson;
    std::size_t excluded = 0;
};

struct CorrelationReport {
    std::size_t n = 0; // trials that entered the study
    std::vector<MeasureRow> measures;
};

struct CorrelateOptions {
    bool l2_pooled = false;      // z-score event lengths against the pooled batch
    bool count_first_run = false;
    // > 0 replaces the analytic p-values with a two-sided permutation test of
    // that many reshuffles (deterministically seeded).
    int permutation = 0;
};

// The eight measures (sa_l1, sa_l2, sa_l3, sa_overall, gte, sge, gaze_rate,
// dwell_time) against driving performance. Trials are canonicalized by
// trial_id before any reduction, so the report is invariant to input order.
// Raises TooFewTrials for fewer than 8 trials.
CorrelationReport correlate(const std::vector<TrialRecord>& trials,
                            const CorrelateOptions& options = {});

// Per-trial measure matrix backing the report; exposed for the CLI, which
// needs the same values for the radar rendering.
struct TrialMeasures {
    std::string trial_id;
    std::optional<double> sa_l1, sa_l2, sa_l3, sa_overall;
    std::optional<double> gte, sge, gaze_rate, dwell_time;
    std::optional<double> performance;
};

std::vector<TrialMeasures> compute_measures(const std::vector<TrialRecord>& trials,
                                            const CorrelateOptions& options = {});

CorrelationReport correlate_measures(const std::vector<TrialMeasures>& measures,
                                     const CorrelateOptions& options = {});

} // namespace sagaze
