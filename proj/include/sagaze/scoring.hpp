#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "sagaze/numerics.hpp"
#include "sagaze/segmentation.hpp"
#include "sagaze/types.hpp"

namespace sagaze {

// Per-step gaze kinematics. dir holds the signed sine of the turning angle
// between consecutive gaze vectors (in [-1,1]); spd holds the log-scaled
// length deltas -sign(dl)*log10(|dl|). Zero-length vectors are dropped before
// pairing; |dl| < 1e-12 entries are dropped from spd only, so spd can be
// shorter than dir by exactly dropped_zero_deltas.
struct MotionDeltaSeries {
    std::vector<double> dir;
    std::vector<double> spd;
    std::size_t dropped_zero_vectors = 0;
    std::size_t dropped_zero_deltas = 0;
};

// Requires at least 4 samples (TooShort): fewer cannot form a vector pair.
MotionDeltaSeries motion_deltas(const GazeTrace& trace);

// Perception score: (C_Dect / M_total) * mean(event lengths); 0 when there
// are no events. Algebraically (sum of event lengths)/M_total, so in [0,1].
// Raises EmptyTrace on m_total = 0.
double sa_l1(const SegmentationResult& seg);

// Comprehension score: sum over events of m * phi(z(m)) / M_total, where phi
// is the standard normal pdf and z is the within-trial population z-score of
// the event length. sigma = 0 (or a single event) puts every event at z = 0.
double sa_l2(const SegmentationResult& seg);

// Pooled variant: z-scores against an externally supplied mean/std (used by
// the --l2-pooled batch mode). sigma <= 0 is treated as z = 0.
double sa_l2(const SegmentationResult& seg, double mu, double sigma);

struct SaL3Components {
    double dir = 0.0;
    double spd = 0.0;
};

// Lag-1 mutual information of each delta series, in bits. Series shorter
// than 17 entries, zero-variance series, and degenerate lag-pair geometry
// all map to a 0 component; this never throws.
SaL3Components sa_l3_components(const MotionDeltaSeries& deltas);

// First-PC fusion of (dir, spd) component columns across a trial batch.
// Raises TooFewTrials for n < 2. The fitted model is reported through *model
// when non-null (loadings are part of the score's definition).
std::vector<double> sa_l3_batch(const std::vector<std::array<double, 2>>& components,
                                PcaModel* model = nullptr);

// First-PC fusion of the (sa_l1, sa_l2, sa_l3) level columns.
std::vector<double> sa_overall_batch(const std::vector<std::array<double, 3>>& levels,
                                     PcaModel* model = nullptr);

// The four scores plus the MI components for one trial. sa_l3 and sa_overall
// are batch-relative: they only exist after the cross-trial PCA.
struct SaScoreSet {
    std::string trial_id;
    double sa_l1 = 0.0;
    double sa_l2 = 0.0;
    double sa_l3_dir = 0.0;
    double sa_l3_spd = 0.0;
    double sa_l3 = 0.0;
    double sa_overall = 0.0;
};

} // namespace sagaze
