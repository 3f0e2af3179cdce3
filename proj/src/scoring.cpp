#include "sagaze/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace sagaze {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327; // standard normal pdf at 0

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

} // namespace

MotionDeltaSeries motion_deltas(const GazeTrace& trace) {
    const auto& s = trace.samples;
    if (s.size() < 4) raise(Errc::TooShort, "motion deltas need at least 4 samples");

    MotionDeltaSeries out;
    std::vector<double> vx, vy, len;
    vx.reserve(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double dx = s[i + 1].pos.x - s[i].pos.x;
        double dy = s[i + 1].pos.y - s[i].pos.y;
        if (dx == 0.0 && dy == 0.0) {
            ++out.dropped_zero_vectors;
            continue;
        }
        vx.push_back(dx);
        vy.push_back(dy);
        len.push_back(std::sqrt(dx * dx + dy * dy));
    }

    for (std::size_t t = 1; t < vx.size(); ++t) {
        double cross = vx[t - 1] * vy[t] - vy[t - 1] * vx[t];
        out.dir.push_back(std::clamp(cross / (len[t - 1] * len[t]), -1.0, 1.0));

        double dl = len[t] - len[t - 1];
        if (std::abs(dl) < 1e-12) {
            ++out.dropped_zero_deltas;
        } else {
            double mag = std::log10(std::abs(dl));
            out.spd.push_back(dl > 0.0 ? -mag : mag);
        }
    }
    return out;
}

double sa_l1(const SegmentationResult& seg) {
    if (seg.m_total == 0) raise(Errc::EmptyTrace, "empty trace has no perception score");
    auto lengths = event_lengths(seg);
    if (lengths.empty()) return 0.0;
    // (C/M) * mean(m) collapses to sum(m)/M, which also pins the score
    // inside [0,1] without rounding slop.
    double sum = 0.0;
    for (std::size_t m : lengths) sum += static_cast<double>(m);
    return sum / static_cast<double>(seg.m_total);
}

double sa_l2(const SegmentationResult& seg, double mu, double sigma) {
    if (seg.m_total == 0) raise(Errc::EmptyTrace, "empty trace has no comprehension score");
    auto lengths = event_lengths(seg);
    if (lengths.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t m : lengths) {
        double md = static_cast<double>(m);
        double z = sigma > 0.0 ? (md - mu) / sigma : 0.0;
        sum += md * std_normal_pdf(z);
    }
    return sum / static_cast<double>(seg.m_total);
}

double sa_l2(const SegmentationResult& seg) {
    if (seg.m_total == 0) raise(Errc::EmptyTrace, "empty trace has no comprehension score");
    auto lengths = event_lengths(seg);
    if (lengths.empty()) return 0.0;
    double mu = 0.0;
    for (std::size_t m : lengths) mu += static_cast<double>(m);
    mu /= static_cast<double>(lengths.size());
    double var = 0.0;
    for (std::size_t m : lengths) {
        double d = static_cast<double>(m) - mu;
        var += d * d;
    }
    double sigma = std::sqrt(var / static_cast<double>(lengths.size())); // population std
    return sa_l2(seg, mu, sigma);
}

namespace {

double lag1_mi_or_zero(const std::vector<double>& series) {
    if (series.size() < 17) return 0.0;
    std::vector<double> xs(series.begin(), series.end() - 1);
    std::vector<double> ys(series.begin() + 1, series.end());
    try {
        return mutual_information(xs, ys);
    } catch (const Error& e) {
        // Degenerate lag-pair geometry (e.g. a perfectly alternating series)
        // carries no usable dependence structure.
        if (e.code() == Errc::DegenerateData) return 0.0;
        throw;
    }
}

} // namespace

SaL3Components sa_l3_components(const MotionDeltaSeries& deltas) {
    return {lag1_mi_or_zero(deltas.dir), lag1_mi_or_zero(deltas.spd)};
}

std::vector<double> sa_l3_batch(const std::vector<std::array<double, 2>>& components,
                                PcaModel* model) {
    if (components.size() < 2) raise(Errc::TooFewTrials, "batch PCA needs at least 2 trials");
    std::vector<std::vector<double>> rows;
    rows.reserve(components.size());
    for (const auto& c : components) rows.push_back({c[0], c[1]});
    PcaResult pca = pca_first_component(rows);
    if (model) *model = pca.model;
    return pca.scores;
}

std::vector<double> sa_overall_batch(const std::vector<std::array<double, 3>>& levels,
                                     PcaModel* model) {
    if (levels.size() < 2) raise(Errc::TooFewTrials, "batch PCA needs at least 2 trials");
    std::vector<std::vector<double>> rows;
    rows.reserve(levels.size());
    for (const auto& l : levels) rows.push_back({l[0], l[1], l[2]});
    PcaResult pca = pca_first_component(rows);
    if (model) *model = pca.model;
    return pca.scores;
}

} // namespace sagaze
