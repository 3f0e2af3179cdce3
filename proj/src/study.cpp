#include "sagaze/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sagaze/baselines.hpp"
#include "sagaze/csv.hpp"
#include "sagaze/rng.hpp"
#include "sagaze/scoring.hpp"
#include "sagaze/segmentation.hpp"

namespace sagaze {

double driving_performance(const TelemetryTrace& telemetry) {
    const auto& s = telemetry.samples;
    if (s.size() < 3) raise(Errc::TooFewSamples, "driving performance needs at least 3 samples");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double dt_s = (s[i + 1].t_ms - s[i].t_ms) / 1000.0;
        sum += std::abs((s[i + 1].speed_mps - s[i].speed_mps) / dt_s);
    }
    double mean_abs_a = sum / static_cast<double>(s.size() - 1);
    if (mean_abs_a < 1e-9) raise(Errc::ConstantSpeed, "mean |acceleration| below 1e-9");
    return 1.0 / mean_abs_a;
}

TrialRecord generate_trial(const SynthConfig& config) {
    if (!(config.theta >= 0.0 && config.theta <= 1.0)) {
        raise(Errc::InvalidConfig, "theta must be in [0,1]");
    }
    if (!(config.duration_s > 0.0) || !(config.sample_rate_hz > 0.0)) {
        raise(Errc::InvalidConfig, "duration and sample rate must be positive");
    }
    if (config.object_count < 2) {
        raise(Errc::InvalidConfig, "need at least 2 objects");
    }

    const double theta = config.theta;
    const double phi = 0.9 * theta;
    const double innovation = phi > 0.0 ? std::sqrt(1.0 - phi * phi) : 1.0;
    const std::size_t n = static_cast<std::size_t>(std::llround(config.duration_s * config.sample_rate_hz)) + 1;
    const std::size_t nv = n - 1;

    Rng rng(config.seed);

    // Stage 1: turning angles, AR(1) with stationary sd 0.3; headings
    // accumulate so direction deltas are exactly sin(turn).
    std::vector<double> turn(nv);
    if (nv > 0) {
        turn[0] = rng.normal();
        for (std::size_t i = 1; i < nv; ++i) turn[i] = phi * turn[i - 1] + innovation * rng.normal();
        for (double& t : turn) t *= 0.3;
    }
    const double heading0 = rng.uniform() * 6.283185307179586;

    // Stage 2: vector lengths. Length deltas are signed-lognormal,
    // |dl| = 10^(0.5*g) with g the AR(1) chain and an independent fair-coin
    // sign, so the log-scaled speed delta series has an exactly Gaussian
    // marginal: iid white noise at theta = 0, magnitude-coupled at theta > 0.
    // A weak pull toward length 100 keeps the random walk bounded.
    std::vector<double> g(nv), sign(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        g[i] = i == 0 ? rng.normal() : phi * g[i - 1] + innovation * rng.normal();
    }
    for (std::size_t i = 0; i < nv; ++i) sign[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;

    const double dt_ms = 1000.0 / config.sample_rate_hz;
    GazeTrace gaze;
    gaze.samples.resize(n);
    double x = 0.0, y = 0.0, heading = heading0, length = 100.0;
    gaze.samples[0].t_ms = 0.0;
    gaze.samples[0].pos = {0.0, 0.0};
    for (std::size_t i = 0; i < nv; ++i) {
        heading += turn[i];
        if (i > 0) {
            double step = sign[i] * std::pow(10.0, 0.5 * g[i]);
            length = std::max(1.0, length + step - 0.01 * (length - 100.0));
        }
        x += length * std::cos(heading);
        y += length * std::sin(heading);
        gaze.samples[i + 1].t_ms = static_cast<double>(i + 1) * dt_ms;
        gaze.samples[i + 1].pos = {x, y};
    }

    // Stage 3: object labels. Gap probability and run-length dispersion fall
    // with theta; run lengths concentrate near their mean.
    const double mu_run = 36.0 - 12.0 * theta;
    const double sd_run = 0.7 * mu_run * (1.0 - 0.85 * theta);
    const double p_gap = 0.45 * (1.0 - theta) + 0.03;
    std::vector<std::string> object_names(config.object_count);
    for (int k = 0; k < config.object_count; ++k) object_names[k] = "obj" + std::to_string(k + 1);

    std::size_t filled = 0;
    int prev_object = -1;
    while (filled < n) {
        if (rng.uniform() < p_gap) {
            double raw = 2.0 + 16.0 * (1.0 - theta) + 8.0 * (1.0 - theta) * rng.normal();
            auto gap = static_cast<std::size_t>(std::max<long long>(1, std::llround(raw)));
            filled = std::min(n, filled + gap); // background: labels stay empty
        }
        if (filled >= n) break;
        double raw = mu_run + sd_run * rng.normal();
        auto run = static_cast<std::size_t>(std::clamp<long long>(std::llround(raw), 3, 120));
        int obj = rng.below(config.object_count);
        if (obj == prev_object) obj = (obj + 1) % config.object_count;
        prev_object = obj;
        for (std::size_t i = 0; i < run && filled < n; ++i) {
            gaze.samples[filled++].object = object_names[obj];
        }
    }

    // Stage 4: telemetry at 10 Hz, mean-reverting around the 40 km/h task
    // speed with acceleration noise shrinking as theta grows.
    const double sigma_a = 0.8 * (1.0 - 0.85 * theta) + 0.02;
    const std::size_t m = static_cast<std::size_t>(std::llround(config.duration_s * 10.0)) + 1;
    TelemetryTrace telemetry;
    telemetry.samples.resize(m);
    double v = 11.111;
    for (std::size_t k = 0; k < m; ++k) {
        telemetry.samples[k].t_ms = static_cast<double>(k) * 100.0;
        telemetry.samples[k].speed_mps = v;
        double a = -0.2 * (v - 11.111) + sigma_a * rng.normal();
        v = std::max(0.0, v + 0.1 * a);
    }

    TrialRecord record;
    std::string id = "synth-s" + std::to_string(config.seed) + "-th" + format_double(config.theta);
    gaze.trial_id = id;
    telemetry.trial_id = id;
    record.gaze = std::move(gaze);
    record.telemetry = std::move(telemetry);
    return record;
}

namespace {

template <typename F>
std::optional<double> try_measure(F&& f) {
    try {
        return f();
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

std::vector<TrialMeasures> compute_measures(const std::vector<TrialRecord>& trials,
                                            const CorrelateOptions& options) {
    // Canonical trial order; every later reduction inherits it.
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trials[a].gaze.trial_id < trials[b].gaze.trial_id;
    });

    SegmentationOptions seg_options{options.count_first_run};
    std::vector<SegmentationResult> segs;
    segs.reserve(trials.size());
    for (std::size_t idx : order) segs.push_back(segment_runs(trials[idx].gaze, seg_options));

    // Pooled L2 statistics: population mean/std of event lengths across the
    // whole batch.
    double pooled_mu = 0.0, pooled_sigma = 0.0;
    if (options.l2_pooled) {
        std::vector<double> all;
        for (const auto& seg : segs) {
            for (std::size_t m : event_lengths(seg)) all.push_back(static_cast<double>(m));
        }
        if (!all.empty()) {
            for (double v : all) pooled_mu += v;
            pooled_mu /= static_cast<double>(all.size());
            for (double v : all) pooled_sigma += (v - pooled_mu) * (v - pooled_mu);
            pooled_sigma = std::sqrt(pooled_sigma / static_cast<double>(all.size()));
        }
    }

    std::vector<TrialMeasures> out(trials.size());
    std::vector<std::optional<SaL3Components>> components(trials.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const TrialRecord& trial = trials[order[i]];
        const SegmentationResult& seg = segs[i];
        TrialMeasures& row = out[i];
        row.trial_id = trial.gaze.trial_id;
        row.sa_l1 = try_measure([&] { return sa_l1(seg); });
        row.sa_l2 = try_measure([&] {
            return options.l2_pooled ? sa_l2(seg, pooled_mu, pooled_sigma) : sa_l2(seg);
        });
        try {
            components[i] = sa_l3_components(motion_deltas(trial.gaze));
        } catch (const Error&) {
            components[i] = std::nullopt;
        }
        row.gte = try_measure([&] { return gte(build_transitions(seg)); });
        row.sge = try_measure([&] { return sge(build_transitions(seg)); });
        row.gaze_rate = try_measure([&] { return gaze_rate(seg, trial.gaze); });
        row.dwell_time = try_measure([&] { return dwell_time(seg); });
        row.performance = try_measure([&] { return driving_performance(trial.telemetry); });
    }

    // Batch PCA over trials with complete inputs.
    std::vector<std::size_t> l3_rows;
    std::vector<std::array<double, 2>> l3_input;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (components[i]) {
            l3_rows.push_back(i);
            l3_input.push_back({components[i]->dir, components[i]->spd});
        }
    }
    if (l3_input.size() >= 2) {
        auto scores = sa_l3_batch(l3_input);
        for (std::size_t j = 0; j < l3_rows.size(); ++j) out[l3_rows[j]].sa_l3 = scores[j];
    }

    std::vector<std::size_t> overall_rows;
    std::vector<std::array<double, 3>> overall_input;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].sa_l1 && out[i].sa_l2 && out[i].sa_l3) {
            overall_rows.push_back(i);
            overall_input.push_back({*out[i].sa_l1, *out[i].sa_l2, *out[i].sa_l3});
        }
    }
    if (overall_input.size() >= 2) {
        auto scores = sa_overall_batch(overall_input);
        for (std::size_t j = 0; j < overall_rows.size(); ++j)
            out[overall_rows[j]].sa_overall = scores[j];
    }

    return out;
}

namespace {

struct MeasureColumn {
    const char* name;
    std::optional<double> TrialMeasures::* field;
};

constexpr MeasureColumn kMeasures[] = {
    {"sa_l1", &TrialMeasures::sa_l1},    {"sa_l2", &TrialMeasures::sa_l2},
    {"sa_l3", &TrialMeasures::sa_l3},    {"sa_overall", &TrialMeasures::sa_overall},
    {"gte", &TrialMeasures::gte},        {"sge", &TrialMeasures::sge},
    {"gaze_rate", &TrialMeasures::gaze_rate}, {"dwell_time", &TrialMeasures::dwell_time},
};

using CorrFn = CorrelationResult (*)(const std::vector<double>&, const std::vector<double>&);

std::optional<CorrelationResult> try_corr(CorrFn fn, const std::vector<double>& xs,
                                          const std::vector<double>& ys) {
    try {
        return fn(xs, ys);
    } catch (const Error&) {
        return std::nullopt;
    }
}

double permutation_p(CorrFn fn, std::vector<double> xs, const std::vector<double>& ys,
                     double observed, int reshuffles, std::uint64_t seed) {
    Rng rng(seed);
    int at_least = 0;
    for (int r = 0; r < reshuffles; ++r) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
        }
        try {
            if (std::abs(fn(xs, ys).coefficient) >= std::abs(observed)) ++at_least;
        } catch (const Error&) {
            // A degenerate reshuffle cannot beat the observed coefficient.
        }
    }
    return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(reshuffles) + 1.0);
}

} // namespace

CorrelationReport correlate_measures(const std::vector<TrialMeasures>& measures,
                                     const CorrelateOptions& options) {
    CorrelationReport report;
    report.n = measures.size();

    std::size_t measure_index = 0;
    for (const auto& column : kMeasures) {
        MeasureRow row;
        row.name = column.name;

        std::vector<double> xs, ys;
        for (const auto& m : measures) {
            const auto& value = m.*(column.field);
            if (value && m.performance) {
                xs.push_back(*value);
                ys.push_back(*m.performance);
            }
        }
        row.excluded = measures.size() - xs.size();

        row.spearman = try_corr(&spearman, xs, ys);
        row.kendall = try_corr(&kendall, xs, ys);
        row.pearson = try_corr(&pearson, xs, ys);

        if (options.permutation > 0) {
            // Deterministic seed per measure keeps reruns byte-identical.
            std::uint64_t seed = 0x5a17ab1e00000000ULL + measure_index;
            if (row.spearman)
                row.spearman->p_value = permutation_p(&spearman, xs, ys,
                                                      row.spearman->coefficient,
                                                      options.permutation, seed);
            if (row.kendall)
                row.kendall->p_value = permutation_p(&kendall, xs, ys, row.kendall->coefficient,
                                                     options.permutation, seed + 101);
            if (row.pearson)
                row.pearson->p_value = permutation_p(&pearson, xs, ys, row.pearson->coefficient,
                                                     options.permutation, seed + 202);
        }

        report.measures.push_back(std::move(row));
        ++measure_index;
    }
    return report;
}

CorrelationReport correlate(const std::vector<TrialRecord>& trials,
                            const CorrelateOptions& options) {
    if (trials.size() < 8) raise(Errc::TooFewTrials, "correlation study needs at least 8 trials");
    return correlate_measures(compute_measures(trials, options), options);
}

} // namespace sagaze
