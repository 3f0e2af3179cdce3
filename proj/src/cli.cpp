#include "sagaze/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sagaze/baselines.hpp"
#include "sagaze/csv.hpp"
#include "sagaze/error.hpp"
#include "sagaze/scoring.hpp"
#include "sagaze/segmentation.hpp"
#include "sagaze/study.hpp"

namespace sagaze {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1; // I/O and argument errors
constexpr int kExitData = 2; // data and precondition errors

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// Index-stealing worker pool. Results land in per-index slots, so worker
// count never changes any output.
template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        threads.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
        });
    }
    for (auto& thread : threads) thread.join();
}

struct Options {
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string out = ".";
    double nominal_hz = 90.0;
    bool l2_pooled = false;
    bool count_first_run = false;
    int permutation = 0;
    std::string radar;
    bool dump_runs = false;
};

struct LoadedTrial {
    std::optional<TrialRecord> record;
    std::string error;     // set when the trial failed to load
    bool io_error = false; // unreadable file (exit 1) vs. bad content (exit 2)
};

// Counts of failed trials by class; decides the batch exit code.
struct Failures {
    std::size_t io = 0;
    std::size_t data = 0;

    int exit_code() const { return io > 0 ? kExitUsage : data > 0 ? kExitData : kExitOk; }
};

// Parses every manifest trial in parallel; load failures are reported per
// trial, never fatal to the batch.
std::vector<LoadedTrial> load_trials(const std::vector<ManifestEntry>& entries,
                                     const Options& options) {
    std::vector<LoadedTrial> loaded(entries.size());
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        const auto& entry = entries[i];
        try {
            TrialRecord record;
            record.gaze = parse_gaze_csv(read_file(entry.gaze_path), entry.trial_id);
            record.telemetry = parse_telemetry_csv(read_file(entry.telemetry_path), entry.trial_id);
            loaded[i].record = std::move(record);
        } catch (const Error& e) {
            loaded[i].error = entry.trial_id + ": " + e.what();
        } catch (const std::exception& e) {
            loaded[i].error = entry.trial_id + ": " + e.what();
            loaded[i].io_error = true;
        }
    });
    return loaded;
}

// Splits loads into usable records (manifest order preserved) and failures;
// prints warnings and failures on the error stream.
std::vector<TrialRecord> harvest(const std::vector<LoadedTrial>& loaded, const Options& options,
                                 Failures& failures) {
    std::vector<TrialRecord> records;
    failures = {};
    for (const auto& trial : loaded) {
        if (!trial.record) {
            std::cerr << "error: " << trial.error << "\n";
            ++(trial.io_error ? failures.io : failures.data);
            continue;
        }
        for (const auto& warning : validate_trial(*trial.record, options.nominal_hz)) {
            std::cerr << "warning: " << trial.record->gaze.trial_id << ": " << warning.message
                      << "\n";
        }
        records.push_back(*trial.record);
    }
    return records;
}

std::string na_or(const std::optional<double>& value) {
    return value ? format_double(*value) : "NA";
}

ordered_json corr_json(const std::optional<CorrelationResult>& result) {
    ordered_json j;
    j["cc"] = result ? ordered_json(result->coefficient) : ordered_json(nullptr);
    j["p"] = result ? ordered_json(result->p_value) : ordered_json(nullptr);
    return j;
}

struct ScoredBatch {
    std::vector<TrialMeasures> measures; // sorted by trial_id
    std::vector<std::optional<SaL3Components>> components;
};

// Per-trial level scores plus MI components, sorted by trial_id, with batch
// PCA applied over the trials that have complete inputs. na_mask records
// which cells are real: bits 1/2/4/8/16 for l1/l2/components/l3/overall.
std::vector<SaScoreSet> score_batch(std::vector<TrialRecord>& records, const Options& options,
                                    std::vector<std::size_t>& na_mask, PcaModel* l3_model,
                                    PcaModel* overall_model) {
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return a.gaze.trial_id < b.gaze.trial_id;
    });

    struct PerTrial {
        std::optional<double> l1, l2;
        std::optional<SaL3Components> components;
    };
    std::vector<PerTrial> per(records.size());
    std::vector<SegmentationResult> segs(records.size());

    SegmentationOptions seg_options{options.count_first_run};
    parallel_for(records.size(), options.jobs, [&](std::size_t i) {
        segs[i] = segment_runs(records[i].gaze, seg_options);
        try {
            per[i].l1 = sa_l1(segs[i]);
        } catch (const Error&) {
        }
        try {
            per[i].components = sa_l3_components(motion_deltas(records[i].gaze));
        } catch (const Error&) {
        }
    });

    if (options.l2_pooled) {
        std::vector<double> all;
        for (const auto& seg : segs) {
            for (std::size_t m : event_lengths(seg)) all.push_back(static_cast<double>(m));
        }
        double mu = 0.0, sigma = 0.0;
        if (!all.empty()) {
            for (double v : all) mu += v;
            mu /= static_cast<double>(all.size());
            for (double v : all) sigma += (v - mu) * (v - mu);
            sigma = std::sqrt(sigma / static_cast<double>(all.size()));
        }
        for (std::size_t i = 0; i < records.size(); ++i) {
            try {
                per[i].l2 = sa_l2(segs[i], mu, sigma);
            } catch (const Error&) {
            }
        }
    } else {
        for (std::size_t i = 0; i < records.size(); ++i) {
            try {
                per[i].l2 = sa_l2(segs[i]);
            } catch (const Error&) {
            }
        }
    }

    std::vector<SaScoreSet> scores(records.size());
    std::vector<std::optional<double>> l3(records.size()), overall(records.size());

    std::vector<std::size_t> l3_rows;
    std::vector<std::array<double, 2>> l3_input;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (per[i].components) {
            l3_rows.push_back(i);
            l3_input.push_back({per[i].components->dir, per[i].components->spd});
        }
    }
    if (l3_input.size() >= 2) {
        auto batch = sa_l3_batch(l3_input, l3_model);
        for (std::size_t j = 0; j < l3_rows.size(); ++j) l3[l3_rows[j]] = batch[j];
    }

    std::vector<std::size_t> ov_rows;
    std::vector<std::array<double, 3>> ov_input;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (per[i].l1 && per[i].l2 && l3[i]) {
            ov_rows.push_back(i);
            ov_input.push_back({*per[i].l1, *per[i].l2, *l3[i]});
        }
    }
    if (ov_input.size() >= 2) {
        auto batch = sa_overall_batch(ov_input, overall_model);
        for (std::size_t j = 0; j < ov_rows.size(); ++j) overall[ov_rows[j]] = batch[j];
    }

    na_mask.assign(records.size(), 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        scores[i].trial_id = records[i].gaze.trial_id;
        scores[i].sa_l1 = per[i].l1.value_or(0.0);
        scores[i].sa_l2 = per[i].l2.value_or(0.0);
        if (per[i].components) {
            scores[i].sa_l3_dir = per[i].components->dir;
            scores[i].sa_l3_spd = per[i].components->spd;
        }
        scores[i].sa_l3 = l3[i].value_or(0.0);
        scores[i].sa_overall = overall[i].value_or(0.0);
        std::size_t mask = 0;
        if (per[i].l1) mask |= 1;
        if (per[i].l2) mask |= 2;
        if (per[i].components) mask |= 4;
        if (l3[i]) mask |= 8;
        if (overall[i]) mask |= 16;
        na_mask[i] = mask;
    }

    if (options.dump_runs) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            std::string csv = "object,start_idx,end_idx,length,duration_ms,is_event\n";
            for (const auto& run : segs[i].runs) {
                csv += run.object + ',' + std::to_string(run.start_index) + ',' +
                       std::to_string(run.end_index) + ',' + std::to_string(run.length()) + ',' +
                       format_double(run.duration_ms) + ',' + (run.is_event ? "1" : "0") + '\n';
            }
            write_file(fs::path(options.out) / (records[i].gaze.trial_id + "_runs.csv"), csv);
        }
    }

    return scores;
}

std::string cell(double value, bool present) { return present ? format_double(value) : "NA"; }

// Manifest with no trials is an input error (exit 1), not a data error.
bool manifest_empty(const std::vector<ManifestEntry>& entries, const std::string& path) {
    if (!entries.empty()) return false;
    std::cerr << "error: manifest " << path << " lists no trials\n";
    return true;
}

int cmd_score(const std::string& manifest_path, const Options& options) {
    auto entries = read_manifest(manifest_path);
    if (manifest_empty(entries, manifest_path)) return kExitUsage;
    auto loaded = load_trials(entries, options);
    Failures failures;
    auto records = harvest(loaded, options, failures);
    if (records.size() < 2) {
        std::cerr << "error: batch PCA needs at least 2 loadable trials, got "
                  << records.size() << "\n";
        return kExitData;
    }

    fs::create_directories(options.out);
    std::vector<std::size_t> mask;
    PcaModel l3_model, overall_model;
    auto scores = score_batch(records, options, mask, &l3_model, &overall_model);

    std::string csv = "trial_id,sa_l1,sa_l2,sa_l3_dir,sa_l3_spd,sa_l3,sa_overall\n";
    ordered_json trials_json = ordered_json::array();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        std::size_t m = mask[i];
        csv += s.trial_id + ',' + cell(s.sa_l1, m & 1) + ',' + cell(s.sa_l2, m & 2) + ',' +
               cell(s.sa_l3_dir, m & 4) + ',' + cell(s.sa_l3_spd, m & 4) + ',' +
               cell(s.sa_l3, m & 8) + ',' + cell(s.sa_overall, m & 16) + '\n';

        ordered_json t;
        t["trial_id"] = s.trial_id;
        t["sa_l1"] = m & 1 ? ordered_json(s.sa_l1) : ordered_json(nullptr);
        t["sa_l2"] = m & 2 ? ordered_json(s.sa_l2) : ordered_json(nullptr);
        t["sa_l3_dir"] = m & 4 ? ordered_json(s.sa_l3_dir) : ordered_json(nullptr);
        t["sa_l3_spd"] = m & 4 ? ordered_json(s.sa_l3_spd) : ordered_json(nullptr);
        t["sa_l3"] = m & 8 ? ordered_json(s.sa_l3) : ordered_json(nullptr);
        t["sa_overall"] = m & 16 ? ordered_json(s.sa_overall) : ordered_json(nullptr);
        trials_json.push_back(std::move(t));
    }
    write_file(fs::path(options.out) / "scores.csv", csv);

    ordered_json root;
    root["trials"] = std::move(trials_json);
    root["pca"] = {
        {"sa_l3",
         {{"loadings", l3_model.loadings},
          {"explained_variance_ratio", l3_model.explained_variance_ratio}}},
        {"sa_overall",
         {{"loadings", overall_model.loadings},
          {"explained_variance_ratio", overall_model.explained_variance_ratio}}},
    };
    write_file(fs::path(options.out) / "scores.json", root.dump(2) + "\n");

    return failures.exit_code();
}

int cmd_baselines(const std::string& manifest_path, const Options& options) {
    auto entries = read_manifest(manifest_path);
    if (manifest_empty(entries, manifest_path)) return kExitUsage;
    auto loaded = load_trials(entries, options);
    Failures failures;
    auto records = harvest(loaded, options, failures);
    if (records.empty()) {
        std::cerr << "error: no loadable trials\n";
        return kExitData;
    }
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return a.gaze.trial_id < b.gaze.trial_id;
    });

    struct Row {
        std::optional<double> gte, sge, rate, dwell;
    };
    std::vector<Row> rows(records.size());
    SegmentationOptions seg_options{options.count_first_run};
    parallel_for(records.size(), options.jobs, [&](std::size_t i) {
        auto seg = segment_runs(records[i].gaze, seg_options);
        try {
            auto model = build_transitions(seg);
            rows[i].gte = gte(model);
            rows[i].sge = sge(model);
        } catch (const Error&) {
        }
        try {
            rows[i].rate = gaze_rate(seg, records[i].gaze);
        } catch (const Error&) {
        }
        try {
            rows[i].dwell = dwell_time(seg);
        } catch (const Error&) {
        }
    });

    std::string csv = "trial_id,gte_bits,sge_bits,gaze_rate_hz,dwell_ms\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        csv += records[i].gaze.trial_id + ',' + na_or(rows[i].gte) + ',' + na_or(rows[i].sge) +
               ',' + na_or(rows[i].rate) + ',' + na_or(rows[i].dwell) + '\n';
    }
    fs::create_directories(options.out);
    write_file(fs::path(options.out) / "baselines.csv", csv);

    return failures.exit_code();
}

// One octagonal radar chart: the eight measures min-max normalized across the
// batch, the two requested trials overlaid, and a central circle per trial
// sized by driving performance.
std::string render_radar(const std::vector<TrialMeasures>& measures, const TrialMeasures& a,
                         const TrialMeasures& b) {
    struct Axis {
        const char* label;
        std::optional<double> TrialMeasures::* field;
    };
    constexpr Axis axes[] = {
        {"SA_L1", &TrialMeasures::sa_l1},        {"SA_L2", &TrialMeasures::sa_l2},
        {"SA_L3", &TrialMeasures::sa_l3},        {"Overall", &TrialMeasures::sa_overall},
        {"GTE", &TrialMeasures::gte},            {"SGE", &TrialMeasures::sge},
        {"Gaze rate", &TrialMeasures::gaze_rate}, {"Dwell", &TrialMeasures::dwell_time},
    };
    constexpr double kPi = 3.14159265358979323846;
    const double cx = 260.0, cy = 240.0, radius = 170.0;

    auto normalized = [&measures](std::optional<double> TrialMeasures::* field,
                                  const TrialMeasures& trial) {
        double lo = 0.0, hi = 0.0;
        bool seen = false;
        for (const auto& m : measures) {
            if (!(m.*field)) continue;
            double v = *(m.*field);
            lo = seen ? std::min(lo, v) : v;
            hi = seen ? std::max(hi, v) : v;
            seen = true;
        }
        if (!(trial.*field) || !seen || hi <= lo) return 0.0;
        return (*(trial.*field) - lo) / (hi - lo);
    };

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"500\" "
        "viewBox=\"0 0 520 500\">\n"
        "<rect width=\"520\" height=\"500\" fill=\"white\"/>\n";

    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        svg += "<circle cx=\"" + format_double(cx) + "\" cy=\"" + format_double(cy) +
               "\" r=\"" + format_double(radius * ring) +
               "\" fill=\"none\" stroke=\"#dddddd\"/>\n";
    }

    const std::size_t k = std::size(axes);
    for (std::size_t i = 0; i < k; ++i) {
        double angle = -0.5 * kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
        double x = cx + radius * std::cos(angle);
        double y = cy + radius * std::sin(angle);
        svg += "<line x1=\"" + format_double(cx) + "\" y1=\"" + format_double(cy) + "\" x2=\"" +
               format_double(x) + "\" y2=\"" + format_double(y) + "\" stroke=\"#bbbbbb\"/>\n";
        double lx = cx + (radius + 18.0) * std::cos(angle);
        double ly = cy + (radius + 18.0) * std::sin(angle);
        svg += "<text x=\"" + format_double(lx) + "\" y=\"" + format_double(ly) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + axes[i].label + "</text>\n";
    }

    const char* colors[] = {"#1f6fb4", "#e07b28"};
    const TrialMeasures* trials[] = {&a, &b};
    for (int t = 0; t < 2; ++t) {
        std::string points;
        for (std::size_t i = 0; i < k; ++i) {
            double angle =
                -0.5 * kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
            double r = radius * normalized(axes[i].field, *trials[t]);
            points += format_double(cx + r * std::cos(angle)) + ',' +
                      format_double(cy + r * std::sin(angle));
            if (i + 1 < k) points += ' ';
        }
        svg += std::string("<polygon points=\"") + points + "\" fill=\"" + colors[t] +
               "\" fill-opacity=\"0.25\" stroke=\"" + colors[t] + "\" stroke-width=\"2\"/>\n";
    }

    // Central performance marker, one circle per trial.
    double perf_lo = 0.0, perf_hi = 0.0;
    bool perf_seen = false;
    for (const auto& m : measures) {
        if (!m.performance) continue;
        perf_lo = perf_seen ? std::min(perf_lo, *m.performance) : *m.performance;
        perf_hi = perf_seen ? std::max(perf_hi, *m.performance) : *m.performance;
        perf_seen = true;
    }
    for (int t = 0; t < 2; ++t) {
        double norm = 0.0;
        if (trials[t]->performance && perf_seen && perf_hi > perf_lo) {
            norm = (*trials[t]->performance - perf_lo) / (perf_hi - perf_lo);
        }
        svg += "<circle cx=\"" + format_double(cx) + "\" cy=\"" + format_double(cy) + "\" r=\"" +
               format_double(6.0 + 24.0 * norm) + "\" fill=\"none\" stroke=\"" + colors[t] +
               "\" stroke-width=\"2\"/>\n";
        svg += "<rect x=\"20\" y=\"" + format_double(20.0 + 22.0 * t) +
               "\" width=\"14\" height=\"14\" fill=\"" + std::string(colors[t]) + "\"/>\n";
        svg += "<text x=\"40\" y=\"" + format_double(32.0 + 22.0 * t) +
               "\" font-size=\"13\">" + trials[t]->trial_id + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

// Resolves the --radar pair against the computed measures; returns kExitUsage
// on an unknown id.
int write_radar(const std::vector<TrialMeasures>& measures, const std::string& radar,
                const Options& options) {
    auto comma = radar.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= radar.size()) {
        std::cerr << "error: --radar wants two trial ids, e.g. --radar t001,t002\n";
        return kExitUsage;
    }
    std::string ids[2] = {radar.substr(0, comma), radar.substr(comma + 1)};
    const TrialMeasures* picked[2] = {nullptr, nullptr};
    for (int t = 0; t < 2; ++t) {
        for (const auto& m : measures) {
            if (m.trial_id == ids[t]) picked[t] = &m;
        }
        if (!picked[t]) {
            std::cerr << "error: unknown trial id '" << ids[t] << "' in --radar\n";
            return kExitUsage;
        }
    }
    fs::create_directories(options.out);
    write_file(fs::path(options.out) / "radar.svg", render_radar(measures, *picked[0], *picked[1]));
    return kExitOk;
}

int cmd_correlate(const std::string& manifest_path, const Options& options) {
    auto entries = read_manifest(manifest_path);
    if (manifest_empty(entries, manifest_path)) return kExitUsage;
    auto loaded = load_trials(entries, options);
    Failures failures;
    auto records = harvest(loaded, options, failures);
    if (records.size() < 8) {
        std::cerr << "error: correlation study needs at least 8 loadable trials, got "
                  << records.size() << "\n";
        return kExitData;
    }

    CorrelateOptions study_options;
    study_options.l2_pooled = options.l2_pooled;
    study_options.count_first_run = options.count_first_run;
    study_options.permutation = options.permutation;

    auto measures = compute_measures(records, study_options);
    auto report = correlate_measures(measures, study_options);

    ordered_json root;
    root["n"] = report.n;
    root["measures"] = ordered_json::array();
    for (const auto& row : report.measures) {
        ordered_json m;
        m["name"] = row.name;
        m["spearman"] = corr_json(row.spearman);
        m["kendall"] = corr_json(row.kendall);
        m["pearson"] = corr_json(row.pearson);
        m["excluded"] = row.excluded;
        root["measures"].push_back(std::move(m));
    }
    fs::create_directories(options.out);
    write_file(fs::path(options.out) / "report.json", root.dump(2) + "\n");

    if (!options.radar.empty()) {
        int rc = write_radar(measures, options.radar, options);
        if (rc != kExitOk) return rc;
    }
    return failures.exit_code();
}

int cmd_report(const std::string& manifest_path, const Options& options) {
    if (options.radar.empty()) {
        std::cerr << "error: report needs --radar A,B to pick the two trials\n";
        return kExitUsage;
    }
    auto entries = read_manifest(manifest_path);
    if (manifest_empty(entries, manifest_path)) return kExitUsage;
    auto loaded = load_trials(entries, options);
    Failures failures;
    auto records = harvest(loaded, options, failures);
    if (records.size() < 2) {
        std::cerr << "error: radar rendering needs at least 2 loadable trials\n";
        return kExitData;
    }

    CorrelateOptions study_options;
    study_options.l2_pooled = options.l2_pooled;
    study_options.count_first_run = options.count_first_run;

    auto measures = compute_measures(records, study_options);
    int rc = write_radar(measures, options.radar, options);
    if (rc != kExitOk) return rc;
    return failures.exit_code();
}

int cmd_synth(const std::vector<double>& thetas, std::uint64_t seed, double duration_s,
              double rate_hz, int objects, const Options& options) {
    for (double theta : thetas) {
        if (!(theta >= 0.0 && theta <= 1.0)) {
            std::cerr << "error: theta " << theta << " outside [0,1]\n";
            return kExitUsage;
        }
    }
    if (thetas.empty()) {
        std::cerr << "error: need at least one --theta value\n";
        return kExitUsage;
    }

    fs::create_directories(options.out);
    std::vector<std::string> gaze_names(thetas.size()), tel_names(thetas.size());
    std::vector<TrialRecord> records(thetas.size());
    parallel_for(thetas.size(), options.jobs, [&](std::size_t i) {
        SynthConfig config;
        config.theta = thetas[i];
        config.seed = seed + i;
        config.duration_s = duration_s;
        config.sample_rate_hz = rate_hz;
        config.object_count = objects;
        records[i] = generate_trial(config);
    });

    std::string manifest;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "t%03zu", i + 1);
        gaze_names[i] = std::string(id) + "_gaze.csv";
        tel_names[i] = std::string(id) + "_telemetry.csv";
        records[i].gaze.trial_id = id;
        records[i].telemetry.trial_id = id;
        write_file(fs::path(options.out) / gaze_names[i], write_gaze_csv(records[i].gaze));
        write_file(fs::path(options.out) / tel_names[i], write_telemetry_csv(records[i].telemetry));
        manifest += std::string(id) + ',' + gaze_names[i] + ',' + tel_names[i] + '\n';
    }
    write_file(fs::path(options.out) / "manifest.txt", manifest);
    return kExitOk;
}

} // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::string text = read_file(path);
    fs::path base = fs::path(path).parent_path();

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    std::size_t line_number = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            throw std::runtime_error(path + ": line " + std::to_string(line_number) +
                                     ": expected trial_id,gaze_path,telemetry_path");
        }
        ManifestEntry entry;
        entry.trial_id = line.substr(0, c1);
        entry.gaze_path = line.substr(c1 + 1, c2 - c1 - 1);
        entry.telemetry_path = line.substr(c2 + 1);
        if (entry.trial_id.empty() || entry.gaze_path.empty() || entry.telemetry_path.empty()) {
            throw std::runtime_error(path + ": line " + std::to_string(line_number) +
                                     ": empty field");
        }
        if (!seen.insert(entry.trial_id).second) {
            throw std::runtime_error(path + ": duplicate trial id '" + entry.trial_id + "'");
        }
        auto resolve = [&base](const std::string& p) {
            fs::path fp(p);
            return fp.is_relative() ? (base / fp).string() : p;
        };
        entry.gaze_path = resolve(entry.gaze_path);
        entry.telemetry_path = resolve(entry.telemetry_path);
        entries.push_back(std::move(entry));
    }
    return entries;
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"situation-awareness scoring for gaze traces"};

    Options options;
    app.add_option("--jobs", options.jobs, "worker threads (default: logical CPUs)");
    app.add_option("--out", options.out, "output directory")->capture_default_str();
    app.add_option("--nominal-hz", options.nominal_hz, "nominal gaze sample rate for validation")
        ->capture_default_str();
    app.add_flag("--l2-pooled", options.l2_pooled,
                 "z-score event lengths against the pooled batch, not per trial");
    app.add_flag("--count-first-run", options.count_first_run,
                 "treat the first gaze run of a trace as a perception event");
    app.add_option("--permutation", options.permutation,
                   "replace analytic p-values with an N-reshuffle permutation test");
    app.add_option("--radar", options.radar, "two trial ids for the radar chart, e.g. t001,t002");

    std::string manifest;
    auto* score = app.add_subcommand("score", "compute SA scores for a manifest of trials");
    score->add_option("manifest", manifest, "trial manifest")->required();
    score->add_flag("--dump-runs", options.dump_runs, "also write per-trial run tables");

    auto* baselines = app.add_subcommand("baselines", "compute entropy/rate/dwell baselines");
    baselines->add_option("manifest", manifest, "trial manifest")->required();

    auto* correlate_cmd =
        app.add_subcommand("correlate", "correlate all measures against driving performance");
    correlate_cmd->add_option("manifest", manifest, "trial manifest")->required();

    auto* report = app.add_subcommand("report", "render the radar chart for two trials");
    report->add_option("manifest", manifest, "trial manifest")->required();

    std::vector<double> thetas;
    std::uint64_t seed = 1;
    double duration_s = 12.0;
    double rate_hz = 90.0;
    int objects = 6;
    auto* synth = app.add_subcommand("synth", "generate a synthetic trial cohort");
    synth->add_option("--theta", thetas, "awareness levels in [0,1], one trial each")
        ->required()
        ->delimiter(',');
    synth->add_option("--seed", seed, "base seed; trial i uses seed+i")->capture_default_str();
    synth->add_option("--duration", duration_s, "trial length in seconds")->capture_default_str();
    synth->add_option("--rate", rate_hz, "gaze sample rate in Hz")->capture_default_str();
    synth->add_option("--objects", objects, "distinct object count")->capture_default_str();

    app.require_subcommand(1);
    // Global flags may appear after the subcommand name.
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("sagaze");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (score->parsed()) return cmd_score(manifest, options);
        if (baselines->parsed()) return cmd_baselines(manifest, options);
        if (correlate_cmd->parsed()) return cmd_correlate(manifest, options);
        if (report->parsed()) return cmd_report(manifest, options);
        if (synth->parsed()) return cmd_synth(thetas, seed, duration_s, rate_hz, objects, options);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace sagaze
