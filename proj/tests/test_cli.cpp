#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sagaze/cli.hpp"

using namespace sagaze;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("sagaze_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string str() const { return path.string(); }
    std::string file(const std::string& child) const { return (path / child).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    return lines;
}

// Generates a small cohort into dir and returns the manifest path.
std::string make_cohort(const TempDir& dir, const std::string& thetas,
                        const std::string& duration = "2") {
    int rc = run_cli({"synth", "--theta", thetas, "--seed", "11", "--duration", duration, "--out",
                      dir.str()});
    REQUIRE(rc == 0);
    return dir.file("manifest.txt");
}

} // namespace

TEST_CASE("cli synth: writes csv pairs and a manifest, deterministically") {
    TempDir dir("synth");
    auto manifest = make_cohort(dir, "0.1,0.9");
    CHECK(fs::exists(dir.file("t001_gaze.csv")));
    CHECK(fs::exists(dir.file("t001_telemetry.csv")));
    CHECK(fs::exists(dir.file("t002_gaze.csv")));
    CHECK(fs::exists(dir.file("t002_telemetry.csv")));
    CHECK(slurp(manifest) ==
          "t001,t001_gaze.csv,t001_telemetry.csv\nt002,t002_gaze.csv,t002_telemetry.csv\n");

    auto first = slurp(dir.file("t001_gaze.csv"));
    TempDir again("synth_again");
    make_cohort(again, "0.1,0.9");
    CHECK(slurp(again.file("t001_gaze.csv")) == first);
}

TEST_CASE("cli synth: rejects out-of-range theta") {
    TempDir dir("synth_bad");
    CHECK(run_cli({"synth", "--theta", "1.5", "--out", dir.str()}) == 1);
    CHECK(run_cli({"synth", "--theta", "-0.2", "--out", dir.str()}) == 1);
}

TEST_CASE("cli score: csv and json outputs for a small batch") {
    TempDir dir("score");
    auto manifest = make_cohort(dir, "0.2,0.8");
    CHECK(run_cli({"score", manifest, "--out", dir.str()}) == 0);

    auto csv = slurp(dir.file("scores.csv"));
    CHECK(csv.rfind("trial_id,sa_l1,sa_l2,sa_l3_dir,sa_l3_spd,sa_l3,sa_overall\n", 0) == 0);
    CHECK(count_lines(csv) == 3); // header + 2 trials
    CHECK(csv.find("\nt002,") != std::string::npos);

    auto json = nlohmann::json::parse(slurp(dir.file("scores.json")));
    REQUIRE(json["trials"].size() == 2);
    CHECK(json["trials"][0]["trial_id"] == "t001");
    CHECK(json["pca"]["sa_overall"]["loadings"].size() == 3);
    // two-trial batches are fully explained by one component
    CHECK(double(json["pca"]["sa_l3"]["explained_variance_ratio"]) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli score: one trial cannot anchor the batch PCA") {
    TempDir dir("score_one");
    auto manifest = make_cohort(dir, "0.5");
    CHECK(run_cli({"score", manifest, "--out", dir.str()}) == 2);
}

TEST_CASE("cli score: --dump-runs adds per-trial run tables") {
    TempDir dir("dump");
    auto manifest = make_cohort(dir, "0.3,0.7");
    CHECK(run_cli({"score", manifest, "--dump-runs", "--out", dir.str()}) == 0);
    auto runs = slurp(dir.file("t001_runs.csv"));
    CHECK(runs.rfind("object,start_idx,end_idx,length,duration_ms,is_event\n", 0) == 0);
    CHECK(count_lines(runs) > 1);
}

TEST_CASE("cli: empty manifest is an input error") {
    TempDir dir("empty");
    spit(dir.file("manifest.txt"), "# a comment\n\n");
    CHECK(run_cli({"score", dir.file("manifest.txt")}) == 1);
    CHECK(run_cli({"baselines", dir.file("manifest.txt")}) == 1);
    CHECK(run_cli({"correlate", dir.file("manifest.txt")}) == 1);
}

TEST_CASE("cli: missing manifest or trial file is an I/O error") {
    TempDir dir("missing");
    CHECK(run_cli({"score", dir.file("nope.txt")}) == 1);

    auto manifest = make_cohort(dir, "0.2,0.8,0.5");
    fs::remove(dir.file("t002_gaze.csv"));
    // the other two trials still score, but the exit reports the I/O failure
    CHECK(run_cli({"score", manifest, "--out", dir.str()}) == 1);
    CHECK(count_lines(slurp(dir.file("scores.csv"))) == 3);
}

TEST_CASE("cli: malformed trial content is a data error") {
    TempDir dir("malformed");
    auto manifest = make_cohort(dir, "0.2,0.8,0.5");
    spit(dir.file("t003_gaze.csv"), "t_ms,x,y,object\n0,banana,0,a\n");
    CHECK(run_cli({"score", manifest, "--out", dir.str()}) == 2);
    // the healthy trials were still written
    auto csv = slurp(dir.file("scores.csv"));
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find("t003") == std::string::npos);
}

TEST_CASE("cli: duplicate trial ids in the manifest are rejected") {
    TempDir dir("dupes");
    make_cohort(dir, "0.2,0.8");
    spit(dir.file("manifest.txt"),
         "t001,t001_gaze.csv,t001_telemetry.csv\nt001,t002_gaze.csv,t002_telemetry.csv\n");
    CHECK(run_cli({"score", dir.file("manifest.txt"), "--out", dir.str()}) == 1);
}

TEST_CASE("cli baselines: all-background trials show NA cells") {
    TempDir dir("baselines");
    std::string gaze = "t_ms,x,y,object\n";
    for (int i = 0; i < 30; ++i) gaze += std::to_string(i * 100) + ",1,2,\n";
    spit(dir.file("bg_gaze.csv"), gaze);
    spit(dir.file("bg_telemetry.csv"), "t_ms,speed_mps\n0,11\n100,12\n200,11\n");
    spit(dir.file("manifest.txt"), "bg,bg_gaze.csv,bg_telemetry.csv\n");

    CHECK(run_cli({"baselines", dir.file("manifest.txt"), "--out", dir.str()}) == 0);
    auto csv = slurp(dir.file("baselines.csv"));
    CHECK(csv.rfind("trial_id,gte_bits,sge_bits,gaze_rate_hz,dwell_ms\n", 0) == 0);
    // no runs: entropies and dwell are NA, the event rate is simply 0
    CHECK(csv.find("bg,NA,NA,0,NA\n") != std::string::npos);
}

TEST_CASE("cli baselines: normal cohort fills every cell") {
    TempDir dir("baselines_full");
    auto manifest = make_cohort(dir, "0.4,0.6");
    CHECK(run_cli({"baselines", manifest, "--out", dir.str()}) == 0);
    auto csv = slurp(dir.file("baselines.csv"));
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find("NA") == std::string::npos);
}

TEST_CASE("cli correlate: report schema and radar output") {
    TempDir dir("correlate");
    auto manifest = make_cohort(dir, "0.1,0.2,0.3,0.4,0.6,0.7,0.8,0.9", "3");
    CHECK(run_cli({"correlate", manifest, "--out", dir.str(), "--radar", "t001,t008"}) == 0);

    auto report = nlohmann::json::parse(slurp(dir.file("report.json")));
    CHECK(report["n"] == 8);
    REQUIRE(report["measures"].size() == 8);
    for (const auto& row : report["measures"]) {
        CHECK(row.contains("name"));
        CHECK(row.contains("spearman"));
        CHECK(row["spearman"].contains("cc"));
        CHECK(row["spearman"].contains("p"));
        CHECK(row.contains("kendall"));
        CHECK(row.contains("pearson"));
        CHECK(row.contains("excluded"));
    }

    auto svg = slurp(dir.file("radar.svg"));
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t polygons = 0;
    for (std::size_t at = svg.find("<polygon"); at != std::string::npos;
         at = svg.find("<polygon", at + 1)) {
        ++polygons;
    }
    CHECK(polygons == 2);
    CHECK(svg.find("SA_L1") != std::string::npos);
    CHECK(svg.find("Dwell") != std::string::npos);
}

TEST_CASE("cli correlate: too few trials, unknown radar ids") {
    TempDir dir("correlate_small");
    auto manifest = make_cohort(dir, "0.1,0.3,0.5,0.7,0.9");
    CHECK(run_cli({"correlate", manifest, "--out", dir.str()}) == 2);

    TempDir full("correlate_radar");
    auto ok = make_cohort(full, "0.1,0.2,0.3,0.4,0.6,0.7,0.8,0.9");
    CHECK(run_cli({"correlate", ok, "--out", full.str(), "--radar", "t001,missing"}) == 1);
    CHECK(run_cli({"correlate", ok, "--out", full.str(), "--radar", "t001"}) == 1);
}

TEST_CASE("cli report: renders the radar without the study") {
    TempDir dir("report");
    auto manifest = make_cohort(dir, "0.2,0.8");
    CHECK(run_cli({"report", manifest, "--out", dir.str()}) == 1); // --radar required
    CHECK(run_cli({"report", manifest, "--out", dir.str(), "--radar", "t001,t002"}) == 0);
    CHECK(fs::exists(dir.file("radar.svg")));
    CHECK_FALSE(fs::exists(dir.file("report.json")));
}

TEST_CASE("cli: identical outputs regardless of worker count") {
    TempDir one("jobs_one");
    TempDir four("jobs_four");
    auto m1 = make_cohort(one, "0.15,0.35,0.55,0.75,0.95,0.25,0.45,0.65");
    auto m4 = make_cohort(four, "0.15,0.35,0.55,0.75,0.95,0.25,0.45,0.65");
    CHECK(run_cli({"score", m1, "--out", one.str(), "--jobs", "1"}) == 0);
    CHECK(run_cli({"score", m4, "--out", four.str(), "--jobs", "4"}) == 0);
    CHECK(slurp(one.file("scores.csv")) == slurp(four.file("scores.csv")));
    CHECK(slurp(one.file("scores.json")) == slurp(four.file("scores.json")));

    CHECK(run_cli({"correlate", m1, "--out", one.str(), "--jobs", "1"}) == 0);
    CHECK(run_cli({"correlate", m4, "--out", four.str(), "--jobs", "4"}) == 0);
    CHECK(slurp(one.file("report.json")) == slurp(four.file("report.json")));
}

TEST_CASE("cli: argument errors") {
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({"score"}) == 1);          // manifest missing
    CHECK(run_cli({"synth"}) == 1);          // theta missing
    CHECK(run_cli({"--help"}) == 0);
}
