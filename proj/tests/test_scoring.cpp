#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sagaze/error.hpp"
#include "sagaze/scoring.hpp"
#include "sagaze/segmentation.hpp"

using namespace sagaze;

namespace {

GazeTrace trace_of(const std::vector<std::string>& labels) {
    GazeTrace trace;
    trace.trial_id = "score";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        trace.samples.push_back({i * 10.0, {double(i), 0.0}, labels[i]});
    }
    return trace;
}

GazeTrace trace_at(const std::vector<Vec2>& points) {
    GazeTrace trace;
    trace.trial_id = "path";
    for (std::size_t i = 0; i < points.size(); ++i) {
        trace.samples.push_back({i * 10.0, points[i], "a"});
    }
    return trace;
}

} // namespace

// ---- SA_L1 ----

TEST_CASE("sa_l1: worked label sequences") {
    CHECK(sa_l1(segment_runs(trace_of({"A", "A", "A", "B", "B", "C", "C", "C", "C", "A"}))) ==
          doctest::Approx(0.7).epsilon(1e-12));
    CHECK(sa_l1(segment_runs(trace_of({"A", "A", "A", "A"}))) == 0.0);
    CHECK(sa_l1(segment_runs(trace_of({"A", "B"}))) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(sa_l1(segment_runs(GazeTrace{})), Error);
}

TEST_CASE("sa_l1: stays inside [0,1] on random label sequences") {
    std::mt19937_64 rng(21);
    const char* alphabet[] = {"", "A", "B", "C", "D"};
    for (int round = 0; round < 300; ++round) {
        std::vector<std::string> labels;
        std::size_t length = 1 + rng() % 50;
        for (std::size_t i = 0; i < length; ++i) labels.push_back(alphabet[rng() % 5]);
        double score = sa_l1(segment_runs(trace_of(labels)));
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
    }
}

// ---- SA_L2 ----

TEST_CASE("sa_l2: events [2,4] over 10 samples weight at z = +-1") {
    // runs A(4), B(2), C(4): events B and C, mu = 3, sigma = 1
    auto seg = segment_runs(trace_of({"A", "A", "A", "A", "B", "B", "C", "C", "C", "C"}));
    REQUIRE(event_lengths(seg) == std::vector<std::size_t>{2, 4});
    CHECK(sa_l2(seg) == doctest::Approx(0.14518243471148602).epsilon(1e-12));
}

TEST_CASE("sa_l2: equal event lengths sit at z = 0") {
    // runs A(2), B(3), C(3) with a background gap: events B and C, sigma = 0
    auto seg = segment_runs(trace_of({"A", "A", "B", "B", "B", "", "", "C", "C", "C"}));
    REQUIRE(event_lengths(seg) == std::vector<std::size_t>{3, 3});
    CHECK(sa_l2(seg) == doctest::Approx(0.23936536824085962).epsilon(1e-12));
}

TEST_CASE("sa_l2: no events scores zero; empty trace raises") {
    CHECK(sa_l2(segment_runs(trace_of({"A", "A", "A"}))) == 0.0);
    CHECK_THROWS_AS(sa_l2(segment_runs(GazeTrace{})), Error);
}

TEST_CASE("sa_l2: pooled variant z-scores against the supplied statistics") {
    auto seg = segment_runs(trace_of({"A", "A", "A", "A", "B", "B", "C", "C", "C", "C"}));
    // against mu=2, sigma=2 the events [2,4] sit at z = 0 and z = 1
    const double phi0 = 0.3989422804014327, phi1 = 0.24197072451914337;
    CHECK(sa_l2(seg, 2.0, 2.0) ==
          doctest::Approx((2.0 * phi0 + 4.0 * phi1) / 10.0).epsilon(1e-12));
    // sigma = 0 degenerates to phi(0) for every event
    CHECK(sa_l2(seg, 3.0, 0.0) == doctest::Approx(6.0 * phi0 / 10.0).epsilon(1e-12));
}

TEST_CASE("sa_l2 never exceeds 0.39895 * sa_l1") {
    std::mt19937_64 rng(22);
    const char* alphabet[] = {"", "A", "B", "C"};
    for (int round = 0; round < 300; ++round) {
        std::vector<std::string> labels;
        std::size_t length = 1 + rng() % 60;
        for (std::size_t i = 0; i < length; ++i) labels.push_back(alphabet[rng() % 4]);
        auto seg = segment_runs(trace_of(labels));
        CHECK(sa_l2(seg) <= 0.3989422804014327 * sa_l1(seg) + 1e-15);
    }
}

// ---- motion deltas ----

TEST_CASE("motion deltas: counterclockwise right angle gives dir = +1") {
    auto deltas = motion_deltas(trace_at({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    REQUIRE(deltas.dir.size() == 2);
    CHECK(deltas.dir[0] == 1.0);
    CHECK(deltas.dir[1] == 1.0);

    // mirrored path turns clockwise
    auto mirrored = motion_deltas(trace_at({{0, 0}, {1, 0}, {1, -1}, {0, -1}}));
    CHECK(mirrored.dir[0] == -1.0);
}

TEST_CASE("motion deltas: speed change of 0.01 maps to +-2") {
    // vector lengths run 1.00 -> 1.01 -> 1.00
    auto deltas = motion_deltas(trace_at({{0, 0}, {1, 0}, {1, 1.01}, {2, 1.01}}));
    REQUIRE(deltas.spd.size() == 2);
    CHECK(deltas.spd[0] == doctest::Approx(2.0).epsilon(1e-9));  // speeding up
    CHECK(deltas.spd[1] == doctest::Approx(-2.0).epsilon(1e-9)); // slowing down
}

TEST_CASE("motion deltas: collinear equal steps have zero turns and no speed entries") {
    auto deltas = motion_deltas(trace_at({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}));
    REQUIRE(deltas.dir.size() == 3);
    for (double d : deltas.dir) CHECK(d == 0.0);
    CHECK(deltas.spd.empty());
    CHECK(deltas.dropped_zero_deltas == 3);
}

TEST_CASE("motion deltas: repeated positions are dropped before pairing") {
    auto deltas = motion_deltas(trace_at({{0, 0}, {0, 0}, {1, 0}, {1, 1}}));
    CHECK(deltas.dropped_zero_vectors == 1);
    REQUIRE(deltas.dir.size() == 1);
    CHECK(deltas.dir[0] == 1.0);

    // a fully stationary gaze leaves nothing to pair
    auto still = motion_deltas(trace_at({{2, 2}, {2, 2}, {2, 2}, {2, 2}}));
    CHECK(still.dropped_zero_vectors == 3);
    CHECK(still.dir.empty());
    CHECK(still.spd.empty());
}

TEST_CASE("motion deltas: fewer than 4 samples is too short") {
    try {
        motion_deltas(trace_at({{0, 0}, {1, 0}, {1, 1}}));
        FAIL("expected TooShort");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooShort);
    }
}

TEST_CASE("motion deltas: dir bounded, scale-invariant, sign-flipped by mirroring") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> step;
    std::vector<Vec2> points{{0, 0}};
    for (int i = 0; i < 120; ++i) {
        points.push_back({points.back().x + step(rng), points.back().y + step(rng)});
    }
    auto base = motion_deltas(trace_at(points));
    for (double d : base.dir) {
        CHECK(d >= -1.0);
        CHECK(d <= 1.0);
    }

    // power-of-two scaling keeps every float identical
    auto scaled_points = points;
    for (auto& p : scaled_points) p = {4.0 * p.x, 4.0 * p.y};
    auto scaled = motion_deltas(trace_at(scaled_points));
    REQUIRE(scaled.dir.size() == base.dir.size());
    for (std::size_t i = 0; i < base.dir.size(); ++i) CHECK(scaled.dir[i] == base.dir[i]);

    auto mirrored_points = points;
    for (auto& p : mirrored_points) p.y = -p.y;
    auto mirrored = motion_deltas(trace_at(mirrored_points));
    for (std::size_t i = 0; i < base.dir.size(); ++i) CHECK(mirrored.dir[i] == -base.dir[i]);
    // speed magnitudes are unaffected by the reflection
    REQUIRE(mirrored.spd.size() == base.spd.size());
    for (std::size_t i = 0; i < base.spd.size(); ++i) CHECK(mirrored.spd[i] == base.spd[i]);

    // translation leaves the deltas untouched
    auto shifted_points = points;
    for (auto& p : shifted_points) p = {p.x + 500.0, p.y - 125.0};
    auto shifted = motion_deltas(trace_at(shifted_points));
    for (std::size_t i = 0; i < base.dir.size(); ++i) {
        CHECK(shifted.dir[i] == doctest::Approx(base.dir[i]).epsilon(1e-9));
    }
}

// ---- SA_L3 components ----

TEST_CASE("sa_l3 components: short or constant series map to zero") {
    MotionDeltaSeries deltas;
    deltas.dir = std::vector<double>(16, 0.5); // 16 entries -> only 15 pairs
    deltas.spd = std::vector<double>(40, 1.0); // long enough but constant
    auto components = sa_l3_components(deltas);
    CHECK(components.dir == 0.0);
    CHECK(components.spd == 0.0);
}

TEST_CASE("sa_l3 components: perfectly linear lag structure maps to zero") {
    MotionDeltaSeries deltas;
    double v = 1.0;
    for (int i = 0; i < 40; ++i) {
        deltas.dir.push_back(v);
        v *= 1.1; // lag pairs (x, 1.1x) are exactly collinear
    }
    CHECK(sa_l3_components(deltas).dir == 0.0);
}

TEST_CASE("sa_l3 components: AR(1) through tanh keeps strong lag dependence") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> noise;
    MotionDeltaSeries deltas;
    double z = 0.0;
    for (int i = 0; i < 5000; ++i) {
        z = 0.8 * z + 0.6 * noise(rng); // stationary sd 1
        deltas.dir.push_back(std::tanh(z));
    }
    auto components = sa_l3_components(deltas);
    CHECK(components.dir > 0.3);
    CHECK(components.spd == 0.0); // empty series
}

TEST_CASE("sa_l3 components: white noise lands near zero") {
    std::mt19937_64 rng(25);
    std::normal_distribution<double> noise;
    MotionDeltaSeries deltas;
    for (int i = 0; i < 5000; ++i) deltas.spd.push_back(noise(rng));
    auto components = sa_l3_components(deltas);
    CHECK(std::abs(components.spd) < 0.05);
}

// ---- batch PCA fusions ----

TEST_CASE("sa_l3 batch: equal columns reduce to sqrt2 * z of either") {
    std::vector<std::array<double, 2>> components = {{1, 1}, {2, 2}, {3, 3}};
    PcaModel model;
    auto scores = sa_l3_batch(components, &model);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(scores[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(model.loadings[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sa_l3 batch: identical trials have no variance to project") {
    auto scores = sa_l3_batch({{0.4, 0.2}, {0.4, 0.2}});
    CHECK(scores[0] == 0.0);
    CHECK(scores[1] == 0.0);

    try {
        sa_l3_batch({{0.4, 0.2}});
        FAIL("expected TooFewTrials");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooFewTrials);
    }
}

TEST_CASE("sa_overall batch: three equal columns load at 1/sqrt3") {
    std::vector<std::array<double, 3>> levels = {{1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
    PcaModel model;
    auto scores = sa_overall_batch(levels, &model);
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    for (double l : model.loadings) CHECK(l == doctest::Approx(inv_sqrt3).epsilon(1e-12));
    CHECK(scores[2] == doctest::Approx(std::sqrt(3.0) * 1.224744871391589).epsilon(1e-9));
}

TEST_CASE("sa_overall batch: a flat column reduces to the 2-feature projection") {
    std::vector<std::array<double, 3>> levels = {{1, 5, 2}, {2, 5, 4}, {3, 5, 6}};
    auto three = sa_overall_batch(levels);
    auto two = sa_l3_batch({{1, 2}, {2, 4}, {3, 6}});
    REQUIRE(three.size() == two.size());
    for (std::size_t i = 0; i < three.size(); ++i) {
        CHECK(three[i] == doctest::Approx(two[i]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(sa_overall_batch({{1, 2, 3}}), Error);
}
