#include <doctest.h>

#include <cmath>

#include "maredl/detectors.hpp"
#include "maredl/features.hpp"
#include "world.hpp"

using namespace maredl;

TEST_SUITE_BEGIN("features");

namespace {

feat::FeatureSpec spec_with_edges(std::size_t edges) {
    feat::FeatureSpec spec;
    spec.roi = world::roi();
    spec.edge_count = edges;
    return spec;
}

ais::TrackSegment segment_of_length(std::size_t n, std::int64_t tau = 60) {
    ais::TrackSegment seg;
    seg.mmsi = 11;
    seg.tau = tau;
    for (std::size_t i = 0; i < n; ++i) {
        ais::AisRecord r;
        r.mmsi = 11;
        r.time = 1600000000 + static_cast<std::int64_t>(i) * tau;
        r.lon = 11.5 + 0.001 * static_cast<double>(i);
        r.lat = 54.3;
        r.sog = 15.0;
        r.cog = 90.0;
        r.edge = (i % 3 == 0) ? ais::kOutlierEdge : static_cast<int>(i % 2);
        seg.records.push_back(r);
    }
    return seg;
}

}  // namespace

TEST_CASE("regression window counts follow len - (T+L) + 1") {
    const auto spec = spec_with_edges(2);
    auto set = feat::make_regression_samples({segment_of_length(39)}, 10, 1, spec);
    CHECK(set.count == 29);
    CHECK(set.T == 10);
    CHECK(set.n_in == 4 + 3);
    CHECK(set.n_out == 4);
    CHECK(set.targets.size() == 29 * 4);

    auto skipped = feat::make_regression_samples({segment_of_length(10)}, 10, 1, spec);
    CHECK(skipped.count == 0);
    CHECK(skipped.skipped_short == 1);
}

TEST_CASE("regression features are normalized and one-hot encoded") {
    const auto spec = spec_with_edges(2);
    const auto seg = segment_of_length(12);
    auto set = feat::make_regression_samples({seg}, 10, 1, spec);
    REQUIRE(set.count == 2);

    // record 0: lon at the ROI west edge, edge = outlier
    CHECK(set.inputs[0] == doctest::Approx(0.0));          // lon
    CHECK(set.inputs[1] == doctest::Approx(1.0 / 3.0));    // lat mid-range
    CHECK(set.inputs[2] == doctest::Approx(0.25));         // cog 90/360
    CHECK(set.inputs[3] == doctest::Approx(0.5));          // sog 15/30
    CHECK(set.inputs[4] == 0.0);                           // edge 0 slot
    CHECK(set.inputs[5] == 0.0);                           // edge 1 slot
    CHECK(set.inputs[6] == 1.0);                           // outlier slot

    // record 1 carries edge 1
    CHECK(set.inputs[7 + 4] == 0.0);
    CHECK(set.inputs[7 + 5] == 1.0);
    CHECK(set.inputs[7 + 6] == 0.0);

    for (double v : set.inputs) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (double v : set.targets) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // an out-of-graph edge label is a hard error
    auto bad = segment_of_length(12);
    bad.records[3].edge = 7;
    CHECK_THROWS_AS(feat::make_regression_samples({bad}, 10, 1, spec),
                    std::invalid_argument);
}

TEST_CASE("ut windows label by turn angle") {
    ais::TrackSegment straight = segment_of_length(70, 3);
    auto set = feat::make_ut_samples({straight}, 60, 30.0);
    CHECK(set.count == 70 - 60 + 1);
    for (int label : set.labels) CHECK(label == 0);

    // a 40-degree sweep inside the window flips the label
    ais::TrackSegment turning = segment_of_length(60, 3);
    for (std::size_t i = 0; i < 60; ++i) {
        turning.records[i].cog = 100.0 + 40.0 * static_cast<double>(i) / 59.0;
    }
    auto anomalous = feat::make_ut_samples({turning}, 60, 30.0);
    REQUIRE(anomalous.count == 1);
    CHECK(anomalous.labels[0] == 1);

    // labels agree with the turn-angle criterion window by window
    ais::TrackSegment mixed = segment_of_length(120, 3);
    for (std::size_t i = 0; i < 120; ++i) {
        mixed.records[i].cog =
            std::fmod(10.0 + (i > 60 ? (i - 60) * 1.5 : 0.0), 360.0);
    }
    auto labeled = feat::make_ut_samples({mixed}, 60, 30.0);
    for (std::size_t w = 0; w < labeled.count; ++w) {
        std::vector<double> cogs;
        for (std::size_t t = 0; t < 60; ++t) {
            cogs.push_back(mixed.records[w + t].cog);
        }
        CHECK(labeled.labels[w] == (det::turn_angle(cogs) > 30.0 ? 1 : 0));
    }
}

TEST_CASE("oos pairs carry the relative time feature") {
    ais::VesselTrack track;
    track.mmsi = 5;
    track.records = {{5, 1000, 12.0, 54.3, 10, 90, 70, 0, -1},
                     {5, 1060, 12.01, 54.3, 10, 90, 70, 0, -1},
                     {5, 1260, 12.02, 54.3, 10, 90, 70, 0, -1}};
    const auto spec = spec_with_edges(0);
    auto set = feat::make_oos_samples({track}, 180.0, spec);
    REQUIRE(set.count == 2);
    CHECK(set.T == 2);
    CHECK(set.n_in == 5);

    // first element's time feature is always zero
    CHECK(set.inputs[4] == 0.0);
    CHECK(set.inputs[9] == doctest::Approx(60.0 / 3600.0));
    CHECK(set.labels[0] == 0);  // 60 s gap

    CHECK(set.inputs[10 + 4] == 0.0);
    CHECK(set.inputs[10 + 9] == doctest::Approx(200.0 / 3600.0));
    CHECK(set.labels[1] == 1);  // 200 s > 180 s

    // caps at one hour
    ais::VesselTrack long_gap;
    long_gap.mmsi = 6;
    long_gap.records = {{6, 0, 12.0, 54.3, 10, 90, 70, 0, -1},
                        {6, 7200, 12.0, 54.3, 10, 90, 70, 0, -1}};
    auto capped = feat::make_oos_samples({long_gap}, 180.0, spec);
    CHECK(capped.inputs[9] == 1.0);
}

TEST_CASE("balance_classes downsamples the majority deterministically") {
    ais::VesselTrack track;
    track.mmsi = 5;
    std::int64_t t = 0;
    for (int i = 0; i < 140; ++i) {
        // 40 anomalous gaps (400 s), 100 normal (60 s)
        t += (i % 7 == 3 || i % 7 == 5 ? 400 : 60);
        track.records.push_back({5, t, 12.0, 54.3, 10, 90, 70, 0, -1});
    }
    const auto spec = spec_with_edges(0);
    auto set = feat::make_oos_samples({track}, 180.0, spec);
    std::size_t pos = 0;
    for (int l : set.labels) pos += l;
    REQUIRE(pos > 0);
    REQUIRE(pos < set.count - pos);

    auto balanced = feat::balance_classes(set, 31);
    std::size_t bpos = 0;
    for (int l : balanced.labels) bpos += l;
    CHECK(bpos == pos);
    CHECK(balanced.count == 2 * pos);

    auto again = feat::balance_classes(set, 31);
    CHECK(again.inputs == balanced.inputs);  // same seed, same subset
    auto other = feat::balance_classes(set, 32);
    CHECK(other.inputs != balanced.inputs);

    // already balanced stays unchanged
    auto twice = feat::balance_classes(balanced, 99);
    CHECK(twice.inputs == balanced.inputs);

    // a one-class set cannot be balanced
    feat::SampleSet lonely;
    lonely.count = 2;
    lonely.T = 1;
    lonely.n_in = 1;
    lonely.inputs = {0.1, 0.2};
    lonely.labels = {1, 1};
    lonely.sample_mmsi = {1, 2};
    CHECK_THROWS_AS(feat::balance_classes(lonely, 1), std::invalid_argument);
}

TEST_CASE("vessel split respects the fractions") {
    std::vector<std::int64_t> mmsis;
    for (int i = 0; i < 100; ++i) mmsis.push_back(1000 + i);
    const auto assign = feat::split_mmsi(mmsis, 0.5, 0.1, 7);
    std::size_t train = 0, val = 0, test = 0;
    for (int a : assign) {
        if (a == 0) ++train;
        if (a == 1) ++val;
        if (a == 2) ++test;
    }
    CHECK(train == 50);
    CHECK(val == 10);
    CHECK(test == 40);
    CHECK(feat::split_mmsi(mmsis, 0.5, 0.1, 7) == assign);  // deterministic
    CHECK_THROWS_AS(feat::split_mmsi(mmsis, 0.8, 0.5, 7), std::invalid_argument);
}

TEST_CASE("sample csv dump has one row per sample") {
    const auto spec = spec_with_edges(0);
    ais::VesselTrack track;
    track.mmsi = 5;
    track.records = {{5, 0, 12.0, 54.3, 10, 90, 70, 0, -1},
                     {5, 60, 12.0, 54.3, 10, 90, 70, 0, -1},
                     {5, 120, 12.0, 54.3, 10, 90, 70, 0, -1}};
    auto set = feat::make_oos_samples({track}, 180.0, spec);
    const auto csv = feat::samples_to_csv(set);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == set.count + 1);
}

TEST_SUITE_END();
