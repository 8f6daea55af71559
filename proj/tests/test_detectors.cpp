#include <doctest.h>

#include <cmath>
#include <random>

#include "maredl/detectors.hpp"

using namespace maredl;

TEST_SUITE_BEGIN("detectors");

namespace {

// the documented uncertainty ramp: lon 0.01..0.30, lat 0.02..0.31
std::vector<std::vector<double>> ramp_uncertainties() {
    std::vector<std::vector<double>> u;
    for (int j = 1; j <= 30; ++j) {
        u.push_back({j / 100.0, (j + 1) / 100.0});
    }
    return u;
}

}  // namespace

TEST_CASE("detect_at reproduces the worked ramp example exactly") {
    const auto u = ramp_uncertainties();
    const double third = 1.0 / 30.0;

    auto at_threshold = det::detect_at(u, third);
    CHECK(std::abs(at_threshold.min_normalized - third) < 1e-12);
    CHECK_FALSE(at_threshold.anomalous);  // strict inequality

    CHECK(det::detect_at(u, third + 1e-9).anomalous);
    CHECK_FALSE(det::detect_at(u, third - 1e-9).anomalous);
}

TEST_CASE("detect_at on constant uncertainties never fires") {
    std::vector<std::vector<double>> u(10, std::vector<double>{0.5, 0.8});
    const auto v = det::detect_at(u, 1.0);
    CHECK(v.min_normalized == doctest::Approx(1.0));
    CHECK_FALSE(v.anomalous);
}

TEST_CASE("detect_at is scale invariant per feature") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.01, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::vector<double>> u;
        for (int j = 0; j < 12; ++j) u.push_back({d(rng), d(rng), d(rng)});
        const auto base = det::detect_at(u, 0.4);
        const double scales[3] = {d(rng), d(rng), d(rng)};
        auto scaled = u;
        for (auto& row : scaled) {
            for (int f = 0; f < 3; ++f) row[f] *= scales[f];
        }
        const auto v = det::detect_at(scaled, 0.4);
        CHECK(v.anomalous == base.anomalous);
        CHECK(v.min_normalized == doctest::Approx(base.min_normalized));
    }
}

TEST_CASE("lowering the threshold never flags more") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.01, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::vector<double>> u;
        for (int j = 0; j < 8; ++j) u.push_back({d(rng), d(rng)});
        const bool low = det::detect_at(u, 0.4).anomalous;
        const bool high = det::detect_at(u, 0.7).anomalous;
        if (low) CHECK(high);  // flagged at 0.4 implies flagged at 0.7
    }
}

TEST_CASE("detect_at input validation") {
    CHECK_THROWS_AS(det::detect_at({{0.1, 0.2}}, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(det::detect_at({{0.1}, {0.0}}, 0.4), std::runtime_error);
    CHECK_THROWS_AS(det::detect_at({{0.1}, {-0.5}}, 0.4), std::runtime_error);
    CHECK_THROWS_AS(det::detect_at({{0.1}, {0.1, 0.2}}, 0.4),
                    std::invalid_argument);
}

TEST_CASE("scan_segment_at chunks non-overlapping and drops the tail") {
    det::DetectionThresholds th;
    th.n_windows = 30;
    th.theta_at = 0.4;
    std::size_t calls = 0;
    auto predictor = [&](std::size_t) -> std::vector<double> {
        ++calls;
        return {0.5, 0.5};
    };
    const auto verdicts = det::scan_segment_at(78, 10, th, predictor);
    CHECK(verdicts.size() == 2);  // floor(78 / 39)
    CHECK(calls == 60);           // 30 windows per chunk
    CHECK(verdicts[0].first_point == 0);
    CHECK(verdicts[1].first_point == 39);
    CHECK(verdicts[0].n_points == 39);

    CHECK(det::scan_segment_at(38, 10, th, predictor).empty());
}

TEST_CASE("turn_angle matches the documented evaluations") {
    CHECK(det::turn_angle({350, 359, 5, 10}) == doctest::Approx(14.0));
    CHECK(det::turn_angle({80, 85, 95}) == doctest::Approx(15.0));
    CHECK(det::turn_angle({123.4, 123.4, 123.4}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(det::turn_angle({}), std::invalid_argument);
    CHECK_THROWS_AS(det::turn_angle({361.0}), std::invalid_argument);
}

TEST_CASE("turn_angle recovers the span of monotone arcs") {
    // Monotone sweep of span < 90 degrees, sampled densely with exact
    // endpoints, for every integer starting heading. The north-crossing
    // branch drops the sub-step gap adjacent to true north (the documented
    // [350,359,5,10] -> 14 evaluation behaves the same), so the check allows
    // one step of slack there.
    const double span = 47.0;
    const int n = 95;
    const double step = span / (n - 1);
    for (int h0 = 0; h0 < 360; ++h0) {
        std::vector<double> cogs;
        for (int i = 0; i < n; ++i) {
            cogs.push_back(std::fmod(h0 + span * i / (n - 1), 360.0));
        }
        const double theta = det::turn_angle(cogs);
        const bool crosses_north = h0 + span >= 360.0;
        if (crosses_north) {
            CHECK(theta >= span - 2.0 * step - 1e-9);
            CHECK(theta <= span + 1e-9);
        } else {
            CHECK(theta == doctest::Approx(span).epsilon(1e-12));
        }
    }
}

TEST_CASE("merge_ut_runs builds maximal intervals") {
    using Runs = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(det::merge_ut_runs({false, true, true, false, true}) ==
          Runs{{1, 2}, {4, 4}});
    CHECK(det::merge_ut_runs({false, false}).empty());
    CHECK(det::merge_ut_runs({true, true, true}) == Runs{{0, 2}});
    CHECK(det::merge_ut_runs({}).empty());

    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.4);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<bool> flags;
        for (int i = 0; i < 40; ++i) flags.push_back(coin(rng));
        const auto runs = det::merge_ut_runs(flags);
        std::vector<bool> covered(flags.size(), false);
        for (const auto& [a, b] : runs) {
            REQUIRE(a <= b);
            // maximal: neighbors outside the run are normal
            if (a > 0) CHECK_FALSE(flags[a - 1]);
            if (b + 1 < flags.size()) CHECK_FALSE(flags[b + 1]);
            for (std::size_t k = a; k <= b; ++k) {
                CHECK(flags[k]);
                CHECK_FALSE(covered[k]);  // disjoint
                covered[k] = true;
            }
        }
        for (std::size_t k = 0; k < flags.size(); ++k) {
            CHECK(covered[k] == static_cast<bool>(flags[k]));
        }
    }
}

TEST_CASE("classify_with_rejection thresholds the Dirichlet uncertainty") {
    const auto rejected = det::classify_with_rejection({{1.0, 1.0}}, 0.9);
    CHECK(rejected.u == doctest::Approx(1.0));
    CHECK_FALSE(rejected.accepted);
    CHECK(rejected.predicted == 0);  // tie toward normal

    const auto accepted = det::classify_with_rejection({{50.0, 2.0}}, 0.4);
    CHECK(accepted.predicted == 0);
    CHECK(accepted.u == doctest::Approx(2.0 / 52.0));
    CHECK(accepted.accepted);

    const auto boundary = det::classify_with_rejection({{4.0, 1.0}}, 0.4);
    CHECK(boundary.u == doctest::Approx(0.4));
    CHECK(boundary.accepted);  // accepted iff u <= u_th
}

TEST_CASE("label_oos is strict") {
    CHECK(det::label_oos(0, 181, 180.0));
    CHECK_FALSE(det::label_oos(0, 180, 180.0));
    CHECK_THROWS_AS(det::label_oos(100, 50, 180.0), std::invalid_argument);
}

TEST_CASE("verdict csv schema") {
    det::AtVerdict v;
    v.mmsi = 42;
    v.start_time = 1600000000;
    v.min_normalized = 0.25;
    v.threshold = 0.4;
    v.anomalous = true;
    const auto csv = det::verdicts_to_csv({v});
    CHECK(csv.find("mmsi,segment_start_time,min_norm_uncertainty,threshold,flag") ==
          0);
    CHECK(csv.find("42,1600000000,0.25,0.4,1") != std::string::npos);
}

TEST_SUITE_END();
