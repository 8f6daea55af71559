#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maredl/ais.hpp"
#include "maredl/nn/train.hpp"

namespace maredl::feat {

// Normalization bounds and the edge one-hot layout shared by every task.
struct FeatureSpec {
    ais::Roi roi;
    double max_sog = 30.0;
    std::size_t edge_count = 0;  // |E|; one-hot width |E|+1, outlier slot last
    bool use_edge = true;

    std::size_t regression_width() const {
        return 4 + (use_edge ? edge_count + 1 : 0);
    }
    double norm_lon(double lon) const {
        return (lon - roi.min.lon) / (roi.max.lon - roi.min.lon);
    }
    double norm_lat(double lat) const {
        return (lat - roi.min.lat) / (roi.max.lat - roi.min.lat);
    }
    double norm_cog(double cog) const { return cog / 360.0; }
    double norm_sog(double sog) const { return sog / max_sog; }
};

struct SampleSet {
    std::size_t count = 0, T = 0, n_in = 0;
    std::vector<double> inputs;  // count x T x n_in
    std::size_t L = 0, n_out = 0;
    std::vector<double> targets;  // count x L x n_out (regression)
    std::vector<int> labels;      // count (classification; 0 normal, 1 anomalous)
    std::vector<std::int64_t> sample_mmsi;
    std::size_t skipped_short = 0;

    nn::RegressionData reg_view() const {
        return {count, T, n_in, L, n_out, inputs.data(), targets.data()};
    }
    nn::ClassificationData cls_view() const {
        return {count, T, n_in, labels.empty() ? 0u : 2u, inputs.data(),
                labels.data()};
    }
};

// Writes one normalized window row-block (T x regression_width) starting at
// record `first`: [lon, lat, cog, sog, edge one-hot] per step.
void write_regression_window(const ais::TrackSegment& seg, std::size_t first,
                             std::size_t T, const FeatureSpec& spec, double* out);

// Training windows of length T+L, step 1; targets are the normalized
// [lon, lat, cog, sog] rows of the following L steps. Segments shorter than
// T+L are skipped and counted.
SampleSet make_regression_samples(const std::vector<ais::TrackSegment>& segments,
                                  std::size_t T, std::size_t L,
                                  const FeatureSpec& spec);

// Unusual-turn windows (cog-only feature, expects tau = 3 s cadence);
// label anomalous iff the window's turn angle exceeds theta_ut.
SampleSet make_ut_samples(const std::vector<ais::TrackSegment>& segments,
                          std::size_t T, double theta_ut);

// On-off-switching pairs from raw (unresampled) tracks. Features per step:
// [lon, lat, cog, sog, time] with time[0] = 0 and time[1] = delta seconds
// scaled by 1/3600 and capped at 1. Label anomalous iff delta > theta_oos.
SampleSet make_oos_samples(const std::vector<ais::VesselTrack>& tracks,
                           double theta_oos, const FeatureSpec& spec);

// Seeded down-sampling of the majority class to equal counts. Throws when a
// class is absent.
SampleSet balance_classes(const SampleSet& set, std::uint64_t seed);

// Per-vessel split (train/val/test = assignment 0/1/2) so windows of one
// vessel never leak across splits.
std::vector<int> split_mmsi(const std::vector<std::int64_t>& mmsis,
                            double train_frac, double val_frac,
                            std::uint64_t seed);

// Inspection dump: one row per flattened sample.
std::string samples_to_csv(const SampleSet& set);

}  // namespace maredl::feat
