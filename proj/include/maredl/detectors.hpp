#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "maredl/ais.hpp"
#include "maredl/evidential.hpp"

namespace maredl::det {

enum class UncertaintyKind { Epistemic, Aleatoric };

struct DetectionThresholds {
    double theta_at = 0.4;      // (0, 1]
    double theta_ut = 30.0;     // degrees
    double theta_oos = 180.0;   // seconds
    double u_th = 0.4;          // classifier rejection
    std::size_t n_windows = 30; // N, sequences per segment chunk
    UncertaintyKind kind = UncertaintyKind::Epistemic;
};

struct AtVerdict {
    std::int64_t mmsi = 0;
    std::int64_t start_time = 0;      // first record of the chunk
    std::size_t first_point = 0;      // chunk offset within the segment
    std::size_t n_points = 0;         // N + T - 1
    double min_normalized = 1.0;
    double threshold = 0.0;
    bool anomalous = false;
    // n_windows x n_features, normalized per feature by the window max
    std::vector<std::vector<double>> normalized;
};

// Abrupt-transition criterion: per feature, normalize the per-window
// uncertainties by their max, take the min over windows, then the min over
// features; anomalous iff strictly below theta_at. uncertainties is
// n_windows rows of equal length; every value must be > 0.
AtVerdict detect_at(const std::vector<std::vector<double>>& uncertainties,
                    double theta_at);

// Splits a resampled segment of `len` points into consecutive non-overlapping
// chunks of N+T-1 points (short tail dropped) and applies detect_at per
// chunk. window_uncertainty(first_point) returns the per-feature uncertainty
// of the length-T window starting there.
std::vector<AtVerdict> scan_segment_at(
    std::size_t len, std::size_t T, const DetectionThresholds& th,
    const std::function<std::vector<double>(std::size_t)>& window_uncertainty);

// Course change over a window, degrees (Eq.-style north-crossing rule):
// with M = {cog >= 270} and L = {cog <= 90}, both non-empty gives
// (max M - min M) + (max L - min L), otherwise max - min over all values.
double turn_angle(const std::vector<double>& cogs);

// Maximal runs of consecutive anomalous flags as [first, last] index pairs.
std::vector<std::pair<std::size_t, std::size_t>> merge_ut_runs(
    const std::vector<bool>& flags);

struct ClassVerdict {
    std::size_t predicted = 0;
    std::vector<double> probs;
    double u = 1.0;
    double u_th = 0.0;
    bool accepted = false;
};

// argmax of the Dirichlet mean, ties toward class 0 ("normal");
// accepted iff u <= u_th.
ClassVerdict classify_with_rejection(const evid::DirichletParams& d, double u_th);

// On-off switching label: anomalous iff the pair's time delta exceeds
// theta_oos strictly. Negative deltas are an ordering error.
bool label_oos(std::int64_t t0, std::int64_t t1, double theta_oos);

// Verdict exports for plotting: CSV schema
//   mmsi,segment_start_time,min_norm_uncertainty,threshold,flag
std::string verdicts_to_csv(const std::vector<AtVerdict>& verdicts);
// Flagged chunks as LineString features carrying the verdict values.
std::string verdicts_to_geojson(const std::vector<AtVerdict>& verdicts,
                                const std::vector<ais::TrackSegment>& segments);

}  // namespace maredl::det
