#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maredl/ais.hpp"

namespace maredl::synth {

struct LaneSpec {
    std::vector<geo::GeoPoint> polyline;  // >= 2 vertices
    double sog_knots = 10.0;
    std::size_t traffic = 50;      // tracks on this lane
    bool both_ways = true;         // alternate direction per track
    double noise_m = 50.0;         // cross-track sigma
    double cog_noise_deg = 0.0;
};

struct WorldParams {
    std::vector<LaneSpec> lanes;
    ais::Roi roi;
    std::int64_t tau = 60;
    std::int64_t t0 = 1577836800;       // base epoch
    std::int64_t start_spread = 86400;  // random departure window, seconds
    std::int64_t mmsi_base = 200000000;
    int ship_type = 70;
};

struct World {
    std::vector<ais::VesselTrack> tracks;
    std::vector<int> lane_of_track;
    std::vector<std::vector<bool>> anomalous;  // per track, per record
};

// Deterministic synthetic traffic: tracks sampled at tau along each lane
// polyline with Gaussian cross-track noise.
World generate_world(const WorldParams& params, std::uint64_t seed);

struct AnomalyInjection {
    enum class Kind { Offset, Turn, Gap };
    Kind kind = Kind::Offset;
    std::size_t track = 0;
    std::size_t start_index = 0;
    double magnitude = 0.0;   // meters lateral | degrees | seconds
    double duration_s = 0.0;  // ramp length (offset) or sweep duration (turn)
};

// Offset: lateral displacement ramping to `magnitude` over duration_s, then
// held to the end. Turn: dead-reckoned heading sweep of `magnitude` degrees
// over duration_s, straight afterwards. Gap: deletes the records covering
// `magnitude` seconds after start_index; the first record after the gap is
// marked anomalous. Ground-truth flags updated in place.
void inject(World& world, const std::vector<AnomalyInjection>& injections,
            const ais::Roi& roi);

// Standard ingest CSV over all tracks.
std::string world_to_csv(const World& world);
// Ground truth: track,mmsi,record,lane,anomalous
std::string world_labels_to_csv(const World& world);

}  // namespace maredl::synth
