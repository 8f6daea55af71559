#pragma once

#include "maredl/synth.hpp"
#include "maredl/traffic_graph.hpp"

// The canonical desk-scale scenario: two straight lanes crossing mid-ROI,
// traffic both ways. Lane geometry is chosen so the four endpoints are far
// apart relative to the clustering radius.
namespace world {

inline maredl::ais::Roi roi() { return {{11.5, 54.2}, {12.5, 54.5}}; }

inline maredl::synth::WorldParams two_lane(std::size_t tracks_per_lane,
                                           double noise_m = 50.0,
                                           double sog = 10.0) {
    maredl::synth::WorldParams params;
    params.roi = roi();
    params.tau = 60;

    maredl::synth::LaneSpec east_west;
    east_west.polyline = {{11.6, 54.25}, {12.4, 54.25}};
    east_west.traffic = tracks_per_lane;
    east_west.noise_m = noise_m;
    east_west.sog_knots = sog;

    maredl::synth::LaneSpec south_north;
    south_north.polyline = {{12.0, 54.22}, {12.0, 54.48}};
    south_north.traffic = tracks_per_lane;
    south_north.noise_m = noise_m;
    south_north.sog_knots = sog;

    params.lanes = {east_west, south_north};
    return params;
}

inline maredl::graph::GtrParams gtr_params() {
    maredl::graph::GtrParams p;
    p.rdp_eps = 1000.0;
    p.dbscan.eps = 500.0;
    p.dbscan.n_min = 5;
    p.m_th = 9.2;
    p.e_th = 0.3;
    return p;
}

inline maredl::graph::GtaParams gta_params() {
    maredl::graph::GtaParams p;
    p.d_max = 7000.0;
    p.rdp_eps = 500.0;
    return p;
}

// True lane endpoints in the projected plane.
inline std::vector<maredl::geo::LocalPoint> lane_endpoints() {
    const auto ref = roi().center();
    return {
        maredl::geo::project({11.6, 54.25}, ref),
        maredl::geo::project({12.4, 54.25}, ref),
        maredl::geo::project({12.0, 54.22}, ref),
        maredl::geo::project({12.0, 54.48}, ref),
    };
}

}  // namespace world
