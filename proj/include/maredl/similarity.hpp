#pragma once

#include <vector>

#include "maredl/traffic_graph.hpp"

namespace maredl::sim {

struct RouteSet {
    std::vector<std::vector<int>> routes;  // node-id sequences, length >= 2
    std::size_t max_route_len = 0;
};

// Maximal simple paths along the retained directed edges, bounded to
// max_len nodes per path (the graph never defines routes itself).
RouteSet enumerate_routes(const graph::TrafficGraph& g, std::size_t max_len = 12);

// Longest common subsequence between a route (node ids) and the track's
// waypoints; a waypoint matches a node when it lies within d_max of the
// node mean.
int lcs_length(const std::vector<int>& route,
               const std::vector<geo::LocalPoint>& waypoints,
               const graph::TrafficGraph& g, double d_max);

struct SimilarityParams {
    double rdp_eps = 1000.0;  // waypoint reduction of the test track
    double d_max = 7000.0;    // node match radius
    double s_at = 0.3;        // anomaly threshold on the score
    bool matched_route_denominator = false;  // else: longest route overall
};

struct SimilarityVerdict {
    std::int64_t mmsi = 0;
    double score = 0.0;  // in [0, 1]
    bool anomalous = false;
};

// S = max over routes of LCS(route, waypoints) / denominator, where the
// denominator is the longest route in the set (or the matched route's
// length behind the flag). Anomalous iff S < s_at.
SimilarityVerdict similarity_score(const ais::VesselTrack& track,
                                   const RouteSet& routes,
                                   const graph::TrafficGraph& g,
                                   const SimilarityParams& params);

}  // namespace maredl::sim
