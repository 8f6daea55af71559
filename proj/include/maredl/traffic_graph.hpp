#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maredl/ais.hpp"
#include "maredl/geometry.hpp"

namespace maredl::graph {

struct DbscanConfig {
    double eps = 20.0;  // meters in the projected plane
    int n_min = 1500;
};

inline constexpr int kNoise = -1;

// Density clustering. Core point: >= n_min neighbors within eps, self
// included. Border points attach to the first cluster that reaches them in
// scan order. Returns one cluster id per point, kNoise for noise.
std::vector<int> dbscan(const std::vector<geo::LocalPoint>& points,
                        const DbscanConfig& cfg);

struct Edge {
    int a = 0;
    int b = 0;
    std::int64_t visits = 0;
};

struct TrafficGraph {
    geo::GeoPoint ref;  // projection anchor (ROI center)
    std::vector<geo::EllipsoidalGate> nodes;
    std::vector<Edge> edges;
    // full visit matrix from the build, |V| x |V| row-major; empty after a
    // manual refine rebuilt the id space
    std::vector<std::int64_t> visit_counts;

    std::int64_t visits_at(int a, int b) const {
        return visit_counts[static_cast<std::size_t>(a) * nodes.size() + b];
    }
};

struct GtrParams {
    double rdp_eps = 1000.0;  // meters
    DbscanConfig dbscan;
    double m_th = 9.2;  // chi-square gate, 0.99 at 2 dof
    double e_th = 0.3;  // normalized visit threshold
};

struct GtaParams {
    double d_max = 7000.0;  // meters
    double rdp_eps = 500.0;
};

// Lane-graph extraction over resampled tracks: per-track RDP waypoints,
// DBSCAN over all waypoints, nodes from cluster core points, per-track node
// sequences through the Mahalanobis gate, and edges kept where the
// row-normalized visit count exceeds e_th.
// Throws std::runtime_error when no cluster survives.
TrafficGraph build_graph(const std::vector<ais::TrackSegment>& tracks,
                         const GtrParams& params, const geo::GeoPoint& ref);

// Point-to-lane association: nearest edge within d_max else the outlier
// label, then per waypoint-pair slope refinement. Returns one edge id per
// record (ais::kOutlierEdge for the outlier label).
std::vector<int> associate(const ais::TrackSegment& track, const TrafficGraph& g,
                           const GtaParams& params);

// Manual graph refinement.
struct GraphEdit {
    enum class Kind { AddNode, RemoveNode, AddEdge, RemoveEdge };
    Kind kind;
    int node = 0;             // RemoveNode
    int a = 0, b = 0;         // AddEdge / RemoveEdge
    geo::GeoPoint position;   // AddNode
    geo::Cov2 cov;            // AddNode
};

// Applies edits in order against the ids as they stand when each edit runs;
// removing a node drops its incident edges and compacts ids afterwards.
// Self-loops and dangling references are edit errors (std::invalid_argument
// naming the offending edit).
TrafficGraph refine_graph(const TrafficGraph& g, const std::vector<GraphEdit>& edits);

// Text edit script, one edit per line:
//   remove_node <id>
//   add_node <lon> <lat> <sxx> <sxy> <syy>
//   add_edge <a> <b>
//   remove_edge <a> <b>
std::vector<GraphEdit> parse_edit_script(const std::string& text);

// GeoJSON FeatureCollection: nodes as Point features with properties
// {id, cov:[sxx,sxy,syy]}, edges as LineString features with properties
// {a, b, visits}. The projection anchor rides along as a foreign member.
std::string to_geojson(const TrafficGraph& g);
TrafficGraph from_geojson(const std::string& text);

}  // namespace maredl::graph
