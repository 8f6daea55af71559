#include "maredl/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace maredl::sim {

namespace {

void extend(const std::vector<std::vector<int>>& adjacency, std::vector<int>& path,
            std::vector<bool>& visited, std::size_t max_len,
            std::set<std::vector<int>>& out) {
    bool extended = false;
    if (path.size() < max_len) {
        for (int next : adjacency[path.back()]) {
            if (visited[next]) continue;
            visited[next] = true;
            path.push_back(next);
            extend(adjacency, path, visited, max_len, out);
            path.pop_back();
            visited[next] = false;
            extended = true;
        }
    }
    if (!extended && path.size() >= 2) out.insert(path);
}

}  // namespace

RouteSet enumerate_routes(const graph::TrafficGraph& g, std::size_t max_len) {
    std::vector<std::vector<int>> adjacency(g.nodes.size());
    for (const auto& e : g.edges) adjacency[e.a].push_back(e.b);
    for (auto& next : adjacency) std::sort(next.begin(), next.end());

    std::set<std::vector<int>> unique_routes;
    std::vector<bool> visited(g.nodes.size(), false);
    for (std::size_t start = 0; start < g.nodes.size(); ++start) {
        std::vector<int> path{static_cast<int>(start)};
        visited[start] = true;
        extend(adjacency, path, visited, max_len, unique_routes);
        visited[start] = false;
    }

    RouteSet rs;
    for (const auto& r : unique_routes) {
        rs.max_route_len = std::max(rs.max_route_len, r.size());
        rs.routes.push_back(r);
    }
    return rs;
}

int lcs_length(const std::vector<int>& route,
               const std::vector<geo::LocalPoint>& waypoints,
               const graph::TrafficGraph& g, double d_max) {
    const std::size_t n = route.size();
    const std::size_t m = waypoints.size();
    if (n == 0 || m == 0) return 0;

    auto matches = [&](int node, const geo::LocalPoint& wp) {
        const auto& mean = g.nodes[node].mean;
        return std::hypot(wp.x - mean.x, wp.y - mean.y) <= d_max;
    };

    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (matches(route[i - 1], waypoints[j - 1])) {
                dp[i][j] = dp[i - 1][j - 1] + 1;
            } else {
                dp[i][j] = std::max(dp[i - 1][j], dp[i][j - 1]);
            }
        }
    }
    return dp[n][m];
}

SimilarityVerdict similarity_score(const ais::VesselTrack& track,
                                   const RouteSet& routes,
                                   const graph::TrafficGraph& g,
                                   const SimilarityParams& params) {
    if (routes.routes.empty()) {
        throw std::invalid_argument("similarity_score: empty route set");
    }
    SimilarityVerdict v;
    v.mmsi = track.mmsi;
    if (track.records.size() < 2) {
        v.anomalous = v.score < params.s_at;
        return v;
    }

    std::vector<geo::LocalPoint> pts;
    pts.reserve(track.records.size());
    for (const auto& r : track.records) {
        pts.push_back(geo::project({r.lon, r.lat}, g.ref));
    }
    const auto keep = geo::rdp_simplify(pts, params.rdp_eps);
    std::vector<geo::LocalPoint> waypoints;
    waypoints.reserve(keep.size());
    for (std::size_t idx : keep) waypoints.push_back(pts[idx]);

    double best = 0.0;
    for (const auto& route : routes.routes) {
        const int l = lcs_length(route, waypoints, g, params.d_max);
        const double denom = params.matched_route_denominator
                                 ? static_cast<double>(route.size())
                                 : static_cast<double>(routes.max_route_len);
        best = std::max(best, static_cast<double>(l) / denom);
    }
    v.score = std::min(1.0, best);
    v.anomalous = v.score < params.s_at;
    return v;
}

}  // namespace maredl::sim
