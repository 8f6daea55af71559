#include "maredl/traffic_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace maredl::graph {

namespace {

// Uniform grid over the points with cell size eps; neighborhood queries only
// need the 3x3 cell block.
class NeighborGrid {
  public:
    NeighborGrid(const std::vector<geo::LocalPoint>& pts, double eps)
        : pts_(pts), eps_(eps) {
        cells_.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cells_[key(pts[i])].push_back(static_cast<int>(i));
        }
    }

    // indices with distance <= eps from pts[i], self included
    std::vector<int> query(std::size_t i) const {
        std::vector<int> out;
        const auto& p = pts_[i];
        const std::int64_t cx = coord(p.x);
        const std::int64_t cy = coord(p.y);
        const double eps_sq = eps_ * eps_;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find((cx + dx) * 0x1f1f1f1f + (cy + dy));
                if (it == cells_.end()) continue;
                for (int j : it->second) {
                    const double ddx = pts_[j].x - p.x;
                    const double ddy = pts_[j].y - p.y;
                    if (ddx * ddx + ddy * ddy <= eps_sq) out.push_back(j);
                }
            }
        }
        return out;
    }

  private:
    std::int64_t coord(double v) const {
        return static_cast<std::int64_t>(std::floor(v / eps_));
    }
    std::int64_t key(const geo::LocalPoint& p) const {
        return coord(p.x) * 0x1f1f1f1f + coord(p.y);
    }

    const std::vector<geo::LocalPoint>& pts_;
    double eps_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace

std::vector<int> dbscan(const std::vector<geo::LocalPoint>& points,
                        const DbscanConfig& cfg) {
    if (!(cfg.eps > 0.0) || cfg.n_min < 1) {
        throw std::invalid_argument("dbscan: eps must be > 0 and n_min >= 1");
    }
    constexpr int kUndef = -2;
    std::vector<int> labels(points.size(), kUndef);
    if (points.empty()) return labels;

    NeighborGrid grid(points, cfg.eps);
    int cluster = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] != kUndef) continue;
        auto neighbors = grid.query(i);
        if (static_cast<int>(neighbors.size()) < cfg.n_min) {
            labels[i] = kNoise;
            continue;
        }
        labels[i] = cluster;
        std::deque<int> frontier(neighbors.begin(), neighbors.end());
        while (!frontier.empty()) {
            const int j = frontier.front();
            frontier.pop_front();
            if (labels[j] == kNoise) labels[j] = cluster;  // border point
            if (labels[j] != kUndef) continue;
            labels[j] = cluster;
            auto more = grid.query(static_cast<std::size_t>(j));
            if (static_cast<int>(more.size()) >= cfg.n_min) {
                frontier.insert(frontier.end(), more.begin(), more.end());
            }
        }
        ++cluster;
    }
    return labels;
}

TrafficGraph build_graph(const std::vector<ais::TrackSegment>& tracks,
                         const GtrParams& params, const geo::GeoPoint& ref) {
    // Steps 2-4: per-track waypoints
    std::vector<geo::LocalPoint> waypoints;
    std::vector<std::pair<std::size_t, std::size_t>> track_ranges;  // [begin,end)
    for (const auto& t : tracks) {
        if (t.records.size() < 2) continue;
        std::vector<geo::LocalPoint> pts;
        pts.reserve(t.records.size());
        for (const auto& r : t.records) pts.push_back(geo::project({r.lon, r.lat}, ref));
        const auto keep = geo::rdp_simplify(pts, params.rdp_eps);
        const std::size_t begin = waypoints.size();
        for (std::size_t idx : keep) waypoints.push_back(pts[idx]);
        track_ranges.emplace_back(begin, waypoints.size());
    }

    // Step 5: cluster all waypoints
    const auto labels = dbscan(waypoints, params.dbscan);
    int n_clusters = 0;
    for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
    if (n_clusters == 0) {
        throw std::runtime_error(
            "build_graph: DBSCAN found no clusters (" +
            std::to_string(waypoints.size()) + " waypoints, eps=" +
            std::to_string(params.dbscan.eps) + ", n_min=" +
            std::to_string(params.dbscan.n_min) + ")");
    }

    // Step 7: nodes from cluster core points
    NeighborGrid grid(waypoints, params.dbscan.eps);
    std::vector<std::vector<geo::LocalPoint>> core_points(n_clusters);
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (labels[i] < 0) continue;
        if (static_cast<int>(grid.query(i).size()) >= params.dbscan.n_min) {
            core_points[labels[i]].push_back(waypoints[i]);
        }
    }
    TrafficGraph g;
    g.ref = ref;
    g.nodes.reserve(n_clusters);
    for (const auto& pts : core_points) g.nodes.push_back(geo::make_gate(pts));

    // Steps 9-14: per-track node lists through the gate
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<int>> node_lists;
    for (const auto& [begin, end] : track_ranges) {
        std::vector<int> list;
        for (std::size_t w = begin; w < end; ++w) {
            double best = std::numeric_limits<double>::infinity();
            int best_node = -1;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = geo::mahalanobis_sq(waypoints[w], g.nodes[j]);
                if (d < best) {
                    best = d;
                    best_node = static_cast<int>(j);
                }
            }
            if (best < params.m_th) {
                if (list.empty() || list.back() != best_node) list.push_back(best_node);
            }
        }
        if (list.size() >= 2) node_lists.push_back(std::move(list));
    }

    // Steps 15-19: visit counts over consecutive node pairs
    g.visit_counts.assign(n * n, 0);
    for (const auto& list : node_lists) {
        for (std::size_t k = 0; k + 1 < list.size(); ++k) {
            ++g.visit_counts[static_cast<std::size_t>(list[k]) * n + list[k + 1]];
        }
    }

    // Steps 21-25: edge threshold on row-normalized visits
    for (std::size_t a = 0; a < n; ++a) {
        std::int64_t row = 0;
        for (std::size_t b = 0; b < n; ++b) row += g.visit_counts[a * n + b];
        if (row == 0) continue;
        for (std::size_t b = 0; b < n; ++b) {
            const std::int64_t v = g.visit_counts[a * n + b];
            if (a != b && static_cast<double>(v) / static_cast<double>(row) > params.e_th) {
                g.edges.push_back({static_cast<int>(a), static_cast<int>(b), v});
            }
        }
    }
    return g;
}

std::vector<int> associate(const ais::TrackSegment& track, const TrafficGraph& g,
                           const GtaParams& params) {
    if (g.nodes.empty() || g.edges.empty()) {
        throw std::invalid_argument("associate: empty graph");
    }
    const std::size_t m = track.records.size();
    std::vector<int> labels(m, ais::kOutlierEdge);
    if (m == 0) return labels;

    std::vector<geo::LocalPoint> pts;
    pts.reserve(m);
    for (const auto& r : track.records) pts.push_back(geo::project({r.lon, r.lat}, g.ref));

    // Steps 2-5: nearest edge within d_max
    for (std::size_t k = 0; k < m; ++k) {
        double best = std::numeric_limits<double>::infinity();
        int best_edge = ais::kOutlierEdge;
        for (std::size_t j = 0; j < g.edges.size(); ++j) {
            const double d = geo::perpendicular_distance(
                pts[k], g.nodes[g.edges[j].a].mean, g.nodes[g.edges[j].b].mean);
            if (d < best) {
                best = d;
                best_edge = static_cast<int>(j);
            }
        }
        if (best <= params.d_max) labels[k] = best_edge;
    }
    if (m < 2) return labels;

    // Steps 6-11: slope refinement between consecutive waypoints. Each
    // span's label set is the nearest-edge assignment from above, not the
    // running output: an in-place update would let one refined boundary
    // waypoint cascade its label across every following span.
    const std::vector<int> assigned = labels;
    const auto wp = geo::rdp_simplify(pts, params.rdp_eps);
    for (std::size_t w = 0; w + 1 < wp.size(); ++w) {
        const std::size_t k1 = wp[w];
        const std::size_t k2 = wp[w + 1];
        std::set<int> span_labels;
        for (std::size_t k = k1; k <= k2; ++k) span_labels.insert(assigned[k]);
        if (span_labels.size() < 2) continue;

        const auto& p1 = pts[k1];
        const auto& p2 = pts[k2];
        if (p1.x == p2.x && p1.y == p2.y) continue;  // stationary span
        const double span_bearing = geo::bearing(p1, p2);

        double best_diff = std::numeric_limits<double>::infinity();
        int best_edge = ais::kOutlierEdge;
        for (int e : span_labels) {
            if (e == ais::kOutlierEdge) continue;
            const double eb =
                geo::bearing(g.nodes[g.edges[e].a].mean, g.nodes[g.edges[e].b].mean);
            const double diff = geo::undirected_bearing_difference(eb, span_bearing);
            if (diff < best_diff || (diff == best_diff && e < best_edge)) {
                best_diff = diff;
                best_edge = e;
            }
        }
        if (best_edge == ais::kOutlierEdge) continue;  // span was all-outlier
        for (std::size_t k = k1; k <= k2; ++k) labels[k] = best_edge;
    }
    return labels;
}

TrafficGraph refine_graph(const TrafficGraph& g, const std::vector<GraphEdit>& edits) {
    std::vector<geo::EllipsoidalGate> nodes = g.nodes;
    std::vector<bool> alive(nodes.size(), true);
    std::vector<Edge> edges = g.edges;

    auto check_node = [&](int id, std::size_t edit_idx) {
        if (id < 0 || id >= static_cast<int>(nodes.size()) || !alive[id]) {
            throw std::invalid_argument("refine_graph: edit " + std::to_string(edit_idx) +
                                        " references missing node " + std::to_string(id));
        }
    };

    for (std::size_t i = 0; i < edits.size(); ++i) {
        const auto& e = edits[i];
        switch (e.kind) {
            case GraphEdit::Kind::AddNode: {
                nodes.push_back({geo::project(e.position, g.ref), e.cov});
                alive.push_back(true);
                break;
            }
            case GraphEdit::Kind::RemoveNode: {
                check_node(e.node, i);
                alive[e.node] = false;
                std::erase_if(edges, [&](const Edge& ed) {
                    return ed.a == e.node || ed.b == e.node;
                });
                break;
            }
            case GraphEdit::Kind::AddEdge: {
                check_node(e.a, i);
                check_node(e.b, i);
                if (e.a == e.b) {
                    throw std::invalid_argument("refine_graph: edit " + std::to_string(i) +
                                                " is a self-loop");
                }
                for (const auto& ed : edges) {
                    if (ed.a == e.a && ed.b == e.b) {
                        throw std::invalid_argument("refine_graph: edit " +
                                                    std::to_string(i) +
                                                    " duplicates an existing edge");
                    }
                }
                edges.push_back({e.a, e.b, 0});
                break;
            }
            case GraphEdit::Kind::RemoveEdge: {
                check_node(e.a, i);
                check_node(e.b, i);
                const auto before = edges.size();
                std::erase_if(edges, [&](const Edge& ed) {
                    return ed.a == e.a && ed.b == e.b;
                });
                if (edges.size() == before) {
                    throw std::invalid_argument("refine_graph: edit " + std::to_string(i) +
                                                " removes a missing edge");
                }
                break;
            }
        }
    }

    // compact ids
    std::vector<int> remap(nodes.size(), -1);
    TrafficGraph out;
    out.ref = g.ref;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!alive[i]) continue;
        remap[i] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(nodes[i]);
    }
    const std::size_t n = out.nodes.size();
    out.visit_counts.assign(n * n, 0);
    for (const auto& ed : edges) {
        Edge ne{remap[ed.a], remap[ed.b], ed.visits};
        out.visit_counts[static_cast<std::size_t>(ne.a) * n + ne.b] = ne.visits;
        out.edges.push_back(ne);
    }
    return out;
}

std::vector<GraphEdit> parse_edit_script(const std::string& text) {
    std::vector<GraphEdit> edits;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) continue;

        GraphEdit e{};
        bool ok = false;
        if (op == "remove_node") {
            e.kind = GraphEdit::Kind::RemoveNode;
            ok = static_cast<bool>(ls >> e.node);
        } else if (op == "add_node") {
            e.kind = GraphEdit::Kind::AddNode;
            ok = static_cast<bool>(ls >> e.position.lon >> e.position.lat >>
                                   e.cov.sxx >> e.cov.sxy >> e.cov.syy);
        } else if (op == "add_edge") {
            e.kind = GraphEdit::Kind::AddEdge;
            ok = static_cast<bool>(ls >> e.a >> e.b);
        } else if (op == "remove_edge") {
            e.kind = GraphEdit::Kind::RemoveEdge;
            ok = static_cast<bool>(ls >> e.a >> e.b);
        } else {
            throw std::invalid_argument("edit script line " + std::to_string(lineno) +
                                        ": unknown edit '" + op + "'");
        }
        std::string extra;
        if (!ok || (ls >> extra)) {
            throw std::invalid_argument("edit script line " + std::to_string(lineno) +
                                        ": malformed arguments");
        }
        edits.push_back(e);
    }
    return edits;
}

}  // namespace maredl::graph
