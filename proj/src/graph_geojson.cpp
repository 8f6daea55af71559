#include <algorithm>

#include <json.hpp>

#include "maredl/traffic_graph.hpp"

namespace maredl::graph {

using nlohmann::json;

std::string to_geojson(const TrafficGraph& g) {
    json fc;
    fc["type"] = "FeatureCollection";
    fc["properties"] = {{"ref", {g.ref.lon, g.ref.lat}}};
    json features = json::array();

    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& node = g.nodes[i];
        const auto pos = geo::unproject(node.mean, g.ref);
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", {pos.lon, pos.lat}}};
        f["properties"] = {{"id", i},
                           {"cov", {node.cov.sxx, node.cov.sxy, node.cov.syy}}};
        features.push_back(std::move(f));
    }
    for (const auto& e : g.edges) {
        const auto pa = geo::unproject(g.nodes[e.a].mean, g.ref);
        const auto pb = geo::unproject(g.nodes[e.b].mean, g.ref);
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "LineString"},
                         {"coordinates", {{pa.lon, pa.lat}, {pb.lon, pb.lat}}}};
        f["properties"] = {{"a", e.a}, {"b", e.b}, {"visits", e.visits}};
        features.push_back(std::move(f));
    }
    fc["features"] = std::move(features);
    return fc.dump(2) + "\n";
}

TrafficGraph from_geojson(const std::string& text) {
    json fc = json::parse(text);
    if (fc.value("type", "") != "FeatureCollection" || !fc.contains("features")) {
        throw std::runtime_error("graph geojson: not a FeatureCollection");
    }
    if (!fc.contains("properties") || !fc["properties"].contains("ref")) {
        throw std::runtime_error("graph geojson: missing projection ref");
    }
    TrafficGraph g;
    g.ref = {fc["properties"]["ref"][0].get<double>(),
             fc["properties"]["ref"][1].get<double>()};

    std::vector<std::pair<int, geo::EllipsoidalGate>> nodes;
    for (const auto& f : fc["features"]) {
        const auto& geom = f.at("geometry");
        const auto& props = f.at("properties");
        if (geom.at("type") == "Point") {
            geo::GeoPoint pos{geom["coordinates"][0].get<double>(),
                              geom["coordinates"][1].get<double>()};
            geo::EllipsoidalGate gate;
            gate.mean = geo::project(pos, g.ref);
            gate.cov = {props.at("cov")[0].get<double>(),
                        props.at("cov")[1].get<double>(),
                        props.at("cov")[2].get<double>()};
            nodes.emplace_back(props.at("id").get<int>(), gate);
        } else if (geom.at("type") == "LineString") {
            g.edges.push_back({props.at("a").get<int>(), props.at("b").get<int>(),
                               props.at("visits").get<std::int64_t>()});
        } else {
            throw std::runtime_error("graph geojson: unexpected geometry type");
        }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].first != static_cast<int>(i)) {
            throw std::runtime_error("graph geojson: node ids are not 0..n-1");
        }
        g.nodes.push_back(nodes[i].second);
    }
    const std::size_t n = g.nodes.size();
    g.visit_counts.assign(n * n, 0);
    for (const auto& e : g.edges) {
        if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(n) ||
            e.b >= static_cast<int>(n) || e.a == e.b) {
            throw std::runtime_error("graph geojson: edge references invalid node");
        }
        g.visit_counts[static_cast<std::size_t>(e.a) * n + e.b] = e.visits;
    }
    return g;
}

}  // namespace maredl::graph
