#include "maredl/detectors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace maredl::det {

AtVerdict detect_at(const std::vector<std::vector<double>>& uncertainties,
                    double theta_at) {
    if (uncertainties.size() < 2) {
        throw std::invalid_argument("detect_at: need at least 2 windows");
    }
    const std::size_t n_feat = uncertainties.front().size();
    if (n_feat == 0) throw std::invalid_argument("detect_at: no features");
    for (const auto& row : uncertainties) {
        if (row.size() != n_feat) {
            throw std::invalid_argument("detect_at: ragged uncertainty matrix");
        }
        for (double u : row) {
            if (!(u > 0.0) || !std::isfinite(u)) {
                throw std::runtime_error("detect_at: non-positive uncertainty");
            }
        }
    }

    AtVerdict v;
    v.threshold = theta_at;
    v.normalized.assign(uncertainties.size(), std::vector<double>(n_feat, 0.0));
    double overall_min = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < n_feat; ++d) {
        double mx = 0.0;
        for (const auto& row : uncertainties) mx = std::max(mx, row[d]);
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < uncertainties.size(); ++j) {
            const double norm = uncertainties[j][d] / mx;
            v.normalized[j][d] = norm;
            mn = std::min(mn, norm);
        }
        overall_min = std::min(overall_min, mn);
    }
    v.min_normalized = overall_min;
    v.anomalous = overall_min < theta_at;
    return v;
}

std::vector<AtVerdict> scan_segment_at(
    std::size_t len, std::size_t T, const DetectionThresholds& th,
    const std::function<std::vector<double>(std::size_t)>& window_uncertainty) {
    if (th.n_windows < 2 || T < 1) {
        throw std::invalid_argument("scan_segment_at: need N >= 2 and T >= 1");
    }
    const std::size_t chunk = th.n_windows + T - 1;
    std::vector<AtVerdict> out;
    for (std::size_t first = 0; first + chunk <= len; first += chunk) {
        std::vector<std::vector<double>> unc;
        unc.reserve(th.n_windows);
        for (std::size_t j = 0; j < th.n_windows; ++j) {
            unc.push_back(window_uncertainty(first + j));
        }
        AtVerdict v = detect_at(unc, th.theta_at);
        v.first_point = first;
        v.n_points = chunk;
        out.push_back(std::move(v));
    }
    return out;
}

double turn_angle(const std::vector<double>& cogs) {
    if (cogs.empty()) throw std::invalid_argument("turn_angle: empty window");
    double m_min = std::numeric_limits<double>::infinity(), m_max = -1.0;
    double l_min = std::numeric_limits<double>::infinity(), l_max = -1.0;
    double a_min = std::numeric_limits<double>::infinity(), a_max = -1.0;
    for (double c : cogs) {
        if (!(c >= 0.0) || !(c < 360.0)) {
            throw std::invalid_argument("turn_angle: cog outside [0, 360)");
        }
        if (c >= 270.0) {
            m_min = std::min(m_min, c);
            m_max = std::max(m_max, c);
        }
        if (c <= 90.0) {
            l_min = std::min(l_min, c);
            l_max = std::max(l_max, c);
        }
        a_min = std::min(a_min, c);
        a_max = std::max(a_max, c);
    }
    if (m_max >= 0.0 && l_max >= 0.0) {
        return (m_max - m_min) + (l_max - l_min);
    }
    return a_max - a_min;
}

std::vector<std::pair<std::size_t, std::size_t>> merge_ut_runs(
    const std::vector<bool>& flags) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < flags.size()) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < flags.size() && flags[j + 1]) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    return runs;
}

ClassVerdict classify_with_rejection(const evid::DirichletParams& d, double u_th) {
    ClassVerdict v;
    v.probs = evid::dirichlet_probs(d);
    v.u = evid::dirichlet_uncertainty(d);
    v.u_th = u_th;
    v.predicted = 0;
    for (std::size_t c = 1; c < v.probs.size(); ++c) {
        if (v.probs[c] > v.probs[v.predicted]) v.predicted = c;
    }
    v.accepted = v.u <= u_th;
    return v;
}

bool label_oos(std::int64_t t0, std::int64_t t1, double theta_oos) {
    if (t1 < t0) throw std::invalid_argument("label_oos: pair out of order");
    return static_cast<double>(t1 - t0) > theta_oos;
}

std::string verdicts_to_csv(const std::vector<AtVerdict>& verdicts) {
    std::string out = "mmsi,segment_start_time,min_norm_uncertainty,threshold,flag\n";
    char buf[32];
    auto num = [&](double v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, p);
    };
    for (const auto& v : verdicts) {
        out += std::to_string(v.mmsi);
        out += ',';
        out += std::to_string(v.start_time);
        out += ',';
        num(v.min_normalized);
        out += ',';
        num(v.threshold);
        out += ',';
        out += v.anomalous ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string verdicts_to_geojson(const std::vector<AtVerdict>& verdicts,
                                const std::vector<ais::TrackSegment>& segments) {
    using nlohmann::json;
    json fc;
    fc["type"] = "FeatureCollection";
    json features = json::array();
    for (const auto& v : verdicts) {
        if (!v.anomalous) continue;
        const ais::TrackSegment* seg = nullptr;
        for (const auto& s : segments) {
            if (s.mmsi != v.mmsi || s.records.empty()) continue;
            const std::int64_t begin = s.records.front().time;
            const std::int64_t end = s.records.back().time;
            if (v.start_time >= begin && v.start_time <= end) {
                seg = &s;
                break;
            }
        }
        if (!seg) continue;
        json coords = json::array();
        for (std::size_t k = v.first_point;
             k < v.first_point + v.n_points && k < seg->records.size(); ++k) {
            coords.push_back({seg->records[k].lon, seg->records[k].lat});
        }
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
        f["properties"] = {{"mmsi", v.mmsi},
                           {"start_time", v.start_time},
                           {"min_norm_uncertainty", v.min_normalized},
                           {"threshold", v.threshold}};
        features.push_back(std::move(f));
    }
    fc["features"] = std::move(features);
    return fc.dump(2) + "\n";
}

}  // namespace maredl::det
