#include "maredl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maredl::geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

LocalPoint project(const GeoPoint& p, const GeoPoint& ref) {
    const double x =
        kEarthRadiusM * (p.lon - ref.lon) * kDegToRad * std::cos(ref.lat * kDegToRad);
    const double y = kEarthRadiusM * (p.lat - ref.lat) * kDegToRad;
    return {x, y};
}

GeoPoint unproject(const LocalPoint& p, const GeoPoint& ref) {
    const double lon =
        ref.lon + p.x / (kEarthRadiusM * std::cos(ref.lat * kDegToRad)) * kRadToDeg;
    const double lat = ref.lat + p.y / kEarthRadiusM * kRadToDeg;
    return {lon, lat};
}

double perpendicular_distance(const LocalPoint& p, const LocalPoint& a,
                              const LocalPoint& b) {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double len_sq = abx * abx + aby * aby;
    if (len_sq == 0.0) {
        throw std::invalid_argument("perpendicular_distance: degenerate edge (a == b)");
    }
    double t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * abx);
    const double dy = p.y - (a.y + t * aby);
    return std::hypot(dx, dy);
}

namespace {

void rdp_recurse(const std::vector<LocalPoint>& pts, std::size_t first,
                 std::size_t last, double epsilon, std::vector<std::size_t>& keep) {
    if (last <= first + 1) return;
    const LocalPoint& a = pts[first];
    const LocalPoint& b = pts[last];
    const bool degenerate = (a.x == b.x && a.y == b.y);

    double max_dist = -1.0;
    std::size_t max_idx = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double d = degenerate ? std::hypot(pts[i].x - a.x, pts[i].y - a.y)
                                    : perpendicular_distance(pts[i], a, b);
        if (d > max_dist) {
            max_dist = d;
            max_idx = i;
        }
    }
    if (max_dist > epsilon) {
        rdp_recurse(pts, first, max_idx, epsilon, keep);
        keep.push_back(max_idx);
        rdp_recurse(pts, max_idx, last, epsilon, keep);
    }
}

}  // namespace

std::vector<std::size_t> rdp_simplify(const std::vector<LocalPoint>& points,
                                      double epsilon) {
    if (points.size() < 2) {
        throw std::invalid_argument("rdp_simplify: need at least 2 points");
    }
    if (epsilon < 0.0 || !std::isfinite(epsilon)) {
        throw std::invalid_argument("rdp_simplify: epsilon must be >= 0");
    }
    std::vector<std::size_t> keep;
    keep.push_back(0);
    rdp_recurse(points, 0, points.size() - 1, epsilon, keep);
    keep.push_back(points.size() - 1);
    return keep;
}

double mahalanobis_sq(const LocalPoint& p, const EllipsoidalGate& gate) {
    const double det = gate.cov.sxx * gate.cov.syy - gate.cov.sxy * gate.cov.sxy;
    if (!(std::abs(det) > 1e-12)) {
        throw std::runtime_error("mahalanobis_sq: singular covariance");
    }
    const double dx = p.x - gate.mean.x;
    const double dy = p.y - gate.mean.y;
    // inverse of [sxx sxy; sxy syy]
    const double ixx = gate.cov.syy / det;
    const double ixy = -gate.cov.sxy / det;
    const double iyy = gate.cov.sxx / det;
    return dx * (ixx * dx + ixy * dy) + dy * (ixy * dx + iyy * dy);
}

double bearing(const LocalPoint& a, const LocalPoint& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    if (dx == 0.0 && dy == 0.0) {
        throw std::invalid_argument("bearing: coincident points");
    }
    double deg = std::atan2(dx, dy) * kRadToDeg;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg = 0.0;
    return deg;
}

double bearing_difference(double deg_a, double deg_b) {
    double d = std::fmod(std::abs(deg_a - deg_b), 360.0);
    if (d > 180.0) d = 360.0 - d;
    return d;
}

double undirected_bearing_difference(double deg_a, double deg_b) {
    double d = bearing_difference(deg_a, deg_b);
    if (d > 90.0) d = 180.0 - d;
    return d;
}

EllipsoidalGate make_gate(const std::vector<LocalPoint>& points) {
    if (points.empty()) {
        throw std::invalid_argument("make_gate: empty point set");
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = p.x - mx;
        const double dy = p.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= n;
    sxy /= n;
    syy /= n;
    // +1 m^2 keeps clusters of near-identical waypoints invertible
    return {{mx, my}, {sxx + 1.0, sxy, syy + 1.0}};
}

}  // namespace maredl::geo
