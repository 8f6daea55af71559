#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace maredl::geo {

// Geographic coordinates in decimal degrees.
struct GeoPoint {
    double lon = 0.0;  // [-180, 180)
    double lat = 0.0;  // [-90, 90]
};

// Planar workspace coordinates, meters east/north of a reference point.
struct LocalPoint {
    double x = 0.0;
    double y = 0.0;
};

// 2x2 symmetric covariance, meters^2.
struct Cov2 {
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
};

// Node gate: mean position plus covariance ellipse.
struct EllipsoidalGate {
    LocalPoint mean;
    Cov2 cov;
};

inline constexpr double kEarthRadiusM = 6371000.0;

// Equirectangular projection anchored at ref. Valid within ~200 km of ref
// at mid latitudes; callers keep ref at the ROI center.
LocalPoint project(const GeoPoint& p, const GeoPoint& ref);
GeoPoint unproject(const LocalPoint& p, const GeoPoint& ref);

// Ramer-Douglas-Peucker. Returns strictly increasing indices of retained
// waypoints; first and last are always kept. Distance to a candidate
// segment is the clamped point-to-segment distance (not infinite-line).
// Throws std::invalid_argument on fewer than 2 points or epsilon < 0.
std::vector<std::size_t> rdp_simplify(const std::vector<LocalPoint>& points,
                                      double epsilon);

// Distance from p to segment [a,b], clamped to the nearer endpoint when the
// orthogonal projection falls outside the segment. a == b is an error.
double perpendicular_distance(const LocalPoint& p, const LocalPoint& a,
                              const LocalPoint& b);

// (p - mean)^T cov^{-1} (p - mean). Throws on a singular covariance.
double mahalanobis_sq(const LocalPoint& p, const EllipsoidalGate& gate);

// Compass bearing of b as seen from a, degrees in [0, 360). 0 = north,
// 90 = east. a == b is an error.
double bearing(const LocalPoint& a, const LocalPoint& b);

// Absolute angular difference folded to [0, 180].
double bearing_difference(double deg_a, double deg_b);

// Difference between two line directions ignoring orientation, in [0, 90].
double undirected_bearing_difference(double deg_a, double deg_b);

// Mean and covariance of a point cloud with the node regularization
// (+1 m^2 on the diagonal) applied, so gates built from degenerate clusters
// stay invertible.
EllipsoidalGate make_gate(const std::vector<LocalPoint>& points);

}  // namespace maredl::geo
