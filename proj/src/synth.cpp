#include "maredl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace maredl::synth {

namespace {

constexpr double kKnotsToMs = 0.514444;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double fold360(double deg) {
    deg = std::fmod(deg, 360.0);
    if (deg < 0.0) deg += 360.0;
    return deg;
}

struct LocalLane {
    std::vector<geo::LocalPoint> pts;
    std::vector<double> cum;  // cumulative arclength
    double total = 0.0;
};

LocalLane project_lane(const std::vector<geo::GeoPoint>& polyline,
                       const geo::GeoPoint& ref) {
    if (polyline.size() < 2) {
        throw std::invalid_argument("LaneSpec: polyline needs >= 2 vertices");
    }
    LocalLane lane;
    for (const auto& p : polyline) lane.pts.push_back(geo::project(p, ref));
    lane.cum.push_back(0.0);
    for (std::size_t i = 1; i < lane.pts.size(); ++i) {
        const double d = std::hypot(lane.pts[i].x - lane.pts[i - 1].x,
                                    lane.pts[i].y - lane.pts[i - 1].y);
        lane.cum.push_back(lane.cum.back() + d);
    }
    lane.total = lane.cum.back();
    return lane;
}

// position and unit travel direction at arclength s
void lane_at(const LocalLane& lane, double s, geo::LocalPoint& pos, double& ux,
             double& uy) {
    std::size_t seg = 1;
    while (seg + 1 < lane.cum.size() && lane.cum[seg] < s) ++seg;
    const auto& a = lane.pts[seg - 1];
    const auto& b = lane.pts[seg];
    const double len = lane.cum[seg] - lane.cum[seg - 1];
    const double t = len > 0.0 ? (s - lane.cum[seg - 1]) / len : 0.0;
    pos = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    ux = (b.x - a.x) / len;
    uy = (b.y - a.y) / len;
}

}  // namespace

World generate_world(const WorldParams& params, std::uint64_t seed) {
    if (params.lanes.empty()) throw std::invalid_argument("generate_world: no lanes");
    if (params.tau <= 0) throw std::invalid_argument("generate_world: tau <= 0");
    const geo::GeoPoint ref = params.roi.center();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    World world;
    std::int64_t mmsi = params.mmsi_base;
    for (std::size_t li = 0; li < params.lanes.size(); ++li) {
        const auto& spec = params.lanes[li];
        if (spec.noise_m < 0.0) {
            throw std::invalid_argument("LaneSpec: noise must be >= 0");
        }
        LocalLane forward = project_lane(spec.polyline, ref);
        auto reversed_polyline = spec.polyline;
        std::reverse(reversed_polyline.begin(), reversed_polyline.end());
        LocalLane backward = project_lane(reversed_polyline, ref);

        const double speed = spec.sog_knots * kKnotsToMs;
        if (!(speed > 0.0)) throw std::invalid_argument("LaneSpec: sog must be > 0");

        for (std::size_t v = 0; v < spec.traffic; ++v) {
            const bool reverse = spec.both_ways && (v % 2 == 1);
            const LocalLane& lane = reverse ? backward : forward;
            std::uniform_int_distribution<std::int64_t> start_dist(
                0, params.start_spread);
            const std::int64_t start = params.t0 + start_dist(rng);

            ais::VesselTrack track;
            track.mmsi = ++mmsi;
            for (std::int64_t k = 0;; ++k) {
                const double s = static_cast<double>(k * params.tau) * speed;
                if (s > lane.total) break;
                geo::LocalPoint pos;
                double ux = 0.0, uy = 0.0;
                lane_at(lane, s, pos, ux, uy);
                if (spec.noise_m > 0.0) {
                    const double cross = gauss(rng) * spec.noise_m;
                    pos.x += -uy * cross;
                    pos.y += ux * cross;
                }
                double cog = fold360(std::atan2(ux, uy) * kRadToDeg);
                if (spec.cog_noise_deg > 0.0) {
                    cog = fold360(cog + gauss(rng) * spec.cog_noise_deg);
                }
                const geo::GeoPoint gp = geo::unproject(pos, ref);
                ais::AisRecord rec;
                rec.mmsi = track.mmsi;
                rec.time = start + k * params.tau;
                rec.lon = gp.lon;
                rec.lat = gp.lat;
                rec.sog = spec.sog_knots;
                rec.cog = cog;
                rec.ship_type = params.ship_type;
                rec.nav_status = 0;
                track.records.push_back(rec);
            }
            world.anomalous.emplace_back(track.records.size(), false);
            world.lane_of_track.push_back(static_cast<int>(li));
            world.tracks.push_back(std::move(track));
        }
    }
    return world;
}

void inject(World& world, const std::vector<AnomalyInjection>& injections,
            const ais::Roi& roi) {
    const geo::GeoPoint ref = roi.center();
    for (const auto& inj : injections) {
        if (inj.track >= world.tracks.size()) {
            throw std::invalid_argument("inject: track index out of range");
        }
        auto& track = world.tracks[inj.track];
        auto& flags = world.anomalous[inj.track];
        if (inj.start_index >= track.records.size()) {
            throw std::invalid_argument("inject: start index outside track bounds");
        }
        if (!(inj.magnitude > 0.0)) {
            throw std::invalid_argument("inject: magnitude must be > 0");
        }
        const std::int64_t t_start = track.records[inj.start_index].time;

        switch (inj.kind) {
            case AnomalyInjection::Kind::Offset: {
                for (std::size_t k = inj.start_index; k < track.records.size(); ++k) {
                    auto& r = track.records[k];
                    const double dt = static_cast<double>(r.time - t_start);
                    const double frac =
                        inj.duration_s > 0.0 ? std::min(1.0, dt / inj.duration_s) : 1.0;
                    const double disp = inj.magnitude * frac;
                    if (disp <= 0.0) continue;
                    const double theta = r.cog * kDegToRad;
                    geo::LocalPoint pos = geo::project({r.lon, r.lat}, ref);
                    pos.x += -std::cos(theta) * disp;  // left of travel
                    pos.y += std::sin(theta) * disp;
                    const geo::GeoPoint gp = geo::unproject(pos, ref);
                    r.lon = gp.lon;
                    r.lat = gp.lat;
                    flags[k] = true;
                }
                break;
            }
            case AnomalyInjection::Kind::Turn: {
                const double heading0 = track.records[inj.start_index].cog;
                const double speed =
                    track.records[inj.start_index].sog * kKnotsToMs;
                geo::LocalPoint pos = geo::project(
                    {track.records[inj.start_index].lon,
                     track.records[inj.start_index].lat},
                    ref);
                double heading_prev = heading0;
                for (std::size_t k = inj.start_index + 1; k < track.records.size();
                     ++k) {
                    auto& r = track.records[k];
                    const double dt = static_cast<double>(r.time - t_start);
                    const double frac =
                        inj.duration_s > 0.0 ? std::min(1.0, dt / inj.duration_s) : 1.0;
                    const double heading = fold360(heading0 + inj.magnitude * frac);
                    const double step =
                        speed * static_cast<double>(r.time - track.records[k - 1].time);
                    pos.x += step * std::sin(heading_prev * kDegToRad);
                    pos.y += step * std::cos(heading_prev * kDegToRad);
                    const geo::GeoPoint gp = geo::unproject(pos, ref);
                    r.lon = gp.lon;
                    r.lat = gp.lat;
                    r.cog = heading;
                    if (dt <= inj.duration_s) flags[k] = true;
                    heading_prev = heading;
                }
                flags[inj.start_index] = true;
                break;
            }
            case AnomalyInjection::Kind::Gap: {
                const std::int64_t tau =
                    track.records.size() > 1
                        ? track.records[1].time - track.records[0].time
                        : 60;
                const std::size_t drop =
                    static_cast<std::size_t>(inj.magnitude / static_cast<double>(tau));
                const std::size_t first = inj.start_index + 1;
                if (first + drop >= track.records.size()) {
                    throw std::invalid_argument("inject: gap runs past the track end");
                }
                track.records.erase(track.records.begin() + first,
                                    track.records.begin() + first + drop);
                flags.erase(flags.begin() + first, flags.begin() + first + drop);
                flags[first] = true;  // the survivor after the gap
                break;
            }
        }
    }
}

std::string world_to_csv(const World& world) {
    std::vector<ais::AisRecord> all;
    for (const auto& t : world.tracks) {
        all.insert(all.end(), t.records.begin(), t.records.end());
    }
    std::ostringstream out;
    ais::write_csv(out, all, /*with_edge=*/false);
    return out.str();
}

std::string world_labels_to_csv(const World& world) {
    std::ostringstream out;
    out << "track,mmsi,record,lane,anomalous\n";
    for (std::size_t t = 0; t < world.tracks.size(); ++t) {
        for (std::size_t k = 0; k < world.tracks[t].records.size(); ++k) {
            out << t << ',' << world.tracks[t].mmsi << ',' << k << ','
                << world.lane_of_track[t] << ',' << (world.anomalous[t][k] ? 1 : 0)
                << '\n';
        }
    }
    return out.str();
}

}  // namespace maredl::synth
