#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "maredl/geometry.hpp"

namespace maredl::ais {

// No-edge marker for the per-record association label.
inline constexpr int kOutlierEdge = -1;

// One timestamped kinematic report.
struct AisRecord {
    std::int64_t mmsi = 0;
    std::int64_t time = 0;  // unix seconds
    double lon = 0.0;
    double lat = 0.0;
    double sog = 0.0;  // knots
    double cog = 0.0;  // degrees, [0, 360)
    int ship_type = 0;
    int nav_status = 0;
    int edge = kOutlierEdge;  // filled by graph association
};

// Time-ordered reports of a single vessel.
struct VesselTrack {
    std::int64_t mmsi = 0;
    std::vector<AisRecord> records;
};

// Contiguous resampled run at fixed cadence tau.
struct TrackSegment {
    std::int64_t mmsi = 0;
    std::int64_t tau = 0;
    std::vector<AisRecord> records;
};

struct Roi {
    geo::GeoPoint min;
    geo::GeoPoint max;

    bool contains(double lon, double lat) const {
        return lon >= min.lon && lon <= max.lon && lat >= min.lat && lat <= max.lat;
    }
    geo::GeoPoint center() const {
        return {(min.lon + max.lon) / 2.0, (min.lat + max.lat) / 2.0};
    }
};

struct Rejection {
    std::size_t line = 0;  // 1-based file line
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<Rejection> rejections;
    std::size_t total() const { return accepted + rejections.size(); }
};

struct ParseOptions {
    double max_sog = 30.0;           // knots; rows above are rejected
    bool require_nav_status0 = true; // underway-using-engine filter
};

// CSV schema (UTF-8, comma separated):
//   mmsi,timestamp,lon,lat,sog,cog,shiptype,navstatus
inline constexpr const char* kCsvHeader =
    "mmsi,timestamp,lon,lat,sog,cog,shiptype,navstatus";
// With the association column appended:
inline constexpr const char* kCsvHeaderLabeled =
    "mmsi,timestamp,lon,lat,sog,cog,shiptype,navstatus,edge";

// Parses the ingest CSV. Malformed or filtered rows are recorded in the
// report and skipped; only a missing/wrong header or an unreadable stream is
// fatal (std::runtime_error). Accepts both the plain and the labeled header;
// the edge column, when present, is read back into AisRecord::edge.
std::vector<AisRecord> parse_csv(std::istream& in, const ParseOptions& opt,
                                 IngestReport& report);

// Serialization used by every command that emits record CSVs. Numbers are
// written with shortest-round-trip formatting so parse(serialize(r)) == r.
void write_csv(std::ostream& out, const std::vector<AisRecord>& records,
               bool with_edge);
void write_report_csv(std::ostream& out, const IngestReport& report);

std::vector<AisRecord> filter_roi(const std::vector<AisRecord>& records,
                                  const Roi& roi);

// Groups records per vessel and time-orders them. Duplicate timestamps keep
// the first occurrence; later ones are reported. Output ordered by mmsi.
std::vector<VesselTrack> group_tracks(const std::vector<AisRecord>& records,
                                      IngestReport& report);

struct ResampleStats {
    std::size_t dropped_short = 0;  // raw runs with < 2 points
};

// Splits a track on time gaps > max_gap and resamples each run onto the
// tau grid anchored at the run's first timestamp. lon/lat/sog interpolate
// linearly (sog clamped >= 0); cog interpolates along the shortest arc.
std::vector<TrackSegment> split_and_resample(const VesselTrack& track,
                                             std::int64_t tau,
                                             std::int64_t max_gap,
                                             ResampleStats* stats = nullptr);

// Shortest-arc circular interpolation helper, exposed for tests.
double interpolate_cog(double a, double b, double t);

}  // namespace maredl::ais
