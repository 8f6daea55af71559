#include "maredl/ais.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

namespace maredl::ais {

namespace {

bool parse_double(std::string_view s, double& out) {
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end && std::isfinite(out);
}

bool parse_i64(std::string_view s, std::int64_t& out) {
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end;
}

bool parse_int(std::string_view s, int& out) {
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void append_double(std::string& s, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, p);
}

void append_i64(std::string& s, std::int64_t v) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, p);
}

}  // namespace

std::vector<AisRecord> parse_csv(std::istream& in, const ParseOptions& opt,
                                 IngestReport& report) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("ingest: empty or unreadable stream");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool labeled = false;
    if (line == kCsvHeaderLabeled) {
        labeled = true;
    } else if (line != kCsvHeader) {
        throw std::runtime_error("ingest: unexpected CSV header: " + line);
    }

    std::vector<AisRecord> out;
    const std::size_t expected_fields = labeled ? 9 : 8;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto f = split_fields(line);
        if (f.size() != expected_fields) {
            report.rejections.push_back({lineno, "malformed row"});
            continue;
        }
        AisRecord r;
        if (!parse_i64(f[0], r.mmsi) || !parse_i64(f[1], r.time) ||
            !parse_double(f[2], r.lon) || !parse_double(f[3], r.lat) ||
            !parse_double(f[4], r.sog) || !parse_double(f[5], r.cog) ||
            !parse_int(f[6], r.ship_type) || !parse_int(f[7], r.nav_status)) {
            report.rejections.push_back({lineno, "malformed row"});
            continue;
        }
        if (labeled && !parse_int(f[8], r.edge)) {
            report.rejections.push_back({lineno, "malformed row"});
            continue;
        }
        if (r.lon < -180.0 || r.lon >= 180.0) {
            report.rejections.push_back({lineno, "lon out of range"});
            continue;
        }
        if (r.lat < -90.0 || r.lat > 90.0) {
            report.rejections.push_back({lineno, "lat out of range"});
            continue;
        }
        if (r.cog < 0.0 || r.cog >= 360.0) {
            report.rejections.push_back({lineno, "cog out of range"});
            continue;
        }
        if (r.sog < 0.0) {
            report.rejections.push_back({lineno, "sog out of range"});
            continue;
        }
        if (r.sog > opt.max_sog) {
            report.rejections.push_back({lineno, "sog above limit"});
            continue;
        }
        if (opt.require_nav_status0 && r.nav_status != 0) {
            report.rejections.push_back({lineno, "nav_status filtered"});
            continue;
        }
        out.push_back(r);
        ++report.accepted;
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<AisRecord>& records,
               bool with_edge) {
    std::string buf;
    buf += with_edge ? kCsvHeaderLabeled : kCsvHeader;
    buf += '\n';
    for (const auto& r : records) {
        append_i64(buf, r.mmsi);
        buf += ',';
        append_i64(buf, r.time);
        buf += ',';
        append_double(buf, r.lon);
        buf += ',';
        append_double(buf, r.lat);
        buf += ',';
        append_double(buf, r.sog);
        buf += ',';
        append_double(buf, r.cog);
        buf += ',';
        append_i64(buf, r.ship_type);
        buf += ',';
        append_i64(buf, r.nav_status);
        if (with_edge) {
            buf += ',';
            append_i64(buf, r.edge);
        }
        buf += '\n';
    }
    out << buf;
}

void write_report_csv(std::ostream& out, const IngestReport& report) {
    out << "line,reason\n";
    for (const auto& rej : report.rejections) {
        out << rej.line << ',' << rej.reason << '\n';
    }
}

std::vector<AisRecord> filter_roi(const std::vector<AisRecord>& records,
                                  const Roi& roi) {
    std::vector<AisRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (roi.contains(r.lon, r.lat)) out.push_back(r);
    }
    return out;
}

std::vector<VesselTrack> group_tracks(const std::vector<AisRecord>& records,
                                      IngestReport& report) {
    std::map<std::int64_t, std::vector<AisRecord>> by_mmsi;
    for (const auto& r : records) by_mmsi[r.mmsi].push_back(r);

    std::vector<VesselTrack> out;
    out.reserve(by_mmsi.size());
    for (auto& [mmsi, recs] : by_mmsi) {
        std::stable_sort(recs.begin(), recs.end(),
                         [](const AisRecord& a, const AisRecord& b) {
                             return a.time < b.time;
                         });
        VesselTrack t;
        t.mmsi = mmsi;
        t.records.reserve(recs.size());
        for (const auto& r : recs) {
            if (!t.records.empty() && t.records.back().time == r.time) {
                report.rejections.push_back({0, "duplicate timestamp"});
                continue;
            }
            t.records.push_back(r);
        }
        out.push_back(std::move(t));
    }
    return out;
}

double interpolate_cog(double a, double b, double t) {
    double delta = std::fmod(b - a, 360.0);
    if (delta > 180.0) delta -= 360.0;
    if (delta < -180.0) delta += 360.0;
    double c = std::fmod(a + t * delta, 360.0);
    if (c < 0.0) c += 360.0;
    return c;
}

std::vector<TrackSegment> split_and_resample(const VesselTrack& track,
                                             std::int64_t tau,
                                             std::int64_t max_gap,
                                             ResampleStats* stats) {
    if (tau <= 0) throw std::invalid_argument("split_and_resample: tau must be > 0");
    std::vector<TrackSegment> out;
    const auto& recs = track.records;

    std::size_t run_start = 0;
    auto flush = [&](std::size_t begin, std::size_t end) {  // [begin, end)
        if (end - begin < 2) {
            if (stats && end > begin) ++stats->dropped_short;
            return;
        }
        TrackSegment seg;
        seg.mmsi = track.mmsi;
        seg.tau = tau;
        const std::int64_t t0 = recs[begin].time;
        const std::int64_t t_last = recs[end - 1].time;
        std::size_t right = begin;
        for (std::int64_t t = t0; t <= t_last; t += tau) {
            while (recs[right].time < t) ++right;
            if (recs[right].time == t) {  // exact hit, keep the raw record
                seg.records.push_back(recs[right]);
                continue;
            }
            const AisRecord& lo = recs[right - 1];
            const AisRecord& hi = recs[right];
            const double frac = static_cast<double>(t - lo.time) /
                                static_cast<double>(hi.time - lo.time);
            AisRecord r = lo;  // carries ship_type/nav_status/edge
            r.time = t;
            r.lon = lo.lon + frac * (hi.lon - lo.lon);
            r.lat = lo.lat + frac * (hi.lat - lo.lat);
            r.sog = std::max(0.0, lo.sog + frac * (hi.sog - lo.sog));
            r.cog = interpolate_cog(lo.cog, hi.cog, frac);
            seg.records.push_back(r);
        }
        out.push_back(std::move(seg));
    };

    for (std::size_t i = 1; i <= recs.size(); ++i) {
        if (i == recs.size() || recs[i].time - recs[i - 1].time > max_gap) {
            flush(run_start, i);
            run_start = i;
        }
    }
    return out;
}

}  // namespace maredl::ais
