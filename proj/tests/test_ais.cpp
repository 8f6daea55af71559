#include <doctest.h>

#include <sstream>

#include "maredl/ais.hpp"

using namespace maredl;

TEST_SUITE_BEGIN("ais");

namespace {

const char* kHeader = "mmsi,timestamp,lon,lat,sog,cog,shiptype,navstatus\n";

std::vector<ais::AisRecord> parse(const std::string& body,
                                  ais::IngestReport& report,
                                  ais::ParseOptions opt = {}) {
    std::istringstream in(std::string(kHeader) + body);
    return ais::parse_csv(in, opt, report);
}

}  // namespace

TEST_CASE("parse accepts a valid row") {
    ais::IngestReport report;
    auto recs = parse("211234560,1600000000,12.01,54.31,9.5,271.25,70,0\n", report);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].mmsi == 211234560);
    CHECK(recs[0].time == 1600000000);
    CHECK(recs[0].lon == 12.01);
    CHECK(recs[0].sog == 9.5);
    CHECK(recs[0].cog == 271.25);
    CHECK(report.accepted == 1);
    CHECK(report.rejections.empty());
}

TEST_CASE("parse rejects out-of-range and malformed rows") {
    ais::IngestReport report;
    auto recs = parse(
        "1,1600000000,12.0,54.3,5.0,361,70,0\n"    // cog out of range
        "2,1600000000,12.0,54.3,31.0,10,70,0\n"    // sog above limit
        "3,1600000000,12.0,94.3,5.0,10,70,0\n"     // lat out of range
        "4,1600000000,200.0,54.3,5.0,10,70,0\n"    // lon out of range
        "5,1600000000,12.0,54.3,5.0,10,70\n"       // missing field
        "6,1600000000,12.0,54.3,abc,10,70,0\n"     // unparsable
        "7,1600000000,12.0,54.3,5.0,10,70,0\n",    // good
        report);
    CHECK(recs.size() == 1);
    CHECK(report.accepted == 1);
    REQUIRE(report.rejections.size() == 6);
    CHECK(report.rejections[0].reason == "cog out of range");
    CHECK(report.rejections[0].line == 2);
    CHECK(report.rejections[1].reason == "sog above limit");
    CHECK(report.rejections[4].reason == "malformed row");
    CHECK(report.total() == 7);
}

TEST_CASE("nav status filter is switchable") {
    ais::IngestReport r1;
    auto with_filter = parse("1,1600000000,12.0,54.3,5.0,10,70,5\n", r1);
    CHECK(with_filter.empty());
    REQUIRE(r1.rejections.size() == 1);
    CHECK(r1.rejections[0].reason == "nav_status filtered");

    ais::IngestReport r2;
    ais::ParseOptions opt;
    opt.require_nav_status0 = false;
    auto without = parse("1,1600000000,12.0,54.3,5.0,10,70,5\n", r2, opt);
    CHECK(without.size() == 1);
}

TEST_CASE("missing header is fatal") {
    std::istringstream bad("lat,lon\n1,2\n");
    ais::IngestReport report;
    CHECK_THROWS_AS(ais::parse_csv(bad, {}, report), std::runtime_error);
    std::istringstream empty("");
    CHECK_THROWS_AS(ais::parse_csv(empty, {}, report), std::runtime_error);
}

TEST_CASE("write then parse round-trips fields exactly") {
    std::vector<ais::AisRecord> recs{
        {211234560, 1600000007, 12.123456, 54.344512, 9.57, 271.2533, 70, 0, -1},
        {211234560, 1600000067, 12.0 + 1.0 / 3.0, 54.3, 0.0, 359.999, 80, 0, 3},
    };
    std::ostringstream out;
    ais::write_csv(out, recs, /*with_edge=*/true);
    std::istringstream in(out.str());
    ais::IngestReport report;
    auto back = ais::parse_csv(in, {}, report);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].mmsi == recs[i].mmsi);
        CHECK(back[i].time == recs[i].time);
        CHECK(back[i].lon == recs[i].lon);
        CHECK(back[i].lat == recs[i].lat);
        CHECK(back[i].sog == recs[i].sog);
        CHECK(back[i].cog == recs[i].cog);
        CHECK(back[i].ship_type == recs[i].ship_type);
        CHECK(back[i].nav_status == recs[i].nav_status);
        CHECK(back[i].edge == recs[i].edge);
    }
}

TEST_CASE("roi filter") {
    ais::Roi roi{{11.5, 54.2}, {12.5, 54.5}};
    std::vector<ais::AisRecord> recs{{1, 0, 12.0, 54.3, 0, 0, 0, 0, -1},
                                     {2, 0, 13.0, 54.3, 0, 0, 0, 0, -1}};
    auto kept = ais::filter_roi(recs, roi);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].mmsi == 1);
    CHECK(ais::filter_roi({}, roi).empty());
}

TEST_CASE("group_tracks orders and deduplicates timestamps") {
    std::vector<ais::AisRecord> recs{
        {7, 100, 1.0, 1, 0, 0, 0, 0, -1}, {7, 50, 2.0, 1, 0, 0, 0, 0, -1},
        {7, 100, 3.0, 1, 0, 0, 0, 0, -1},  // duplicate timestamp, dropped
        {8, 10, 4.0, 1, 0, 0, 0, 0, -1},
    };
    ais::IngestReport report;
    auto tracks = ais::group_tracks(recs, report);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].mmsi == 7);
    REQUIRE(tracks[0].records.size() == 2);
    CHECK(tracks[0].records[0].time == 50);
    CHECK(tracks[0].records[1].time == 100);
    CHECK(tracks[0].records[1].lon == 1.0);  // first wins
    REQUIRE(report.rejections.size() == 1);
    CHECK(report.rejections[0].reason == "duplicate timestamp");
}

TEST_CASE("resample interpolates onto the tau grid") {
    ais::VesselTrack t;
    t.mmsi = 9;
    t.records = {{9, 0, 10.0, 50.0, 4.0, 10.0, 70, 0, -1},
                 {9, 120, 11.0, 51.0, 8.0, 20.0, 70, 0, -1}};
    auto segs = ais::split_and_resample(t, 60, 3600);
    REQUIRE(segs.size() == 1);
    REQUIRE(segs[0].records.size() == 3);
    CHECK(segs[0].records[0].time == 0);
    CHECK(segs[0].records[1].time == 60);
    CHECK(segs[0].records[2].time == 120);
    CHECK(segs[0].records[1].lon == doctest::Approx(10.5));
    CHECK(segs[0].records[1].lat == doctest::Approx(50.5));
    CHECK(segs[0].records[1].sog == doctest::Approx(6.0));
    CHECK(segs[0].records[1].cog == doctest::Approx(15.0));
    CHECK(segs[0].records[2].lon == 11.0);  // exact hit keeps the raw record
}

TEST_CASE("gaps above max_gap split segments") {
    ais::VesselTrack t;
    t.mmsi = 9;
    t.records = {{9, 0, 10.0, 50.0, 4, 10, 70, 0, -1},
                 {9, 60, 10.1, 50.0, 4, 10, 70, 0, -1},
                 {9, 4060, 10.2, 50.0, 4, 10, 70, 0, -1},
                 {9, 4120, 10.3, 50.0, 4, 10, 70, 0, -1}};
    auto segs = ais::split_and_resample(t, 60, 3600);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].records.size() == 2);
    CHECK(segs[1].records.front().time == 4060);
}

TEST_CASE("cog interpolates along the shortest arc") {
    CHECK(ais::interpolate_cog(350.0, 10.0, 0.5) == doctest::Approx(0.0));
    CHECK(ais::interpolate_cog(10.0, 350.0, 0.5) == doctest::Approx(0.0));
    CHECK(ais::interpolate_cog(10.0, 350.0, 0.25) == doctest::Approx(5.0));
    CHECK(ais::interpolate_cog(90.0, 270.0, 0.0) == doctest::Approx(90.0));

    ais::VesselTrack t;
    t.mmsi = 9;
    t.records = {{9, 0, 10.0, 50.0, 4, 350.0, 70, 0, -1},
                 {9, 120, 10.1, 50.0, 4, 10.0, 70, 0, -1}};
    auto segs = ais::split_and_resample(t, 60, 3600);
    CHECK(segs[0].records[1].cog == doctest::Approx(0.0));
}

TEST_CASE("short raw runs are dropped and counted") {
    ais::VesselTrack t;
    t.mmsi = 9;
    t.records = {{9, 0, 10.0, 50.0, 4, 10, 70, 0, -1},
                 {9, 9000, 10.2, 50.0, 4, 10, 70, 0, -1},
                 {9, 9060, 10.3, 50.0, 4, 10, 70, 0, -1}};
    ais::ResampleStats stats;
    auto segs = ais::split_and_resample(t, 60, 3600, &stats);
    REQUIRE(segs.size() == 1);
    CHECK(stats.dropped_short == 1);
}

TEST_CASE("resampled values stay bounded by their raw neighbors") {
    ais::VesselTrack t;
    t.mmsi = 9;
    std::int64_t time = 0;
    double lon = 11.0;
    for (int i = 0; i < 20; ++i) {
        t.records.push_back({9, time, lon, 54.0 + 0.01 * (i % 3),
                             4.0 + (i % 5), 355.0 + (i % 10), 70, 0, -1});
        time += 45 + 20 * (i % 4);
        lon += 0.01;
    }
    for (auto& r : t.records) {
        if (r.cog >= 360.0) r.cog -= 360.0;
    }
    auto segs = ais::split_and_resample(t, 60, 3600);
    for (const auto& seg : segs) {
        for (std::size_t k = 1; k < seg.records.size(); ++k) {
            CHECK(seg.records[k].time - seg.records[k - 1].time == 60);
        }
        for (const auto& r : seg.records) {
            CHECK(r.lon >= 11.0);
            CHECK(r.lon <= lon);
            CHECK(r.sog >= 0.0);
            CHECK(r.cog >= 0.0);
            CHECK(r.cog < 360.0);
        }
    }
}

TEST_SUITE_END();
