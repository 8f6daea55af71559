#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef UNIT_CLI_PATH
#define UNIT_CLI_PATH "maredl"
#endif

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

struct Workdir {
    fs::path dir;
    Workdir() {
        dir = fs::temp_directory_path() / "maredl_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string p(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd =
        std::string(UNIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kBase =
    " --set dbscan_eps=500 --set dbscan_nmin=5 --set synth_tracks_per_lane=12"
    " --set seed=5 --set hidden=16 --set epochs=2";

}  // namespace

TEST_CASE("pipeline runs end to end with expected exit codes") {
    Workdir w;
    CHECK(run(std::string("synth") + kBase + " --gap-tracks 10 --output " +
              w.p("c.csv") + " --labels " + w.p("l.csv")) == 0);
    CHECK(run(std::string("ingest") + kBase + " --input " + w.p("c.csv") +
              " --output " + w.p("clean.csv") + " --report " + w.p("rej.csv")) ==
          0);
    CHECK(run(std::string("build-graph") + kBase + " --input " + w.p("c.csv") +
              " --output " + w.p("g.geojson")) == 0);
    CHECK(run(std::string("associate") + kBase + " --input " + w.p("c.csv") +
              " --graph " + w.p("g.geojson") + " --output " + w.p("lab.csv")) ==
          0);
    CHECK(run(std::string("train-regressor") + kBase + " --input " +
              w.p("lab.csv") + " --graph " + w.p("g.geojson") + " --output " +
              w.p("m.ckpt")) == 0);
    CHECK(run(std::string("detect at") + kBase + " --input " + w.p("lab.csv") +
              " --graph " + w.p("g.geojson") + " --model " + w.p("m.ckpt") +
              " --output " + w.p("v.csv") + " --geojson " + w.p("v.geojson")) ==
          0);
    CHECK(run(std::string("train-classifier oos") + kBase + " --input " +
              w.p("c.csv") + " --output " + w.p("oos.ckpt")) == 0);
    CHECK(run(std::string("detect oos") + kBase + " --input " + w.p("c.csv") +
              " --model " + w.p("oos.ckpt") + " --output " + w.p("oosv.csv")) ==
          0);
    CHECK(run(std::string("eval oos") + kBase + " --input " + w.p("c.csv") +
              " --model " + w.p("oos.ckpt") + " --metrics " + w.p("m.csv")) == 0);
    CHECK(run(std::string("baseline-similarity") + kBase + " --input " +
              w.p("c.csv") + " --graph " + w.p("g.geojson") + " --output " +
              w.p("sim.csv")) == 0);
    CHECK(run(std::string("export-plot") + kBase + " --graph " + w.p("g.geojson") +
              " --tracks " + w.p("lab.csv") + " --verdicts-geojson " +
              w.p("v.geojson") + " --output " + w.p("plot.geojson")) == 0);

    CHECK(slurp(w.p("v.csv")).rfind("mmsi,segment_start_time", 0) == 0);
    CHECK(slurp(w.p("m.csv")).rfind("u_th,accuracy_all,accuracy_anomalous", 0) ==
          0);
    CHECK(slurp(w.p("rej.csv")).rfind("line,reason", 0) == 0);
}

TEST_CASE("refine-graph applies an edit script") {
    Workdir w;
    REQUIRE(run(std::string("synth") + kBase + " --output " + w.p("c.csv")) == 0);
    REQUIRE(run(std::string("build-graph") + kBase + " --input " + w.p("c.csv") +
                " --output " + w.p("g.geojson")) == 0);
    {
        std::ofstream edits(w.p("edits.txt"));
        edits << "# bridge after removing a node\nremove_node 0\n";
    }
    CHECK(run(std::string("refine-graph") + kBase + " --graph " + w.p("g.geojson") +
              " --edits " + w.p("edits.txt") + " --output " +
              w.p("refined.geojson")) == 0);
    CHECK(slurp(w.p("refined.geojson")).find("FeatureCollection") !=
          std::string::npos);
}

TEST_CASE("usage errors exit with 2, domain errors with 1") {
    Workdir w;
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("build-graph --output x.geojson") == 2);  // missing required
    CHECK(run(std::string("build-graph") + kBase + " --input " +
              w.p("missing.csv") + " --output " + w.p("x.geojson")) == 2);
    CHECK(run(std::string("synth") + kBase + " --set bogus_key=1 --output " +
              w.p("c.csv")) == 1);

    // a corpus too sparse to cluster is a domain error
    REQUIRE(run(std::string("synth") + kBase +
                " --set synth_tracks_per_lane=1 --output " + w.p("tiny.csv")) ==
            0);
    CHECK(run(std::string("build-graph") + kBase + " --input " + w.p("tiny.csv") +
              " --output " + w.p("g.geojson")) == 1);
}

TEST_CASE("dump-config round-trips through a rerun") {
    Workdir w;
    REQUIRE(run(std::string("synth") + kBase + " --dump-config " + w.p("eff.cfg") +
                " --output " + w.p("c1.csv")) == 0);
    REQUIRE(run("synth --config " + w.p("eff.cfg") + " --output " +
                w.p("c2.csv")) == 0);
    CHECK(slurp(w.p("c1.csv")) == slurp(w.p("c2.csv")));
    CHECK(run("synth --set seed=6 --config " + w.p("eff.cfg") + " --output " +
              w.p("c3.csv")) == 0);
    CHECK(slurp(w.p("c1.csv")) != slurp(w.p("c3.csv")));
}

TEST_CASE("EDL_SEED env var overrides the config seed") {
    Workdir w;
    // env beats the default; an explicit --set seed beats the env
    const std::string small = " --set synth_tracks_per_lane=4";
    auto run_env = [&](const std::string& env, const std::string& args) {
        const std::string cmd = env + " " + UNIT_CLI_PATH + " " + args +
                                " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    REQUIRE(run_env("EDL_SEED=123",
                    "synth" + small + " --output " + w.p("e1.csv")) == 0);
    REQUIRE(run("synth" + small + " --set seed=123 --output " + w.p("e2.csv")) ==
            0);
    REQUIRE(run_env("EDL_SEED=7", "synth" + small + " --set seed=123 --output " +
                                      w.p("e3.csv")) == 0);
    REQUIRE(run_env("EDL_SEED=7",
                    "synth" + small + " --output " + w.p("e4.csv")) == 0);
    CHECK(slurp(w.p("e1.csv")) == slurp(w.p("e2.csv")));  // env == same seed flag
    CHECK(slurp(w.p("e3.csv")) == slurp(w.p("e2.csv")));  // flag wins over env
    CHECK(slurp(w.p("e4.csv")) != slurp(w.p("e1.csv")));  // env applied at all
}

TEST_SUITE_END();
