// maredl: AIS traffic-lane extraction and uncertainty-based anomaly
// detection pipeline. Subcommands mirror the processing stages; every
// command reads a key=value config file plus flag overrides (flags win).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "maredl/config.hpp"
#include "maredl/detectors.hpp"
#include "maredl/features.hpp"
#include "maredl/nn/checkpoint.hpp"
#include "maredl/similarity.hpp"
#include "maredl/synth.hpp"
#include "maredl/traffic_graph.hpp"

namespace {

using namespace maredl;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open input: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output: " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::string dump_config_path;
    std::string seed_flag;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--set", opts.overrides,
                    "config override key=value (repeatable, wins over file)");
    cmd->add_option("--seed", opts.seed_flag, "shorthand for --set seed=N");
    cmd->add_option("--dump-config", opts.dump_config_path,
                    "write the effective config to this path");
}

PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = parse_config_file(opts.config_path);
    if (const char* env_seed = std::getenv("EDL_SEED")) {
        apply_config_override(cfg, "seed", env_seed);
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--set expects key=value, got: " + kv);
        }
        apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opts.seed_flag.empty()) apply_config_override(cfg, "seed", opts.seed_flag);
    cfg.validate();
    if (!opts.dump_config_path.empty()) {
        write_file(opts.dump_config_path, dump_config(cfg));
    }
    return cfg;
}

// flags win; the config's default path fills an omitted flag
std::string resolve_path(const std::string& flag, const std::string& cfg_path,
                         const char* what, bool required = true) {
    if (!flag.empty()) return flag;
    if (!cfg_path.empty()) return cfg_path;
    if (required) {
        throw UsageError(std::string("missing --") + what +
                         " (no config default either)");
    }
    return {};
}

std::vector<ais::AisRecord> load_records(const std::string& path,
                                         const PipelineConfig& cfg,
                                         ais::IngestReport& report) {
    std::istringstream in(read_file(path));
    auto records = ais::parse_csv(in, {}, report);
    return ais::filter_roi(records, cfg.roi);
}

std::vector<ais::TrackSegment> load_segments(const std::string& path,
                                             const PipelineConfig& cfg,
                                             std::int64_t tau) {
    ais::IngestReport report;
    const auto records = load_records(path, cfg, report);
    const auto tracks = ais::group_tracks(records, report);
    std::vector<ais::TrackSegment> segments;
    for (const auto& t : tracks) {
        auto segs = ais::split_and_resample(t, tau, cfg.max_gap);
        segments.insert(segments.end(), segs.begin(), segs.end());
    }
    return segments;
}

feat::FeatureSpec feature_spec(const PipelineConfig& cfg,
                               const graph::TrafficGraph* g) {
    feat::FeatureSpec spec;
    spec.roi = cfg.roi;
    spec.use_edge = cfg.use_edge_feature && g != nullptr;
    spec.edge_count = g ? g->edges.size() : 0;
    return spec;
}

// ---------------------------------------------------------------- commands

int cmd_ingest(const CommonOpts& common, std::string input, std::string output,
               std::string report_path) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    output = resolve_path(output, cfg.path_output, "output");
    report_path = resolve_path(report_path, cfg.path_report, "report", false);
    ais::IngestReport report;
    const auto records = load_records(input, cfg, report);
    std::ostringstream out;
    ais::write_csv(out, records, /*with_edge=*/false);
    write_file(output, out.str());
    if (!report_path.empty()) {
        std::ostringstream rep;
        ais::write_report_csv(rep, report);
        write_file(report_path, rep.str());
    }
    std::cout << "ingest: accepted " << report.accepted << " in-roi "
              << records.size() << " rejected " << report.rejections.size()
              << "\n";
    return kExitOk;
}

struct SynthOpts {
    std::string output;
    std::string labels;
    std::int64_t tau = 0;  // 0: use config tau
    std::size_t offset_tracks = 0;
    double offset_m = 2000.0;
    std::size_t turn_tracks = 0;
    double turn_deg = 40.0;
    double turn_duration_s = 60.0;
    std::size_t gap_tracks = 0;
    double gap_s = 300.0;
};

int cmd_synth(const CommonOpts& common, SynthOpts opts) {
    const auto cfg = resolve_config(common);
    opts.output = resolve_path(opts.output, cfg.path_output, "output");
    opts.labels = resolve_path(opts.labels, cfg.path_labels, "labels", false);

    synth::WorldParams params;
    params.roi = cfg.roi;
    params.tau = opts.tau > 0 ? opts.tau : cfg.tau;
    const double lon_mid = (cfg.roi.min.lon + cfg.roi.max.lon) / 2.0;
    const double lat_low = cfg.roi.min.lat + 0.2 * (cfg.roi.max.lat - cfg.roi.min.lat);
    synth::LaneSpec east_west;
    east_west.polyline = {{cfg.roi.min.lon + 0.1, lat_low},
                          {cfg.roi.max.lon - 0.1, lat_low}};
    synth::LaneSpec south_north;
    south_north.polyline = {{lon_mid, cfg.roi.min.lat + 0.02},
                            {lon_mid, cfg.roi.max.lat - 0.02}};
    for (auto* lane : {&east_west, &south_north}) {
        lane->traffic = cfg.synth_tracks_per_lane;
        lane->noise_m = cfg.synth_noise_m;
        lane->cog_noise_deg = cfg.synth_cog_noise_deg;
        lane->sog_knots = cfg.synth_sog;
    }
    params.lanes = {east_west, south_north};

    auto world = synth::generate_world(params, cfg.seed);

    const std::size_t n_tracks = world.tracks.size();
    std::size_t seq = 0;
    // deterministic golden-ratio walk over (track, position) so repeated
    // injections land on fresh spots; counts may exceed the track count
    auto place = [&](synth::AnomalyInjection& inj) {
        inj.track = (seq * 7 + 3) % n_tracks;
        const double frac = 0.15 + 0.7 * std::fmod(0.6180339887 * (seq + 1), 1.0);
        inj.start_index = static_cast<std::size_t>(
            static_cast<double>(world.tracks[inj.track].records.size()) * frac);
        ++seq;
    };
    std::size_t skipped = 0;
    std::vector<synth::AnomalyInjection> injections;
    auto push = [&](synth::AnomalyInjection inj) {
        // apply one at a time so placement sees post-gap track lengths
        place(inj);
        if (inj.kind == synth::AnomalyInjection::Kind::Gap) {
            const auto& recs = world.tracks[inj.track].records;
            const std::int64_t tau_track =
                recs.size() > 1 ? recs[1].time - recs[0].time : params.tau;
            const auto drop = static_cast<std::size_t>(
                inj.magnitude / static_cast<double>(tau_track));
            if (inj.start_index + 1 + drop >= recs.size()) {
                ++skipped;
                return;
            }
        }
        synth::inject(world, {inj}, cfg.roi);
        injections.push_back(inj);
    };
    for (std::size_t i = 0; i < opts.offset_tracks; ++i) {
        synth::AnomalyInjection inj;
        inj.kind = synth::AnomalyInjection::Kind::Offset;
        inj.magnitude = opts.offset_m;
        inj.duration_s = 10.0 * static_cast<double>(params.tau);
        push(inj);
    }
    for (std::size_t i = 0; i < opts.turn_tracks; ++i) {
        synth::AnomalyInjection inj;
        inj.kind = synth::AnomalyInjection::Kind::Turn;
        inj.magnitude = opts.turn_deg;
        inj.duration_s = opts.turn_duration_s;
        push(inj);
    }
    for (std::size_t i = 0; i < opts.gap_tracks; ++i) {
        synth::AnomalyInjection inj;
        inj.kind = synth::AnomalyInjection::Kind::Gap;
        inj.magnitude = opts.gap_s;
        push(inj);
    }
    if (skipped > 0) {
        std::cout << "synth: skipped " << skipped
                  << " injections that would run past a track end\n";
    }

    write_file(opts.output, synth::world_to_csv(world));
    if (!opts.labels.empty()) {
        write_file(opts.labels, synth::world_labels_to_csv(world));
    }
    std::cout << "synth: " << world.tracks.size() << " tracks, "
              << injections.size() << " injections\n";
    return kExitOk;
}

int cmd_build_graph(const CommonOpts& common, std::string input,
                    std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    output = resolve_path(output, cfg.path_output, "output");
    const auto segments = load_segments(input, cfg, cfg.tau);
    graph::GtrParams params;
    params.rdp_eps = cfg.rdp_eps_gtr;
    params.dbscan = {cfg.dbscan_eps, cfg.dbscan_nmin};
    params.m_th = cfg.m_th;
    params.e_th = cfg.e_th;
    const auto g = graph::build_graph(segments, params, cfg.roi.center());
    write_file(output, graph::to_geojson(g));
    std::cout << "build-graph: " << g.nodes.size() << " nodes, "
              << g.edges.size() << " edges\n";
    return kExitOk;
}

int cmd_refine_graph(const CommonOpts& common, std::string graph_path,
                     const std::string& edits_path, std::string output) {
    const auto cfg = resolve_config(common);
    graph_path = resolve_path(graph_path, cfg.path_graph, "graph");
    output = resolve_path(output, cfg.path_output, "output");
    const auto g = graph::from_geojson(read_file(graph_path));
    const auto edits = graph::parse_edit_script(read_file(edits_path));
    const auto refined = graph::refine_graph(g, edits);
    write_file(output, graph::to_geojson(refined));
    std::cout << "refine-graph: " << refined.nodes.size() << " nodes, "
              << refined.edges.size() << " edges\n";
    return kExitOk;
}

int cmd_associate(const CommonOpts& common, std::string input,
                  std::string graph_path, std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    graph_path = resolve_path(graph_path, cfg.path_graph, "graph");
    output = resolve_path(output, cfg.path_output, "output");
    const auto g = graph::from_geojson(read_file(graph_path));
    auto segments = load_segments(input, cfg, cfg.tau);
    graph::GtaParams params{cfg.d_max, cfg.rdp_eps_gta};
    std::vector<ais::AisRecord> labeled;
    for (auto& seg : segments) {
        const auto labels = graph::associate(seg, g, params);
        for (std::size_t i = 0; i < seg.records.size(); ++i) {
            seg.records[i].edge = labels[i];
            labeled.push_back(seg.records[i]);
        }
    }
    std::ostringstream out;
    ais::write_csv(out, labeled, /*with_edge=*/true);
    write_file(output, out.str());
    std::cout << "associate: " << labeled.size() << " records labeled\n";
    return kExitOk;
}

nn::TrainConfig train_config(const PipelineConfig& cfg) {
    nn::TrainConfig tc;
    tc.lr = cfg.lr;
    tc.batch = cfg.batch;
    tc.epochs = cfg.epochs;
    tc.lambda = cfg.lambda;
    tc.seed = cfg.seed;
    tc.patience = cfg.patience;
    return tc;
}

// split a labeled sample set by vessel assignment
feat::SampleSet take_split(const feat::SampleSet& set,
                           const std::vector<std::int64_t>& mmsis,
                           const std::vector<int>& assign, int which) {
    feat::SampleSet out;
    out.T = set.T;
    out.n_in = set.n_in;
    out.L = set.L;
    out.n_out = set.n_out;
    const std::size_t in_sz = set.T * set.n_in;
    const std::size_t tg_sz = set.L * set.n_out;
    for (std::size_t i = 0; i < set.count; ++i) {
        int a = 2;
        for (std::size_t m = 0; m < mmsis.size(); ++m) {
            if (mmsis[m] == set.sample_mmsi[i]) {
                a = assign[m];
                break;
            }
        }
        if (a != which) continue;
        out.inputs.insert(out.inputs.end(), set.inputs.begin() + i * in_sz,
                          set.inputs.begin() + (i + 1) * in_sz);
        if (!set.targets.empty()) {
            out.targets.insert(out.targets.end(), set.targets.begin() + i * tg_sz,
                               set.targets.begin() + (i + 1) * tg_sz);
        }
        if (!set.labels.empty()) out.labels.push_back(set.labels[i]);
        out.sample_mmsi.push_back(set.sample_mmsi[i]);
        ++out.count;
    }
    return out;
}

std::vector<std::int64_t> unique_mmsis(const feat::SampleSet& set) {
    std::vector<std::int64_t> mmsis(set.sample_mmsi);
    std::sort(mmsis.begin(), mmsis.end());
    mmsis.erase(std::unique(mmsis.begin(), mmsis.end()), mmsis.end());
    return mmsis;
}

int cmd_train_regressor(const CommonOpts& common, std::string input,
                        std::string graph_path, std::string output,
                        const std::string& head) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    graph_path = resolve_path(graph_path, cfg.path_graph, "graph");
    output = resolve_path(output, cfg.path_model, "output");
    const auto g = graph::from_geojson(read_file(graph_path));
    const auto segments = load_segments(input, cfg, cfg.tau);
    const auto fspec = feature_spec(cfg, &g);
    auto set = feat::make_regression_samples(segments, cfg.T, cfg.L, fspec);
    if (set.count == 0) throw std::runtime_error("train-regressor: no samples");

    const auto mmsis = unique_mmsis(set);
    const auto assign =
        feat::split_mmsi(mmsis, cfg.train_frac, cfg.val_frac, cfg.seed);
    const auto train_set = take_split(set, mmsis, assign, 0);
    const auto val_set = take_split(set, mmsis, assign, 1);

    nn::RegressorSpec spec;
    spec.n_in = fspec.regression_width();
    spec.n_out = 4;
    spec.hidden = cfg.hidden;
    spec.dropout = cfg.dropout;
    spec.T = cfg.T;
    spec.L = cfg.L;
    spec.head = head == "mc" ? nn::RegressorSpec::Head::MeanSigma
                             : nn::RegressorSpec::Head::Evidential;

    const auto result = nn::train_regressor(spec, train_set.reg_view(),
                                            val_set.reg_view(), train_config(cfg));
    write_file(output, nn::save_regressor_checkpoint(spec, result.weights));
    std::cout << "train-regressor: " << train_set.count << " train / "
              << val_set.count << " val samples, " << result.train_loss.size()
              << " epochs, final val loss "
              << (result.val_loss.empty() ? 0.0 : result.val_loss.back()) << "\n";
    return kExitOk;
}

int cmd_train_classifier(const CommonOpts& common, const std::string& task,
                         std::string input, std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    output = resolve_path(output, cfg.path_model, "output");
    feat::SampleSet set;
    nn::ClassifierSpec spec;
    if (task == "ut") {
        const auto segments = load_segments(input, cfg, cfg.ut_tau);
        set = feat::make_ut_samples(segments, cfg.ut_T, cfg.theta_ut);
        spec.T = cfg.ut_T;
        spec.n_in = 1;
        spec.hidden_layers = cfg.ut_hidden_layers;
    } else {  // oos: raw, unresampled pairs
        ais::IngestReport report;
        const auto records = load_records(input, cfg, report);
        const auto tracks = ais::group_tracks(records, report);
        set = feat::make_oos_samples(tracks, cfg.theta_oos, feature_spec(cfg, nullptr));
        spec.T = 2;
        spec.n_in = 5;
        spec.hidden_layers = cfg.oos_hidden_layers;
    }
    spec.hidden = cfg.hidden;
    spec.k = 2;

    set = feat::balance_classes(set, cfg.seed);
    const auto mmsis = unique_mmsis(set);
    const auto assign =
        feat::split_mmsi(mmsis, cfg.train_frac, cfg.val_frac, cfg.seed);
    const auto train_set = take_split(set, mmsis, assign, 0);
    const auto val_set = take_split(set, mmsis, assign, 1);
    if (train_set.count == 0) {
        throw std::runtime_error("train-classifier: empty training split");
    }

    const auto result = nn::train_classifier(spec, train_set.cls_view(),
                                             val_set.cls_view(), train_config(cfg));
    write_file(output, nn::save_classifier_checkpoint(spec, result.weights));
    std::cout << "train-classifier " << task << ": " << train_set.count
              << " train / " << val_set.count << " val samples, "
              << result.train_loss.size() << " epochs\n";
    return kExitOk;
}

std::vector<std::size_t> at_feature_indices(const std::string& names) {
    std::vector<std::size_t> idx;
    std::istringstream in(names);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok == "lon") idx.push_back(0);
        else if (tok == "lat") idx.push_back(1);
        else if (tok == "cog") idx.push_back(2);
        else if (tok == "sog") idx.push_back(3);
        else throw UsageError("unknown AT feature: " + tok);
    }
    if (idx.empty()) throw UsageError("empty AT feature subset");
    return idx;
}

int cmd_detect_at(const CommonOpts& common, std::string input,
                  std::string graph_path, std::string model_path,
                  std::string output, const std::string& geojson_path,
                  const std::string& features, double theta_at_flag) {
    auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    graph_path = resolve_path(graph_path, cfg.path_graph, "graph");
    model_path = resolve_path(model_path, cfg.path_model, "model");
    output = resolve_path(output, cfg.path_output, "output");
    if (theta_at_flag > 0.0) cfg.theta_at = theta_at_flag;
    const auto g = graph::from_geojson(read_file(graph_path));
    auto [spec, weights] = nn::load_regressor_checkpoint(read_file(model_path));

    const auto fspec = feature_spec(cfg, &g);
    if (spec.n_in != fspec.regression_width()) {
        throw std::runtime_error(
            "detect at: model input width does not match the graph feature "
            "layout");
    }
    const auto segments = load_segments(input, cfg, cfg.tau);
    const auto feat_idx = at_feature_indices(features);

    det::DetectionThresholds th;
    th.theta_at = cfg.theta_at;
    th.n_windows = cfg.at_n;
    const bool mc = spec.head == nn::RegressorSpec::Head::MeanSigma;
    th.kind = mc ? det::UncertaintyKind::Aleatoric : det::UncertaintyKind::Epistemic;

    nn::Rng mc_rng(cfg.seed);
    std::vector<det::AtVerdict> verdicts;
    std::vector<double> window(spec.T * spec.n_in);
    for (const auto& seg : segments) {
        auto predictor = [&](std::size_t first) {
            feat::write_regression_window(seg, first, spec.T, fspec, window.data());
            std::vector<double> unc;
            if (mc) {
                const auto pred = nn::mc_dropout_predict(window, spec, weights,
                                                         cfg.mc_passes, mc_rng);
                for (std::size_t f : feat_idx) unc.push_back(pred.aleatoric[f]);
            } else {
                const auto out =
                    nn::regressor_forward(window, spec, weights, nn::Mode::Eval);
                for (std::size_t f : feat_idx) {
                    unc.push_back(evid::nig_uncertainties(out.nig[f]).epistemic);
                }
            }
            return unc;
        };
        auto seg_verdicts =
            det::scan_segment_at(seg.records.size(), spec.T, th, predictor);
        for (auto& v : seg_verdicts) {
            v.mmsi = seg.mmsi;
            v.start_time = seg.records[v.first_point].time;
            verdicts.push_back(std::move(v));
        }
    }
    write_file(output, det::verdicts_to_csv(verdicts));
    if (!geojson_path.empty()) {
        write_file(geojson_path, det::verdicts_to_geojson(verdicts, segments));
    }
    std::size_t flagged = 0;
    for (const auto& v : verdicts) flagged += v.anomalous;
    std::cout << "detect at: " << verdicts.size() << " chunks, " << flagged
              << " anomalous (theta_at=" << cfg.theta_at << ")\n";
    return kExitOk;
}

int cmd_detect_ut(const CommonOpts& common, std::string input,
                  std::string model_path, std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    model_path = resolve_path(model_path, cfg.path_model, "model");
    output = resolve_path(output, cfg.path_output, "output");
    auto [spec, weights] = nn::load_classifier_checkpoint(read_file(model_path));
    if (spec.n_in != 1) {
        throw std::runtime_error("detect ut: model is not a cog-window classifier");
    }
    const auto segments = load_segments(input, cfg, cfg.ut_tau);

    std::string csv = "mmsi,start_time,end_time,windows\n";
    std::size_t total_runs = 0;
    std::vector<double> window(spec.T);
    for (const auto& seg : segments) {
        if (seg.records.size() < spec.T) continue;
        std::vector<bool> flags;
        for (std::size_t w = 0; w + spec.T <= seg.records.size(); ++w) {
            for (std::size_t t = 0; t < spec.T; ++t) {
                window[t] = seg.records[w + t].cog / 360.0;
            }
            const auto d = nn::classifier_forward(window, spec, weights);
            const auto verdict = det::classify_with_rejection(d, cfg.u_th);
            flags.push_back(verdict.accepted && verdict.predicted == 1);
        }
        for (const auto& [a, b] : det::merge_ut_runs(flags)) {
            csv += std::to_string(seg.mmsi) + ',' +
                   std::to_string(seg.records[a].time) + ',' +
                   std::to_string(seg.records[b + spec.T - 1].time) + ',' +
                   std::to_string(b - a + 1) + '\n';
            ++total_runs;
        }
    }
    write_file(output, csv);
    std::cout << "detect ut: " << total_runs << " anomalous runs (u_th="
              << cfg.u_th << ")\n";
    return kExitOk;
}

int cmd_detect_oos(const CommonOpts& common, std::string input,
                   std::string model_path, std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    model_path = resolve_path(model_path, cfg.path_model, "model");
    output = resolve_path(output, cfg.path_output, "output");
    auto [spec, weights] = nn::load_classifier_checkpoint(read_file(model_path));
    if (spec.T != 2 || spec.n_in != 5) {
        throw std::runtime_error("detect oos: model is not a pair classifier");
    }
    ais::IngestReport report;
    const auto records = load_records(input, cfg, report);
    const auto tracks = ais::group_tracks(records, report);
    const auto fspec = feature_spec(cfg, nullptr);
    const auto set = feat::make_oos_samples(tracks, cfg.theta_oos, fspec);

    std::string csv = "mmsi,time_before,time_after,delta_s,flag\n";
    std::size_t flagged = 0;
    std::size_t cursor = 0;
    std::vector<double> window(10);
    for (const auto& t : tracks) {
        for (std::size_t k = 0; k + 1 < t.records.size(); ++k, ++cursor) {
            std::copy(set.inputs.begin() + cursor * 10,
                      set.inputs.begin() + (cursor + 1) * 10, window.begin());
            const auto d = nn::classifier_forward(window, spec, weights);
            const auto verdict = det::classify_with_rejection(d, cfg.u_th);
            const bool anomalous = verdict.accepted && verdict.predicted == 1;
            if (anomalous) {
                csv += std::to_string(t.mmsi) + ',' +
                       std::to_string(t.records[k].time) + ',' +
                       std::to_string(t.records[k + 1].time) + ',' +
                       std::to_string(t.records[k + 1].time - t.records[k].time) +
                       ",1\n";
                ++flagged;
            }
        }
    }
    write_file(output, csv);
    std::cout << "detect oos: " << flagged << " pairs flagged (u_th=" << cfg.u_th
              << ")\n";
    return kExitOk;
}

int cmd_baseline_similarity(const CommonOpts& common, std::string input,
                            std::string graph_path, std::string output) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    graph_path = resolve_path(graph_path, cfg.path_graph, "graph");
    output = resolve_path(output, cfg.path_output, "output");
    const auto g = graph::from_geojson(read_file(graph_path));
    const auto routes = sim::enumerate_routes(g);

    ais::IngestReport report;
    const auto records = load_records(input, cfg, report);
    const auto tracks = ais::group_tracks(records, report);

    sim::SimilarityParams params;
    params.rdp_eps = cfg.rdp_eps_gtr;
    params.d_max = cfg.d_max;
    params.s_at = cfg.s_at;

    std::string csv = "mmsi,segment_start_time,min_norm_uncertainty,threshold,flag\n";
    std::size_t flagged = 0;
    for (const auto& t : tracks) {
        if (t.records.empty()) continue;
        const auto v = sim::similarity_score(t, routes, g, params);
        csv += std::to_string(t.mmsi) + ',' + std::to_string(t.records[0].time) +
               ',' + std::to_string(v.score) + ',' + std::to_string(params.s_at) +
               ',' + (v.anomalous ? "1" : "0") + '\n';
        flagged += v.anomalous;
    }
    write_file(output, csv);
    std::cout << "baseline-similarity: " << tracks.size() << " tracks, "
              << flagged << " anomalous (s_at=" << cfg.s_at << ")\n";
    return kExitOk;
}

struct EvalResult {
    double accuracy_all = std::numeric_limits<double>::quiet_NaN();
    double accuracy_anomalous = std::numeric_limits<double>::quiet_NaN();
    std::size_t accepted = 0;
    std::size_t confusion[2][2] = {{0, 0}, {0, 0}};  // [truth][pred]
};

EvalResult eval_at_threshold(const feat::SampleSet& set,
                             const nn::ClassifierSpec& spec,
                             const nn::WeightStore& weights, double u_th) {
    EvalResult r;
    std::size_t correct = 0, anomalous_total = 0, anomalous_correct = 0;
    std::vector<double> window(set.T * set.n_in);
    for (std::size_t i = 0; i < set.count; ++i) {
        std::copy(set.inputs.begin() + i * window.size(),
                  set.inputs.begin() + (i + 1) * window.size(), window.begin());
        const auto d = nn::classifier_forward(window, spec, weights);
        const auto verdict = det::classify_with_rejection(d, u_th);
        if (!verdict.accepted) continue;
        ++r.accepted;
        const int truth = set.labels[i];
        const int pred = static_cast<int>(verdict.predicted);
        ++r.confusion[truth][pred];
        if (pred == truth) ++correct;
        if (truth == 1) {
            ++anomalous_total;
            if (pred == 1) ++anomalous_correct;
        }
    }
    if (r.accepted > 0) {
        r.accuracy_all = static_cast<double>(correct) / r.accepted;
    }
    if (anomalous_total > 0) {
        r.accuracy_anomalous =
            static_cast<double>(anomalous_correct) / anomalous_total;
    }
    return r;
}

int cmd_eval(const CommonOpts& common, const std::string& task,
             std::string input, std::string model_path,
             const std::string& metrics_path) {
    const auto cfg = resolve_config(common);
    input = resolve_path(input, cfg.path_input, "input");
    model_path = resolve_path(model_path, cfg.path_model, "model");
    auto [spec, weights] = nn::load_classifier_checkpoint(read_file(model_path));

    feat::SampleSet set;
    if (task == "ut") {
        const auto segments = load_segments(input, cfg, cfg.ut_tau);
        set = feat::make_ut_samples(segments, cfg.ut_T, cfg.theta_ut);
    } else {
        ais::IngestReport report;
        const auto records = load_records(input, cfg, report);
        const auto tracks = ais::group_tracks(records, report);
        set = feat::make_oos_samples(tracks, cfg.theta_oos, feature_spec(cfg, nullptr));
    }
    set = feat::balance_classes(set, cfg.seed);

    // evaluate the held-out vessels only
    const auto mmsis = unique_mmsis(set);
    const auto assign =
        feat::split_mmsi(mmsis, cfg.train_frac, cfg.val_frac, cfg.seed);
    const auto test_set = take_split(set, mmsis, assign, 2);
    if (test_set.count == 0) throw std::runtime_error("eval: empty test split");

    const auto at_uth = eval_at_threshold(test_set, spec, weights, cfg.u_th);
    std::cout << "eval " << task << ": " << test_set.count << " test samples\n";
    std::cout << "accuracy @ u_th=" << cfg.u_th << ": " << at_uth.accuracy_all
              << " (accepted " << at_uth.accepted << "/" << test_set.count
              << ")\n";
    std::cout << "confusion [truth x pred]: normal->(" << at_uth.confusion[0][0]
              << "," << at_uth.confusion[0][1] << ") anomalous->("
              << at_uth.confusion[1][0] << "," << at_uth.confusion[1][1] << ")\n";

    std::string csv = "u_th,accuracy_all,accuracy_anomalous\n";
    std::cout << "u_th sweep:\n";
    for (int step = 1; step <= 20; ++step) {
        const double u = 0.05 * step;
        const auto r = eval_at_threshold(test_set, spec, weights, u);
        std::ostringstream line;
        line << u << ',' << r.accuracy_all << ',' << r.accuracy_anomalous;
        csv += line.str() + '\n';
        std::cout << "  " << line.str() << "\n";
    }
    if (!metrics_path.empty()) write_file(metrics_path, csv);
    return kExitOk;
}

int cmd_export_plot(const CommonOpts& common, const std::string& graph_path,
                    const std::string& tracks_path,
                    const std::string& verdicts_geojson, std::string output) {
    const auto cfg = resolve_config(common);
    output = resolve_path(output, cfg.path_output, "output");
    nlohmann::json fc;
    fc["type"] = "FeatureCollection";
    auto& features = fc["features"] = nlohmann::json::array();

    if (!graph_path.empty()) {
        auto gj = nlohmann::json::parse(read_file(graph_path));
        for (auto& f : gj.at("features")) features.push_back(f);
    }
    if (!tracks_path.empty()) {
        const auto segments = load_segments(tracks_path, cfg, cfg.tau);
        for (const auto& seg : segments) {
            nlohmann::json coords = nlohmann::json::array();
            for (const auto& r : seg.records) coords.push_back({r.lon, r.lat});
            nlohmann::json f;
            f["type"] = "Feature";
            f["geometry"] = {{"type", "LineString"},
                             {"coordinates", std::move(coords)}};
            f["properties"] = {{"mmsi", seg.mmsi}, {"kind", "track"}};
            features.push_back(std::move(f));
        }
    }
    if (!verdicts_geojson.empty()) {
        auto vj = nlohmann::json::parse(read_file(verdicts_geojson));
        for (auto& f : vj.at("features")) features.push_back(f);
    }
    write_file(output, fc.dump(2) + "\n");
    std::cout << "export-plot: " << features.size() << " features\n";
    return kExitOk;
}

void require_exists(const std::string& path) {
    if (!path.empty() && !std::filesystem::exists(path)) {
        throw UsageError("missing input: " + path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIS traffic-lane graph extraction and evidential anomaly detection"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string input, output, report, graph_path, model_path, edits_path;
    std::string labels, geojson_path, head = "evidential", metrics_path;
    std::string tracks_path, verdicts_geojson;
    std::string at_features = "lon,lat";
    double theta_at_flag = 0.0;
    SynthOpts synth_opts;

    auto* ingest = app.add_subcommand("ingest", "parse, validate and filter AIS CSV");
    add_common(ingest, common);
    ingest->add_option("--input", input);
    ingest->add_option("--output", output);
    ingest->add_option("--report", report, "rejection report CSV");

    auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic world");
    add_common(synth_cmd, common);
    synth_cmd->add_option("--output", synth_opts.output);
    synth_cmd->add_option("--labels", synth_opts.labels, "ground-truth CSV");
    synth_cmd->add_option("--tau", synth_opts.tau, "report cadence override");
    synth_cmd->add_option("--offset-tracks", synth_opts.offset_tracks);
    synth_cmd->add_option("--offset-m", synth_opts.offset_m);
    synth_cmd->add_option("--turn-tracks", synth_opts.turn_tracks);
    synth_cmd->add_option("--turn-deg", synth_opts.turn_deg);
    synth_cmd->add_option("--turn-duration-s", synth_opts.turn_duration_s);
    synth_cmd->add_option("--gap-tracks", synth_opts.gap_tracks);
    synth_cmd->add_option("--gap-s", synth_opts.gap_s);

    auto* build = app.add_subcommand("build-graph", "extract the lane graph");
    add_common(build, common);
    build->add_option("--input", input);
    build->add_option("--output", output);

    auto* refine = app.add_subcommand("refine-graph", "apply a manual edit script");
    add_common(refine, common);
    refine->add_option("--graph", graph_path);
    refine->add_option("--edits", edits_path)->required();
    refine->add_option("--output", output);

    auto* assoc = app.add_subcommand("associate", "label records with lane edges");
    add_common(assoc, common);
    assoc->add_option("--input", input);
    assoc->add_option("--graph", graph_path);
    assoc->add_option("--output", output);

    auto* train_reg = app.add_subcommand("train-regressor",
                                         "train the sequence regressor");
    add_common(train_reg, common);
    train_reg->add_option("--input", input);
    train_reg->add_option("--graph", graph_path);
    train_reg->add_option("--output", output);
    train_reg->add_option("--head", head, "evidential | mc");

    auto* train_cls = app.add_subcommand("train-classifier",
                                         "train the ut or oos classifier");
    add_common(train_cls, common);
    std::string task;
    train_cls->add_option("task", task, "ut | oos")->required();
    train_cls->add_option("--input", input);
    train_cls->add_option("--output", output);

    auto* detect = app.add_subcommand("detect", "run a detector");
    add_common(detect, common);
    std::string detect_kind;
    detect->add_option("kind", detect_kind, "at | ut | oos")->required();
    detect->add_option("--input", input);
    detect->add_option("--model", model_path);
    detect->add_option("--graph", graph_path, "lane graph (at only)");
    detect->add_option("--output", output);
    detect->add_option("--geojson", geojson_path, "flagged sub-tracks (at only)");
    detect->add_option("--at-features", at_features, "subset for the at criterion");
    detect->add_option("--theta-at", theta_at_flag, "override theta_at");

    auto* baseline = app.add_subcommand("baseline-similarity",
                                        "route-similarity anomaly baseline");
    add_common(baseline, common);
    baseline->add_option("--input", input);
    baseline->add_option("--graph", graph_path);
    baseline->add_option("--output", output);

    auto* eval = app.add_subcommand("eval", "classifier accuracy and u_th sweep");
    add_common(eval, common);
    std::string eval_task;
    eval->add_option("task", eval_task, "ut | oos")->required();
    eval->add_option("--input", input);
    eval->add_option("--model", model_path);
    eval->add_option("--metrics", metrics_path, "metrics CSV output");

    auto* plot = app.add_subcommand("export-plot", "merge artifacts into GeoJSON");
    add_common(plot, common);
    plot->add_option("--graph", graph_path);
    plot->add_option("--tracks", tracks_path);
    plot->add_option("--verdicts-geojson", verdicts_geojson);
    plot->add_option("--output", output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        for (const auto& p : {common.config_path, input, graph_path, model_path,
                              edits_path, tracks_path, verdicts_geojson}) {
            require_exists(p);
        }
        if (ingest->parsed()) return cmd_ingest(common, input, output, report);
        if (synth_cmd->parsed()) return cmd_synth(common, synth_opts);
        if (build->parsed()) return cmd_build_graph(common, input, output);
        if (refine->parsed()) {
            return cmd_refine_graph(common, graph_path, edits_path, output);
        }
        if (assoc->parsed()) return cmd_associate(common, input, graph_path, output);
        if (train_reg->parsed()) {
            if (head != "evidential" && head != "mc") {
                throw UsageError("--head must be evidential or mc");
            }
            return cmd_train_regressor(common, input, graph_path, output, head);
        }
        if (train_cls->parsed()) {
            if (task != "ut" && task != "oos") {
                throw UsageError("task must be ut or oos");
            }
            return cmd_train_classifier(common, task, input, output);
        }
        if (detect->parsed()) {
            if (detect_kind == "at") {
                if (graph_path.empty()) throw UsageError("detect at needs --graph");
                return cmd_detect_at(common, input, graph_path, model_path, output,
                                     geojson_path, at_features, theta_at_flag);
            }
            if (detect_kind == "ut") {
                return cmd_detect_ut(common, input, model_path, output);
            }
            if (detect_kind == "oos") {
                return cmd_detect_oos(common, input, model_path, output);
            }
            throw UsageError("detect kind must be at, ut or oos");
        }
        if (baseline->parsed()) {
            return cmd_baseline_similarity(common, input, graph_path, output);
        }
        if (eval->parsed()) {
            if (eval_task != "ut" && eval_task != "oos") {
                throw UsageError("task must be ut or oos");
            }
            return cmd_eval(common, eval_task, input, model_path, metrics_path);
        }
        if (plot->parsed()) {
            return cmd_export_plot(common, graph_path, tracks_path,
                                   verdicts_geojson, output);
        }
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}
