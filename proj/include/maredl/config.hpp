#pragma once

#include <cstdint>
#include <string>

#include "maredl/ais.hpp"

namespace maredl {

// Every pipeline tunable as plain key=value lines, '#' comments. Unknown
// keys are rejected and values are range-checked at parse time.
struct PipelineConfig {
    ais::Roi roi{{11.5, 54.2}, {12.5, 54.5}};
    std::int64_t tau = 60;       // resample cadence, seconds
    std::int64_t max_gap = 3600; // split threshold, seconds
    double rdp_eps_gtr = 1000.0;
    double rdp_eps_gta = 500.0;
    double dbscan_eps = 20.0;
    int dbscan_nmin = 1500;
    double m_th = 9.2;
    double e_th = 0.3;
    double d_max = 7000.0;
    std::size_t T = 10;
    std::size_t L = 1;
    double lambda = 0.01;
    double theta_at = 0.4;
    double theta_ut = 30.0;
    double theta_oos = 180.0;  // seconds (3 minutes)
    double u_th = 0.4;
    double s_at = 0.3;
    std::uint64_t seed = 1;

    // model/training
    std::size_t hidden = 128;
    double dropout = 0.1;
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t epochs = 50;
    std::size_t patience = 5;
    bool use_edge_feature = true;
    std::size_t at_n = 30;  // windows per detection chunk
    std::size_t mc_passes = 50;
    std::size_t ut_T = 60;
    std::int64_t ut_tau = 3;
    std::size_t ut_hidden_layers = 3;
    std::size_t oos_hidden_layers = 1;
    double train_frac = 0.5;
    double val_frac = 0.1;

    // synthetic world
    std::size_t synth_tracks_per_lane = 100;
    double synth_noise_m = 50.0;
    double synth_cog_noise_deg = 0.0;
    double synth_sog = 10.0;

    // default artifact paths, overridable per command
    std::string path_input;
    std::string path_output;
    std::string path_graph;
    std::string path_model;
    std::string path_report;
    std::string path_labels;

    void validate() const;
};

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig parse_config_file(const std::string& path);

// Applies one key=value override (same keys as the file).
void apply_config_override(PipelineConfig& cfg, const std::string& key,
                           const std::string& value);

// Effective config, round-trippable through parse_config_text.
std::string dump_config(const PipelineConfig& cfg);

}  // namespace maredl
