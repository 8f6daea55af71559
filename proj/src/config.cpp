#include "maredl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace maredl {

namespace {

double to_double(const std::string& v) {
    double out{};
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || !std::isfinite(out)) {
        throw std::invalid_argument("config: bad number '" + v + "'");
    }
    return out;
}

std::int64_t to_i64(const std::string& v) {
    std::int64_t out{};
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) {
        throw std::invalid_argument("config: bad integer '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t out{};
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) {
        throw std::invalid_argument("config: bad unsigned integer '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad bool '" + v + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"roi",
         [](PipelineConfig& c, const std::string& v) {
             std::istringstream in(v);
             char sep{};
             if (!(in >> c.roi.min.lon >> sep >> c.roi.min.lat >> sep >>
                   c.roi.max.lon >> sep >> c.roi.max.lat)) {
                 throw std::invalid_argument(
                     "config: roi expects lon_min,lat_min,lon_max,lat_max");
             }
         }},
        {"tau", [](PipelineConfig& c, const std::string& v) { c.tau = to_i64(v); }},
        {"max_gap",
         [](PipelineConfig& c, const std::string& v) { c.max_gap = to_i64(v); }},
        {"rdp_eps_gtr",
         [](PipelineConfig& c, const std::string& v) { c.rdp_eps_gtr = to_double(v); }},
        {"rdp_eps_gta",
         [](PipelineConfig& c, const std::string& v) { c.rdp_eps_gta = to_double(v); }},
        {"dbscan_eps",
         [](PipelineConfig& c, const std::string& v) { c.dbscan_eps = to_double(v); }},
        {"dbscan_nmin",
         [](PipelineConfig& c, const std::string& v) {
             c.dbscan_nmin = static_cast<int>(to_i64(v));
         }},
        {"m_th", [](PipelineConfig& c, const std::string& v) { c.m_th = to_double(v); }},
        {"e_th", [](PipelineConfig& c, const std::string& v) { c.e_th = to_double(v); }},
        {"d_max",
         [](PipelineConfig& c, const std::string& v) { c.d_max = to_double(v); }},
        {"T",
         [](PipelineConfig& c, const std::string& v) {
             c.T = static_cast<std::size_t>(to_u64(v));
         }},
        {"L",
         [](PipelineConfig& c, const std::string& v) {
             c.L = static_cast<std::size_t>(to_u64(v));
         }},
        {"lambda",
         [](PipelineConfig& c, const std::string& v) { c.lambda = to_double(v); }},
        {"theta_at",
         [](PipelineConfig& c, const std::string& v) { c.theta_at = to_double(v); }},
        {"theta_ut",
         [](PipelineConfig& c, const std::string& v) { c.theta_ut = to_double(v); }},
        {"theta_oos",
         [](PipelineConfig& c, const std::string& v) { c.theta_oos = to_double(v); }},
        {"u_th", [](PipelineConfig& c, const std::string& v) { c.u_th = to_double(v); }},
        {"s_at", [](PipelineConfig& c, const std::string& v) { c.s_at = to_double(v); }},
        {"seed", [](PipelineConfig& c, const std::string& v) { c.seed = to_u64(v); }},
        {"hidden",
         [](PipelineConfig& c, const std::string& v) {
             c.hidden = static_cast<std::size_t>(to_u64(v));
         }},
        {"dropout",
         [](PipelineConfig& c, const std::string& v) { c.dropout = to_double(v); }},
        {"lr", [](PipelineConfig& c, const std::string& v) { c.lr = to_double(v); }},
        {"batch",
         [](PipelineConfig& c, const std::string& v) {
             c.batch = static_cast<std::size_t>(to_u64(v));
         }},
        {"epochs",
         [](PipelineConfig& c, const std::string& v) {
             c.epochs = static_cast<std::size_t>(to_u64(v));
         }},
        {"patience",
         [](PipelineConfig& c, const std::string& v) {
             c.patience = static_cast<std::size_t>(to_u64(v));
         }},
        {"use_edge_feature",
         [](PipelineConfig& c, const std::string& v) { c.use_edge_feature = to_bool(v); }},
        {"at_n",
         [](PipelineConfig& c, const std::string& v) {
             c.at_n = static_cast<std::size_t>(to_u64(v));
         }},
        {"mc_passes",
         [](PipelineConfig& c, const std::string& v) {
             c.mc_passes = static_cast<std::size_t>(to_u64(v));
         }},
        {"ut_T",
         [](PipelineConfig& c, const std::string& v) {
             c.ut_T = static_cast<std::size_t>(to_u64(v));
         }},
        {"ut_tau",
         [](PipelineConfig& c, const std::string& v) { c.ut_tau = to_i64(v); }},
        {"ut_hidden_layers",
         [](PipelineConfig& c, const std::string& v) {
             c.ut_hidden_layers = static_cast<std::size_t>(to_u64(v));
         }},
        {"oos_hidden_layers",
         [](PipelineConfig& c, const std::string& v) {
             c.oos_hidden_layers = static_cast<std::size_t>(to_u64(v));
         }},
        {"train_frac",
         [](PipelineConfig& c, const std::string& v) { c.train_frac = to_double(v); }},
        {"val_frac",
         [](PipelineConfig& c, const std::string& v) { c.val_frac = to_double(v); }},
        {"synth_tracks_per_lane",
         [](PipelineConfig& c, const std::string& v) {
             c.synth_tracks_per_lane = static_cast<std::size_t>(to_u64(v));
         }},
        {"synth_noise_m",
         [](PipelineConfig& c, const std::string& v) { c.synth_noise_m = to_double(v); }},
        {"synth_cog_noise_deg",
         [](PipelineConfig& c, const std::string& v) {
             c.synth_cog_noise_deg = to_double(v);
         }},
        {"synth_sog",
         [](PipelineConfig& c, const std::string& v) { c.synth_sog = to_double(v); }},
        {"path_input",
         [](PipelineConfig& c, const std::string& v) { c.path_input = v; }},
        {"path_output",
         [](PipelineConfig& c, const std::string& v) { c.path_output = v; }},
        {"path_graph",
         [](PipelineConfig& c, const std::string& v) { c.path_graph = v; }},
        {"path_model",
         [](PipelineConfig& c, const std::string& v) { c.path_model = v; }},
        {"path_report",
         [](PipelineConfig& c, const std::string& v) { c.path_report = v; }},
        {"path_labels",
         [](PipelineConfig& c, const std::string& v) { c.path_labels = v; }},
    };
    return table;
}

}  // namespace

void PipelineConfig::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("config: " + what);
    };
    if (!(roi.min.lon < roi.max.lon) || !(roi.min.lat < roi.max.lat)) {
        fail("roi min must be < max per axis");
    }
    if (tau <= 0 || max_gap <= 0) fail("tau and max_gap must be > 0");
    if (!(rdp_eps_gtr >= 0.0) || !(rdp_eps_gta >= 0.0)) fail("rdp eps must be >= 0");
    if (!(dbscan_eps > 0.0) || dbscan_nmin < 1) fail("dbscan params out of range");
    if (!(m_th > 0.0) || !(e_th >= 0.0) || e_th >= 1.0) fail("m_th/e_th out of range");
    if (!(d_max > 0.0)) fail("d_max must be > 0");
    if (T < 1 || L < 1 || ut_T < 1) fail("T and L must be >= 1");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(theta_at > 0.0) || theta_at > 1.0) fail("theta_at must be in (0, 1]");
    if (!(theta_ut >= 0.0) || !(theta_oos >= 0.0)) fail("theta_ut/theta_oos < 0");
    if (!(u_th >= 0.0) || u_th > 1.0) fail("u_th must be in [0, 1]");
    if (!(s_at >= 0.0) || s_at > 1.0) fail("s_at must be in [0, 1]");
    if (hidden < 1 || batch < 1 || epochs < 1) fail("training sizes must be >= 1");
    if (!(lr > 0.0)) fail("lr must be > 0");
    if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
    if (at_n < 2) fail("at_n must be >= 2");
    if (mc_passes < 2) fail("mc_passes must be >= 2");
    if (ut_tau <= 0) fail("ut_tau must be > 0");
    if (ut_hidden_layers < 1 || oos_hidden_layers < 1) fail("hidden layers >= 1");
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0) {
        fail("train/val fractions out of range");
    }
    if (!(synth_sog > 0.0) || synth_noise_m < 0.0 || synth_cog_noise_deg < 0.0) {
        fail("synth params out of range");
    }
}

void apply_config_override(PipelineConfig& cfg, const std::string& key,
                           const std::string& value) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    it->second(cfg, value);
}

PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_override(cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

// shortest round-trip representation, locale-free
struct NumFmt {
    double v;
};
std::ostream& operator<<(std::ostream& os, NumFmt f) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), f.v);
    return os.write(buf, p - buf);
}

}  // namespace

std::string dump_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "roi=" << NumFmt{cfg.roi.min.lon} << ',' << NumFmt{cfg.roi.min.lat}
        << ',' << NumFmt{cfg.roi.max.lon} << ',' << NumFmt{cfg.roi.max.lat} << '\n';
    out << "tau=" << cfg.tau << '\n';
    out << "max_gap=" << cfg.max_gap << '\n';
    out << "rdp_eps_gtr=" << NumFmt{cfg.rdp_eps_gtr} << '\n';
    out << "rdp_eps_gta=" << NumFmt{cfg.rdp_eps_gta} << '\n';
    out << "dbscan_eps=" << NumFmt{cfg.dbscan_eps} << '\n';
    out << "dbscan_nmin=" << cfg.dbscan_nmin << '\n';
    out << "m_th=" << NumFmt{cfg.m_th} << '\n';
    out << "e_th=" << NumFmt{cfg.e_th} << '\n';
    out << "d_max=" << NumFmt{cfg.d_max} << '\n';
    out << "T=" << cfg.T << '\n';
    out << "L=" << cfg.L << '\n';
    out << "lambda=" << NumFmt{cfg.lambda} << '\n';
    out << "theta_at=" << NumFmt{cfg.theta_at} << '\n';
    out << "theta_ut=" << NumFmt{cfg.theta_ut} << '\n';
    out << "theta_oos=" << NumFmt{cfg.theta_oos} << '\n';
    out << "u_th=" << NumFmt{cfg.u_th} << '\n';
    out << "s_at=" << NumFmt{cfg.s_at} << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "hidden=" << cfg.hidden << '\n';
    out << "dropout=" << NumFmt{cfg.dropout} << '\n';
    out << "lr=" << NumFmt{cfg.lr} << '\n';
    out << "batch=" << cfg.batch << '\n';
    out << "epochs=" << cfg.epochs << '\n';
    out << "patience=" << cfg.patience << '\n';
    out << "use_edge_feature=" << (cfg.use_edge_feature ? "true" : "false") << '\n';
    out << "at_n=" << cfg.at_n << '\n';
    out << "mc_passes=" << cfg.mc_passes << '\n';
    out << "ut_T=" << cfg.ut_T << '\n';
    out << "ut_tau=" << cfg.ut_tau << '\n';
    out << "ut_hidden_layers=" << cfg.ut_hidden_layers << '\n';
    out << "oos_hidden_layers=" << cfg.oos_hidden_layers << '\n';
    out << "train_frac=" << NumFmt{cfg.train_frac} << '\n';
    out << "val_frac=" << NumFmt{cfg.val_frac} << '\n';
    out << "synth_tracks_per_lane=" << cfg.synth_tracks_per_lane << '\n';
    out << "synth_noise_m=" << NumFmt{cfg.synth_noise_m} << '\n';
    out << "synth_cog_noise_deg=" << NumFmt{cfg.synth_cog_noise_deg} << '\n';
    out << "synth_sog=" << NumFmt{cfg.synth_sog} << '\n';
    if (!cfg.path_input.empty()) out << "path_input=" << cfg.path_input << '\n';
    if (!cfg.path_output.empty()) out << "path_output=" << cfg.path_output << '\n';
    if (!cfg.path_graph.empty()) out << "path_graph=" << cfg.path_graph << '\n';
    if (!cfg.path_model.empty()) out << "path_model=" << cfg.path_model << '\n';
    if (!cfg.path_report.empty()) out << "path_report=" << cfg.path_report << '\n';
    if (!cfg.path_labels.empty()) out << "path_labels=" << cfg.path_labels << '\n';
    return out.str();
}

}  // namespace maredl
