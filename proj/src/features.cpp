#include "maredl/features.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "maredl/detectors.hpp"

namespace maredl::feat {

void write_regression_window(const ais::TrackSegment& seg, std::size_t first,
                             std::size_t T, const FeatureSpec& spec, double* out) {
    const std::size_t width = spec.regression_width();
    for (std::size_t t = 0; t < T; ++t) {
        const auto& r = seg.records[first + t];
        double* row = out + t * width;
        row[0] = spec.norm_lon(r.lon);
        row[1] = spec.norm_lat(r.lat);
        row[2] = spec.norm_cog(r.cog);
        row[3] = spec.norm_sog(r.sog);
        if (spec.use_edge) {
            for (std::size_t e = 0; e <= spec.edge_count; ++e) row[4 + e] = 0.0;
            std::size_t slot = spec.edge_count;  // outlier slot
            if (r.edge != ais::kOutlierEdge) {
                if (r.edge < 0 || static_cast<std::size_t>(r.edge) >= spec.edge_count) {
                    throw std::invalid_argument(
                        "write_regression_window: edge label outside the graph");
                }
                slot = static_cast<std::size_t>(r.edge);
            }
            row[4 + slot] = 1.0;
        }
    }
}

SampleSet make_regression_samples(const std::vector<ais::TrackSegment>& segments,
                                  std::size_t T, std::size_t L,
                                  const FeatureSpec& spec) {
    SampleSet set;
    set.T = T;
    set.n_in = spec.regression_width();
    set.L = L;
    set.n_out = 4;
    for (const auto& seg : segments) {
        if (seg.records.size() < T + L) {
            ++set.skipped_short;
            continue;
        }
        const std::size_t n_windows = seg.records.size() - (T + L) + 1;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const std::size_t base = set.inputs.size();
            set.inputs.resize(base + T * set.n_in);
            write_regression_window(seg, w, T, spec, set.inputs.data() + base);
            for (std::size_t l = 0; l < L; ++l) {
                const auto& r = seg.records[w + T + l];
                set.targets.push_back(spec.norm_lon(r.lon));
                set.targets.push_back(spec.norm_lat(r.lat));
                set.targets.push_back(spec.norm_cog(r.cog));
                set.targets.push_back(spec.norm_sog(r.sog));
            }
            set.sample_mmsi.push_back(seg.mmsi);
            ++set.count;
        }
    }
    return set;
}

SampleSet make_ut_samples(const std::vector<ais::TrackSegment>& segments,
                          std::size_t T, double theta_ut) {
    SampleSet set;
    set.T = T;
    set.n_in = 1;
    std::vector<double> cogs(T);
    for (const auto& seg : segments) {
        if (seg.records.size() < T) {
            ++set.skipped_short;
            continue;
        }
        for (std::size_t w = 0; w + T <= seg.records.size(); ++w) {
            for (std::size_t t = 0; t < T; ++t) {
                const double cog = seg.records[w + t].cog;
                cogs[t] = cog;
                set.inputs.push_back(cog / 360.0);
            }
            set.labels.push_back(det::turn_angle(cogs) > theta_ut ? 1 : 0);
            set.sample_mmsi.push_back(seg.mmsi);
            ++set.count;
        }
    }
    return set;
}

SampleSet make_oos_samples(const std::vector<ais::VesselTrack>& tracks,
                           double theta_oos, const FeatureSpec& spec) {
    SampleSet set;
    set.T = 2;
    set.n_in = 5;
    for (const auto& track : tracks) {
        for (std::size_t k = 0; k + 1 < track.records.size(); ++k) {
            const auto& a = track.records[k];
            const auto& b = track.records[k + 1];
            const double delta = static_cast<double>(b.time - a.time);
            set.inputs.push_back(spec.norm_lon(a.lon));
            set.inputs.push_back(spec.norm_lat(a.lat));
            set.inputs.push_back(spec.norm_cog(a.cog));
            set.inputs.push_back(spec.norm_sog(a.sog));
            set.inputs.push_back(0.0);  // first element's time feature
            set.inputs.push_back(spec.norm_lon(b.lon));
            set.inputs.push_back(spec.norm_lat(b.lat));
            set.inputs.push_back(spec.norm_cog(b.cog));
            set.inputs.push_back(spec.norm_sog(b.sog));
            set.inputs.push_back(std::min(1.0, delta / 3600.0));
            set.labels.push_back(det::label_oos(a.time, b.time, theta_oos) ? 1 : 0);
            set.sample_mmsi.push_back(track.mmsi);
            ++set.count;
        }
    }
    return set;
}

SampleSet balance_classes(const SampleSet& set, std::uint64_t seed) {
    if (set.labels.size() != set.count) {
        throw std::invalid_argument("balance_classes: labeled set required");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < set.count; ++i) {
        (set.labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw std::invalid_argument("balance_classes: a class is absent");
    }
    auto& majority = pos.size() > neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    std::mt19937_64 rng(seed);
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(keep);

    std::vector<std::size_t> kept;
    kept.reserve(2 * keep);
    kept.insert(kept.end(), pos.begin(), pos.end());
    kept.insert(kept.end(), neg.begin(), neg.end());
    std::sort(kept.begin(), kept.end());  // keep original sample order

    SampleSet out;
    out.T = set.T;
    out.n_in = set.n_in;
    out.L = set.L;
    out.n_out = set.n_out;
    out.skipped_short = set.skipped_short;
    const std::size_t in_sz = set.T * set.n_in;
    const std::size_t tg_sz = set.L * set.n_out;
    for (std::size_t i : kept) {
        out.inputs.insert(out.inputs.end(), set.inputs.begin() + i * in_sz,
                          set.inputs.begin() + (i + 1) * in_sz);
        if (!set.targets.empty()) {
            out.targets.insert(out.targets.end(), set.targets.begin() + i * tg_sz,
                               set.targets.begin() + (i + 1) * tg_sz);
        }
        out.labels.push_back(set.labels[i]);
        out.sample_mmsi.push_back(set.sample_mmsi[i]);
        ++out.count;
    }
    return out;
}

std::vector<int> split_mmsi(const std::vector<std::int64_t>& mmsis,
                            double train_frac, double val_frac,
                            std::uint64_t seed) {
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0) {
        throw std::invalid_argument("split_mmsi: bad fractions");
    }
    std::vector<std::size_t> order(mmsis.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n = static_cast<double>(mmsis.size());
    const std::size_t n_train = static_cast<std::size_t>(n * train_frac + 0.5);
    const std::size_t n_val = static_cast<std::size_t>(n * val_frac + 0.5);
    std::vector<int> assign(mmsis.size(), 2);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < n_train) {
            assign[order[i]] = 0;
        } else if (i < n_train + n_val) {
            assign[order[i]] = 1;
        }
    }
    return assign;
}

std::string samples_to_csv(const SampleSet& set) {
    std::ostringstream out;
    out.precision(17);
    out << "mmsi,label";
    for (std::size_t i = 0; i < set.T * set.n_in; ++i) out << ",x" << i;
    for (std::size_t i = 0; i < set.L * set.n_out; ++i) out << ",y" << i;
    out << '\n';
    for (std::size_t s = 0; s < set.count; ++s) {
        out << set.sample_mmsi[s] << ',';
        out << (set.labels.empty() ? -1 : set.labels[s]);
        const std::size_t in_sz = set.T * set.n_in;
        for (std::size_t i = 0; i < in_sz; ++i) {
            out << ',' << set.inputs[s * in_sz + i];
        }
        const std::size_t tg_sz = set.L * set.n_out;
        for (std::size_t i = 0; i < tg_sz; ++i) {
            out << ',' << set.targets[s * tg_sz + i];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace maredl::feat
