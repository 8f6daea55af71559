#include "maredl/nn/models.hpp"

#include <cmath>

namespace maredl::nn {

namespace {

constexpr double kSigmaFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;

std::string idx_name(const char* prefix, std::size_t l, const char* what) {
    return std::string(prefix) + std::to_string(l) + "." + what;
}

}  // namespace

void RegressorSpec::validate() const {
    if (n_in == 0 || n_out == 0 || hidden == 0 || layers == 0 || T == 0 || L == 0) {
        throw std::invalid_argument("RegressorSpec: zero-sized dimension");
    }
    if (n_out > n_in) {
        throw std::invalid_argument(
            "RegressorSpec: the first n_out input features feed the decoder, "
            "need n_out <= n_in");
    }
    if (dropout < 0.0 || dropout >= 1.0) {
        throw std::invalid_argument("RegressorSpec: dropout must be in [0, 1)");
    }
}

void ClassifierSpec::validate() const {
    if (T == 0 || n_in == 0 || hidden == 0 || hidden_layers == 0 || k < 2) {
        throw std::invalid_argument("ClassifierSpec: bad dimensions (need K >= 2)");
    }
}

WeightStore init_regressor(const RegressorSpec& spec, std::uint64_t seed) {
    spec.validate();
    WeightStore w;
    w.seed = seed;
    Rng rng(seed);

    auto add_lstm = [&](const char* prefix, std::size_t l, std::size_t in_dim) {
        const std::size_t h = spec.hidden;
        Array& W = w.add(idx_name(prefix, l, "W"), {4 * h, in_dim + h});
        init_uniform(W, in_dim + h, rng);
        Array& b = w.add(idx_name(prefix, l, "b"), {4 * h});
        for (std::size_t k = 0; k < h; ++k) b.data[h + k] = 1.0;  // forget gate
    };

    for (std::size_t l = 0; l < spec.layers; ++l) {
        add_lstm("enc", l, l == 0 ? spec.n_in : spec.hidden);
    }
    for (std::size_t l = 0; l < spec.layers; ++l) {
        add_lstm("dec", l, l == 0 ? spec.n_out : spec.hidden);
    }
    Array& dw = w.add("dense.W", {spec.hidden, spec.hidden});
    init_uniform(dw, spec.hidden, rng);
    w.add("dense.b", {spec.hidden});
    Array& hw = w.add("head.W", {spec.head_width(), spec.hidden});
    init_uniform(hw, spec.hidden, rng);
    w.add("head.b", {spec.head_width()});
    return w;
}

namespace {

struct RegressorTrace {
    std::vector<std::vector<LstmStepCache>> enc_cache;  // [layer][t]
    std::vector<std::vector<std::vector<double>>> enc_inter_mask;  // [t][l-1]
    std::vector<std::vector<double>> enc_final_mask;               // [layer]
    std::vector<std::vector<LstmStepCache>> dec_cache;             // [layer][s]
    std::vector<std::vector<std::vector<double>>> dec_inter_mask;  // [s][l-1]
    std::vector<std::vector<double>> dec_top_mask;                 // [s]
    std::vector<std::vector<double>> dec_top_dropped;              // [s]
    std::vector<std::vector<double>> dense_pre;                    // [s]
    std::vector<std::vector<double>> dense_out;                    // [s]
    std::vector<std::vector<double>> head_raw;                     // [s]
};

RegressorOutput run_regressor(const std::vector<double>& seq,
                              const RegressorSpec& spec, const WeightStore& w,
                              Mode mode, Rng* rng,
                              const std::vector<double>* teacher,
                              RegressorTrace* trace) {
    spec.validate();
    if (seq.size() != spec.T * spec.n_in) {
        throw std::invalid_argument("regressor: input is not T x n_in");
    }
    if (teacher && teacher->size() != spec.L * spec.n_out) {
        throw std::invalid_argument("regressor: teacher is not L x n_out");
    }
    const bool drop = mode == Mode::Train && spec.dropout > 0.0;
    if (drop && !rng) {
        throw std::invalid_argument("regressor: dropout needs an RNG in train mode");
    }
    const std::size_t H = spec.hidden;
    const std::size_t nl = spec.layers;

    auto mask_or_ones = [&](std::size_t n) {
        return drop ? make_dropout_mask(n, spec.dropout, *rng)
                    : std::vector<double>(n, 1.0);
    };

    if (trace) {
        trace->enc_cache.assign(nl, std::vector<LstmStepCache>(spec.T));
        trace->enc_inter_mask.assign(spec.T, {});
        trace->enc_final_mask.clear();
        trace->dec_cache.assign(nl, std::vector<LstmStepCache>(spec.L));
        trace->dec_inter_mask.assign(spec.L, {});
        trace->dec_top_mask.clear();
        trace->dec_top_dropped.clear();
        trace->dense_pre.clear();
        trace->dense_out.clear();
        trace->head_raw.clear();
    }

    // encoder
    std::vector<std::vector<double>> h(nl, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> c(nl, std::vector<double>(H, 0.0));
    LstmStepCache scratch;
    for (std::size_t t = 0; t < spec.T; ++t) {
        std::vector<double> lower;  // dropped output of the layer below
        for (std::size_t l = 0; l < nl; ++l) {
            const LstmDims dims{l == 0 ? spec.n_in : H, H};
            const double* x = l == 0 ? seq.data() + t * spec.n_in : lower.data();
            LstmStepCache& cache = trace ? trace->enc_cache[l][t] : scratch;
            lstm_step(w.at(idx_name("enc", l, "W")).ptr(),
                      w.at(idx_name("enc", l, "b")).ptr(), dims, x, h[l], c[l],
                      cache);
            if (l + 1 < nl) {
                auto mask = mask_or_ones(H);
                lower = h[l];
                for (std::size_t k = 0; k < H; ++k) lower[k] *= mask[k];
                if (trace) trace->enc_inter_mask[t].push_back(std::move(mask));
            }
        }
    }

    // encoder final hidden states pass through dropout into the decoder
    std::vector<std::vector<double>> hd(nl), cd(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        auto mask = mask_or_ones(H);
        hd[l] = h[l];
        for (std::size_t k = 0; k < H; ++k) hd[l][k] *= mask[k];
        cd[l] = c[l];
        if (trace) trace->enc_final_mask.push_back(std::move(mask));
    }

    // decoder, fed back with the previous target frame
    RegressorOutput out;
    const bool evidential = spec.head == RegressorSpec::Head::Evidential;
    if (evidential) {
        out.nig.resize(spec.L * spec.n_out);
    } else {
        out.mean.resize(spec.L * spec.n_out);
        out.sigma.resize(spec.L * spec.n_out);
    }
    std::vector<double> feedback(seq.end() - spec.n_in, seq.end() - spec.n_in + spec.n_out);

    const Array& dense_w = w.at("dense.W");
    const Array& dense_b = w.at("dense.b");
    const Array& head_w = w.at("head.W");
    const Array& head_b = w.at("head.b");
    const std::size_t hw = spec.head_width();

    for (std::size_t s = 0; s < spec.L; ++s) {
        std::vector<double> din = feedback;
        std::vector<double> lower;
        for (std::size_t l = 0; l < nl; ++l) {
            const LstmDims dims{l == 0 ? spec.n_out : H, H};
            const double* x = l == 0 ? din.data() : lower.data();
            LstmStepCache& cache = trace ? trace->dec_cache[l][s] : scratch;
            lstm_step(w.at(idx_name("dec", l, "W")).ptr(),
                      w.at(idx_name("dec", l, "b")).ptr(), dims, x, hd[l], cd[l],
                      cache);
            if (l + 1 < nl) {
                auto mask = mask_or_ones(H);
                lower = hd[l];
                for (std::size_t k = 0; k < H; ++k) lower[k] *= mask[k];
                if (trace) trace->dec_inter_mask[s].push_back(std::move(mask));
            }
        }
        auto top_mask = mask_or_ones(H);
        std::vector<double> dropped = hd[nl - 1];
        for (std::size_t k = 0; k < H; ++k) dropped[k] *= top_mask[k];

        std::vector<double> pre(dense_b.data);
        matvec_acc(dense_w.ptr(), dropped.data(), pre.data(), H, H);
        std::vector<double> act(H);
        for (std::size_t k = 0; k < H; ++k) act[k] = pre[k] > 0.0 ? pre[k] : 0.0;

        std::vector<double> raw(head_b.data);
        matvec_acc(head_w.ptr(), act.data(), raw.data(), hw, H);

        for (std::size_t d = 0; d < spec.n_out; ++d) {
            if (evidential) {
                evid::NigParams p;
                p.x_hat = raw[4 * d];
                p.v = softplus(raw[4 * d + 1]);
                p.alpha = 1.0 + softplus(raw[4 * d + 2]);
                p.beta = softplus(raw[4 * d + 3]);
                out.nig[s * spec.n_out + d] = p;
                feedback[d] = p.x_hat;
            } else {
                out.mean[s * spec.n_out + d] = raw[2 * d];
                out.sigma[s * spec.n_out + d] = softplus(raw[2 * d + 1]) + kSigmaFloor;
                feedback[d] = raw[2 * d];
            }
        }
        if (teacher && mode == Mode::Train) {
            for (std::size_t d = 0; d < spec.n_out; ++d) {
                feedback[d] = (*teacher)[s * spec.n_out + d];
            }
        }
        if (trace) {
            trace->dec_top_mask.push_back(std::move(top_mask));
            trace->dec_top_dropped.push_back(std::move(dropped));
            trace->dense_pre.push_back(std::move(pre));
            trace->dense_out.push_back(std::move(act));
            trace->head_raw.push_back(std::move(raw));
        }
    }
    return out;
}

}  // namespace

RegressorOutput regressor_forward(const std::vector<double>& seq,
                                  const RegressorSpec& spec,
                                  const WeightStore& weights, Mode mode, Rng* rng,
                                  const std::vector<double>* teacher) {
    return run_regressor(seq, spec, weights, mode, rng, teacher, nullptr);
}

double regressor_loss_backward(const std::vector<double>& seq,
                               const std::vector<double>& target,
                               const RegressorSpec& spec,
                               const WeightStore& weights, double lambda,
                               Rng* rng, WeightStore& grads) {
    if (target.size() != spec.L * spec.n_out) {
        throw std::invalid_argument("regressor: target is not L x n_out");
    }
    RegressorTrace trace;
    const RegressorOutput out =
        run_regressor(seq, spec, weights, Mode::Train, rng, &target, &trace);

    const std::size_t H = spec.hidden;
    const std::size_t nl = spec.layers;
    const std::size_t hw = spec.head_width();
    const bool evidential = spec.head == RegressorSpec::Head::Evidential;

    double loss = 0.0;
    std::vector<std::vector<double>> dh(nl, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> dc(nl, std::vector<double>(H, 0.0));

    for (std::size_t s = spec.L; s-- > 0;) {
        // loss gradient w.r.t. raw head outputs
        const auto& raw = trace.head_raw[s];
        std::vector<double> draw(hw, 0.0);
        for (std::size_t d = 0; d < spec.n_out; ++d) {
            const double x = target[s * spec.n_out + d];
            if (evidential) {
                const auto& p = out.nig[s * spec.n_out + d];
                evid::NigGrad g;
                loss += evid::regression_loss(x, p, lambda, &g);
                draw[4 * d] = g.d_x_hat;
                draw[4 * d + 1] = g.d_v * sigmoid(raw[4 * d + 1]);
                draw[4 * d + 2] = g.d_alpha * sigmoid(raw[4 * d + 2]);
                draw[4 * d + 3] = g.d_beta * sigmoid(raw[4 * d + 3]);
            } else {
                const double mu = out.mean[s * spec.n_out + d];
                const double sg = out.sigma[s * spec.n_out + d];
                const double e = x - mu;
                loss += 0.5 * kLog2Pi + std::log(sg) + e * e / (2.0 * sg * sg);
                draw[2 * d] = -e / (sg * sg);
                draw[2 * d + 1] =
                    (1.0 / sg - e * e / (sg * sg * sg)) * sigmoid(raw[2 * d + 1]);
            }
        }

        // head
        std::vector<double> dact(H, 0.0);
        matvec_t_acc(weights.at("head.W").ptr(), draw.data(), dact.data(), hw, H);
        outer_acc(grads.at("head.W").ptr(), draw.data(), trace.dense_out[s].data(),
                  hw, H);
        for (std::size_t k = 0; k < hw; ++k) grads.at("head.b").data[k] += draw[k];

        // dense + relu
        std::vector<double> dpre(H);
        for (std::size_t k = 0; k < H; ++k) {
            dpre[k] = trace.dense_pre[s][k] > 0.0 ? dact[k] : 0.0;
        }
        std::vector<double> ddropped(H, 0.0);
        matvec_t_acc(weights.at("dense.W").ptr(), dpre.data(), ddropped.data(), H, H);
        outer_acc(grads.at("dense.W").ptr(), dpre.data(),
                  trace.dec_top_dropped[s].data(), H, H);
        for (std::size_t k = 0; k < H; ++k) grads.at("dense.b").data[k] += dpre[k];

        for (std::size_t k = 0; k < H; ++k) {
            dh[nl - 1][k] += ddropped[k] * trace.dec_top_mask[s][k];
        }

        // decoder stack at step s, top layer first
        for (std::size_t l = nl; l-- > 0;) {
            const LstmDims dims{l == 0 ? spec.n_out : H, H};
            std::vector<double> dx(dims.input, 0.0);
            lstm_step_backward(weights.at(idx_name("dec", l, "W")).ptr(), dims,
                               trace.dec_cache[l][s], dh[l], dc[l], dx.data(),
                               grads.at(idx_name("dec", l, "W")).ptr(),
                               grads.at(idx_name("dec", l, "b")).ptr());
            if (l > 0) {
                for (std::size_t k = 0; k < H; ++k) {
                    dh[l - 1][k] += dx[k] * trace.dec_inter_mask[s][l - 1][k];
                }
            }
            // l == 0: the decoder input is teacher-forced, no gradient needed
        }
    }

    // decoder initial state = dropped encoder final state
    for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t k = 0; k < H; ++k) dh[l][k] *= trace.enc_final_mask[l][k];
    }

    for (std::size_t t = spec.T; t-- > 0;) {
        for (std::size_t l = nl; l-- > 0;) {
            const LstmDims dims{l == 0 ? spec.n_in : H, H};
            std::vector<double> dx(dims.input, 0.0);
            lstm_step_backward(weights.at(idx_name("enc", l, "W")).ptr(), dims,
                               trace.enc_cache[l][t], dh[l], dc[l], dx.data(),
                               grads.at(idx_name("enc", l, "W")).ptr(),
                               grads.at(idx_name("enc", l, "b")).ptr());
            if (l > 0) {
                for (std::size_t k = 0; k < H; ++k) {
                    dh[l - 1][k] += dx[k] * trace.enc_inter_mask[t][l - 1][k];
                }
            }
        }
    }
    return loss;
}

McPrediction mc_dropout_predict(const std::vector<double>& seq,
                                const RegressorSpec& spec,
                                const WeightStore& weights, std::size_t passes,
                                Rng& rng) {
    if (spec.head != RegressorSpec::Head::MeanSigma) {
        throw std::invalid_argument("mc_dropout_predict: needs the mean-sigma head");
    }
    if (passes < 2) {
        throw std::invalid_argument("mc_dropout_predict: passes must be >= 2");
    }
    const std::size_t n = spec.L * spec.n_out;
    std::vector<double> means(passes * n);
    std::vector<double> var_sum(n, 0.0);
    for (std::size_t p = 0; p < passes; ++p) {
        // dropout stays active; Train mode without teacher feeds predictions back
        const auto out = regressor_forward(seq, spec, weights, Mode::Train, &rng);
        for (std::size_t i = 0; i < n; ++i) {
            means[p * n + i] = out.mean[i];
            var_sum[i] += out.sigma[i] * out.sigma[i];
        }
    }
    McPrediction pred;
    pred.mean.resize(n);
    pred.aleatoric.resize(n);
    pred.epistemic.resize(n);
    const double np = static_cast<double>(passes);
    for (std::size_t i = 0; i < n; ++i) {
        // centered accumulation so identical passes give exactly zero spread
        const double base = means[i];
        double shift_sum = 0.0;
        for (std::size_t p = 0; p < passes; ++p) shift_sum += means[p * n + i] - base;
        const double shift_mean = shift_sum / np;
        pred.mean[i] = base + shift_mean;
        pred.aleatoric[i] = var_sum[i] / np;
        double ss = 0.0;
        for (std::size_t p = 0; p < passes; ++p) {
            const double d = (means[p * n + i] - base) - shift_mean;
            ss += d * d;
        }
        pred.epistemic[i] = ss / (np - 1.0);
    }
    return pred;
}

WeightStore init_classifier(const ClassifierSpec& spec, std::uint64_t seed) {
    spec.validate();
    WeightStore w;
    w.seed = seed;
    Rng rng(seed);
    std::size_t in_dim = spec.T * spec.n_in;
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
        Array& wl = w.add(idx_name("fc", l, "W"), {spec.hidden, in_dim});
        init_uniform(wl, in_dim, rng);
        w.add(idx_name("fc", l, "b"), {spec.hidden});
        in_dim = spec.hidden;
    }
    Array& wo = w.add("out.W", {spec.k, in_dim});
    init_uniform(wo, in_dim, rng);
    Array& bo = w.add("out.b", {spec.k});
    // start every class with live evidence; an output unit whose ReLU goes
    // negative for all samples never receives gradient again
    for (double& b : bo.data) b = 1.0;
    return w;
}

namespace {

struct ClassifierTrace {
    std::vector<std::vector<double>> inputs;  // input to each fc layer
    std::vector<std::vector<double>> pre;     // fc pre-activations
    std::vector<double> out_in;               // input to the output layer
    std::vector<double> out_pre;
};

evid::DirichletParams run_classifier(const std::vector<double>& seq,
                                     const ClassifierSpec& spec,
                                     const WeightStore& w,
                                     ClassifierTrace* trace) {
    spec.validate();
    if (seq.size() != spec.T * spec.n_in) {
        throw std::invalid_argument("classifier: input is not T x n_in");
    }
    std::vector<double> a = seq;
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
        const Array& wl = w.at(idx_name("fc", l, "W"));
        const Array& bl = w.at(idx_name("fc", l, "b"));
        std::vector<double> pre(bl.data);
        matvec_acc(wl.ptr(), a.data(), pre.data(), wl.shape[0], wl.shape[1]);
        if (trace) {
            trace->inputs.push_back(std::move(a));
            trace->pre.push_back(pre);
        }
        a.resize(pre.size());
        for (std::size_t k = 0; k < pre.size(); ++k) a[k] = pre[k] > 0.0 ? pre[k] : 0.0;
    }
    const Array& wo = w.at("out.W");
    const Array& bo = w.at("out.b");
    std::vector<double> pre(bo.data);
    matvec_acc(wo.ptr(), a.data(), pre.data(), wo.shape[0], wo.shape[1]);
    if (trace) {
        trace->out_in = std::move(a);
        trace->out_pre = pre;
    }
    evid::DirichletParams d;
    d.alpha.resize(spec.k);
    for (std::size_t k = 0; k < spec.k; ++k) {
        d.alpha[k] = 1.0 + (pre[k] > 0.0 ? pre[k] : 0.0);  // ReLU evidence + 1
    }
    return d;
}

}  // namespace

evid::DirichletParams classifier_forward(const std::vector<double>& seq,
                                         const ClassifierSpec& spec,
                                         const WeightStore& weights) {
    return run_classifier(seq, spec, weights, nullptr);
}

double classifier_loss_backward(const std::vector<double>& seq,
                                const std::vector<double>& y_onehot,
                                const ClassifierSpec& spec,
                                const WeightStore& weights, WeightStore& grads) {
    ClassifierTrace trace;
    const auto d = run_classifier(seq, spec, weights, &trace);
    std::vector<double> dalpha;
    const double loss = evid::classification_loss(y_onehot, d, &dalpha);

    std::vector<double> dpre(spec.k);
    for (std::size_t k = 0; k < spec.k; ++k) {
        dpre[k] = trace.out_pre[k] > 0.0 ? dalpha[k] : 0.0;
    }
    const Array& wo = weights.at("out.W");
    std::vector<double> da(wo.shape[1], 0.0);
    matvec_t_acc(wo.ptr(), dpre.data(), da.data(), wo.shape[0], wo.shape[1]);
    outer_acc(grads.at("out.W").ptr(), dpre.data(), trace.out_in.data(),
              wo.shape[0], wo.shape[1]);
    for (std::size_t k = 0; k < spec.k; ++k) grads.at("out.b").data[k] += dpre[k];

    for (std::size_t l = spec.hidden_layers; l-- > 0;) {
        const Array& wl = weights.at(idx_name("fc", l, "W"));
        std::vector<double> dp(wl.shape[0]);
        for (std::size_t k = 0; k < wl.shape[0]; ++k) {
            dp[k] = trace.pre[l][k] > 0.0 ? da[k] : 0.0;
        }
        da.assign(wl.shape[1], 0.0);
        matvec_t_acc(wl.ptr(), dp.data(), da.data(), wl.shape[0], wl.shape[1]);
        outer_acc(grads.at(idx_name("fc", l, "W")).ptr(), dp.data(),
                  trace.inputs[l].data(), wl.shape[0], wl.shape[1]);
        for (std::size_t k = 0; k < wl.shape[0]; ++k) {
            grads.at(idx_name("fc", l, "b")).data[k] += dp[k];
        }
    }
    return loss;
}

}  // namespace maredl::nn
