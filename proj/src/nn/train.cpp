#include "maredl/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace maredl::nn {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

void TrainConfig::validate() const {
    if (!(lr > 0.0) || batch < 1 || epochs < 1 || lambda < 0.0) {
        throw std::invalid_argument("TrainConfig: invalid values");
    }
}

AdamState make_adam_state(const WeightStore& weights) {
    return {weights.zeros_like(), weights.zeros_like(), 0};
}

void adam_step(WeightStore& weights, const WeightStore& grads, AdamState& state,
               double lr) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
    for (auto& [name, w] : weights.entries()) {
        const Array& g = grads.at(name);
        Array& m = state.m.at(name);
        Array& v = state.v.at(name);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = g.data[i];
            if (!std::isfinite(gi)) {
                throw std::runtime_error("adam_step: non-finite gradient in " + name +
                                         "[" + std::to_string(i) + "]");
            }
            m.data[i] = kBeta1 * m.data[i] + (1.0 - kBeta1) * gi;
            v.data[i] = kBeta2 * v.data[i] + (1.0 - kBeta2) * gi * gi;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            w.data[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
        }
    }
}

namespace {

// Shared epoch loop; sample_backward returns the per-sample loss and
// accumulates gradients, eval_loss scores a weight set on held-out data.
template <typename SampleBackward, typename EvalLoss>
TrainResult run_training(WeightStore weights, std::size_t train_count,
                         bool has_val, const TrainConfig& cfg,
                         SampleBackward&& sample_backward, EvalLoss&& eval_loss) {
    cfg.validate();
    if (train_count == 0) {
        throw std::invalid_argument("train: empty training set");
    }
    Rng rng(cfg.seed);
    AdamState adam = make_adam_state(weights);
    WeightStore grads = weights.zeros_like();

    std::vector<std::size_t> order(train_count);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.weights = weights;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < train_count; start += cfg.batch) {
            const std::size_t end = std::min(train_count, start + cfg.batch);
            grads.fill(0.0);
            for (std::size_t i = start; i < end; ++i) {
                epoch_loss += sample_backward(weights, order[i], grads, rng);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto& [name, arr] : grads.entries()) {
                for (double& g : arr.data) g *= inv;
            }
            adam_step(weights, grads, adam, cfg.lr);
        }
        result.train_loss.push_back(epoch_loss / static_cast<double>(train_count));

        const double vl = has_val ? eval_loss(weights) : result.train_loss.back();
        result.val_loss.push_back(vl);
        if (vl < best_val) {
            best_val = vl;
            result.weights = weights;
            stall = 0;
        } else if (++stall > cfg.patience) {
            break;
        }
    }
    return result;
}

void check_regression_data(const RegressorSpec& spec, const RegressionData& d,
                           const char* which) {
    if (d.count == 0) return;
    if (d.T != spec.T || d.n_in != spec.n_in || d.L != spec.L ||
        d.n_out != spec.n_out || !d.inputs || !d.targets) {
        throw std::invalid_argument(std::string("train_regressor: ") + which +
                                    " data does not match the spec");
    }
}

void check_classification_data(const ClassifierSpec& spec,
                               const ClassificationData& d, const char* which) {
    if (d.count == 0) return;
    if (d.T != spec.T || d.n_in != spec.n_in || d.k != spec.k || !d.inputs ||
        !d.labels) {
        throw std::invalid_argument(std::string("train_classifier: ") + which +
                                    " data does not match the spec");
    }
}

}  // namespace

double regressor_eval_loss(const RegressorSpec& spec, const WeightStore& weights,
                           const RegressionData& data, double lambda) {
    double total = 0.0;
    std::vector<double> seq(spec.T * spec.n_in);
    for (std::size_t i = 0; i < data.count; ++i) {
        seq.assign(data.inputs + i * seq.size(), data.inputs + (i + 1) * seq.size());
        const auto out = regressor_forward(seq, spec, weights, Mode::Eval);
        for (std::size_t j = 0; j < spec.L * spec.n_out; ++j) {
            const double x = data.targets[i * spec.L * spec.n_out + j];
            if (spec.head == RegressorSpec::Head::Evidential) {
                total += evid::regression_loss(x, out.nig[j], lambda);
            } else {
                const double e = x - out.mean[j];
                const double sg = out.sigma[j];
                total += 0.5 * 1.8378770664093453 + std::log(sg) +
                         e * e / (2.0 * sg * sg);
            }
        }
    }
    return data.count ? total / static_cast<double>(data.count) : 0.0;
}

double classifier_eval_loss(const ClassifierSpec& spec, const WeightStore& weights,
                            const ClassificationData& data) {
    double total = 0.0;
    std::vector<double> seq(spec.T * spec.n_in);
    std::vector<double> y(spec.k);
    for (std::size_t i = 0; i < data.count; ++i) {
        seq.assign(data.inputs + i * seq.size(), data.inputs + (i + 1) * seq.size());
        std::fill(y.begin(), y.end(), 0.0);
        y[data.labels[i]] = 1.0;
        total += evid::classification_loss(y, classifier_forward(seq, spec, weights));
    }
    return data.count ? total / static_cast<double>(data.count) : 0.0;
}

TrainResult train_regressor(const RegressorSpec& spec, const RegressionData& train,
                            const RegressionData& val, const TrainConfig& cfg) {
    spec.validate();
    check_regression_data(spec, train, "train");
    check_regression_data(spec, val, "validation");

    WeightStore init = init_regressor(spec, cfg.seed);
    const std::size_t in_sz = spec.T * spec.n_in;
    const std::size_t out_sz = spec.L * spec.n_out;

    return run_training(
        std::move(init), train.count, val.count > 0, cfg,
        [&](const WeightStore& w, std::size_t i, WeightStore& grads, Rng& rng) {
            std::vector<double> seq(train.inputs + i * in_sz,
                                    train.inputs + (i + 1) * in_sz);
            std::vector<double> target(train.targets + i * out_sz,
                                       train.targets + (i + 1) * out_sz);
            return regressor_loss_backward(seq, target, spec, w, cfg.lambda, &rng,
                                           grads);
        },
        [&](const WeightStore& w) {
            return regressor_eval_loss(spec, w, val, cfg.lambda);
        });
}

TrainResult train_classifier(const ClassifierSpec& spec,
                             const ClassificationData& train,
                             const ClassificationData& val,
                             const TrainConfig& cfg) {
    spec.validate();
    check_classification_data(spec, train, "train");
    check_classification_data(spec, val, "validation");

    WeightStore init = init_classifier(spec, cfg.seed);
    const std::size_t in_sz = spec.T * spec.n_in;

    return run_training(
        std::move(init), train.count, val.count > 0, cfg,
        [&](const WeightStore& w, std::size_t i, WeightStore& grads, Rng&) {
            std::vector<double> seq(train.inputs + i * in_sz,
                                    train.inputs + (i + 1) * in_sz);
            std::vector<double> y(spec.k, 0.0);
            y[train.labels[i]] = 1.0;
            return classifier_loss_backward(seq, y, spec, w, grads);
        },
        [&](const WeightStore& w) { return classifier_eval_loss(spec, w, val); });
}

}  // namespace maredl::nn
