#pragma once

#include "maredl/evidential.hpp"
#include "maredl/nn/layers.hpp"

namespace maredl::nn {

// LSTM encoder-decoder regressor. Inputs are T x n_in rows; the first n_out
// input features must be the regression targets (the decoder feeds them
// back). The evidential head emits 4 NIG parameters per output feature, the
// mean-sigma head 2 (for the MC-dropout baseline).
struct RegressorSpec {
    std::size_t n_in = 5;
    std::size_t n_out = 4;
    std::size_t hidden = 128;
    std::size_t layers = 1;  // stacked LSTM layers in encoder and decoder
    double dropout = 0.1;
    std::size_t T = 10;
    std::size_t L = 1;
    enum class Head { Evidential, MeanSigma };
    Head head = Head::Evidential;

    std::size_t head_width() const {
        return (head == Head::Evidential ? 4 : 2) * n_out;
    }
    void validate() const;
};

WeightStore init_regressor(const RegressorSpec& spec, std::uint64_t seed);

struct RegressorOutput {
    // L x n_out, NIG params from the evidential head
    std::vector<evid::NigParams> nig;
    // L x n_out, from the mean-sigma head
    std::vector<double> mean;
    std::vector<double> sigma;
};

enum class Mode { Train, Eval };

// Forward pass. rng supplies dropout masks and may be null when
// mode == Eval (dropout is the identity there) or dropout == 0.
// teacher (L x n_out) drives the decoder feedback in Train mode; Eval feeds
// the previous prediction back.
RegressorOutput regressor_forward(const std::vector<double>& seq,
                                  const RegressorSpec& spec,
                                  const WeightStore& weights, Mode mode,
                                  Rng* rng = nullptr,
                                  const std::vector<double>* teacher = nullptr);

// Teacher-forced forward + backward. Returns the sample loss (summed over
// L and output features) and accumulates parameter gradients into grads.
double regressor_loss_backward(const std::vector<double>& seq,
                               const std::vector<double>& target,
                               const RegressorSpec& spec,
                               const WeightStore& weights, double lambda,
                               Rng* rng, WeightStore& grads);

struct McPrediction {
    // L x n_out each
    std::vector<double> mean;        // mean of per-pass means
    std::vector<double> aleatoric;   // mean of per-pass sigma^2
    std::vector<double> epistemic;   // variance of per-pass means
};

// Dropout stays active; `passes` forward evaluations (>= 2).
McPrediction mc_dropout_predict(const std::vector<double>& seq,
                                const RegressorSpec& spec,
                                const WeightStore& weights, std::size_t passes,
                                Rng& rng);

// Feed-forward evidential classifier: flattened input through ReLU hidden
// layers, ReLU output, alpha = output + 1.
struct ClassifierSpec {
    std::size_t T = 2;
    std::size_t n_in = 5;
    std::size_t hidden = 128;
    std::size_t hidden_layers = 1;
    std::size_t k = 2;

    void validate() const;
};

WeightStore init_classifier(const ClassifierSpec& spec, std::uint64_t seed);

evid::DirichletParams classifier_forward(const std::vector<double>& seq,
                                         const ClassifierSpec& spec,
                                         const WeightStore& weights);

double classifier_loss_backward(const std::vector<double>& seq,
                                const std::vector<double>& y_onehot,
                                const ClassifierSpec& spec,
                                const WeightStore& weights, WeightStore& grads);

}  // namespace maredl::nn
