#pragma once

#include "maredl/nn/models.hpp"

namespace maredl::nn {

struct TrainConfig {
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t epochs = 50;
    double lambda = 0.01;  // evidential regression regularizer
    std::uint64_t seed = 1;
    std::size_t patience = 5;  // early stop on validation loss

    void validate() const;
};

struct AdamState {
    WeightStore m, v;
    std::int64_t t = 0;
};

AdamState make_adam_state(const WeightStore& weights);

// Bias-corrected Adam, beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
// Throws std::runtime_error naming the array on a non-finite gradient.
void adam_step(WeightStore& weights, const WeightStore& grads, AdamState& state,
               double lr);

// Flat sample views; row-major [count x T x n_in] inputs.
struct RegressionData {
    std::size_t count = 0, T = 0, n_in = 0, L = 0, n_out = 0;
    const double* inputs = nullptr;
    const double* targets = nullptr;  // count x L x n_out
};

struct ClassificationData {
    std::size_t count = 0, T = 0, n_in = 0, k = 0;
    const double* inputs = nullptr;
    const int* labels = nullptr;  // count, class index
};

struct TrainResult {
    WeightStore weights;  // best-validation weights
    std::vector<double> train_loss;
    std::vector<double> val_loss;
};

TrainResult train_regressor(const RegressorSpec& spec, const RegressionData& train,
                            const RegressionData& val, const TrainConfig& cfg);

TrainResult train_classifier(const ClassifierSpec& spec,
                             const ClassificationData& train,
                             const ClassificationData& val, const TrainConfig& cfg);

double regressor_eval_loss(const RegressorSpec& spec, const WeightStore& weights,
                           const RegressionData& data, double lambda);
double classifier_eval_loss(const ClassifierSpec& spec, const WeightStore& weights,
                            const ClassificationData& data);

}  // namespace maredl::nn
