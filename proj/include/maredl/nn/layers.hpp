#pragma once

#include "maredl/nn/core.hpp"

namespace maredl::nn {

struct LstmDims {
    std::size_t input = 0;
    std::size_t hidden = 0;
};

// Per-step forward cache, kept for backpropagation through time.
struct LstmStepCache {
    std::vector<double> zin;     // [x, h_prev], input+hidden
    std::vector<double> c_prev;  // hidden
    std::vector<double> i, f, g, o, tanh_c;
};

// Standard LSTM cell. W is (4H x (input+H)) row-major with gate blocks in
// the order [input, forget, candidate, output]; b is 4H. h and c (size H)
// are updated in place.
void lstm_step(const double* w, const double* b, const LstmDims& dims,
               const double* x, std::vector<double>& h, std::vector<double>& c,
               LstmStepCache& cache);

// Reverse step: dh/dc arrive holding the gradients w.r.t. h_t/c_t and leave
// holding those w.r.t. h_{t-1}/c_{t-1}. dx (size input) and dW/db accumulate.
void lstm_step_backward(const double* w, const LstmDims& dims,
                        const LstmStepCache& cache, std::vector<double>& dh,
                        std::vector<double>& dc, double* dx, double* dw,
                        double* db);

// Inverted dropout: entries are 0 or 1/(1-rate). rate = 0 gives all-ones.
std::vector<double> make_dropout_mask(std::size_t n, double rate, Rng& rng);

}  // namespace maredl::nn
