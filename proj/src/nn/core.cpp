#include "maredl/nn/core.hpp"

#include <cmath>

namespace maredl::nn {

void init_uniform(Array& a, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : a.data) v = dist(rng);
}

void matvec_acc(const double* w, const double* x, double* y, std::size_t rows,
                std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] += acc;
    }
}

void outer_acc(double* dw, const double* dy, const double* x, std::size_t rows,
               std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* dwr = dw + r * cols;
        const double g = dy[r];
        if (g == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) dwr[c] += g * x[c];
    }
}

void matvec_t_acc(const double* w, const double* dy, double* dx, std::size_t rows,
                  std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        const double g = dy[r];
        if (g == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) dx[c] += g * wr[c];
    }
}

double softplus(double z) {
    if (z > 30.0) return z;
    if (z < -30.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace maredl::nn
