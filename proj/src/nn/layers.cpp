#include "maredl/nn/layers.hpp"

#include <cmath>

namespace maredl::nn {

void lstm_step(const double* w, const double* b, const LstmDims& dims,
               const double* x, std::vector<double>& h, std::vector<double>& c,
               LstmStepCache& cache) {
    const std::size_t in = dims.input;
    const std::size_t hid = dims.hidden;
    const std::size_t zlen = in + hid;

    cache.zin.resize(zlen);
    for (std::size_t k = 0; k < in; ++k) cache.zin[k] = x[k];
    for (std::size_t k = 0; k < hid; ++k) cache.zin[in + k] = h[k];
    cache.c_prev = c;

    std::vector<double> z(4 * hid);
    for (std::size_t k = 0; k < 4 * hid; ++k) z[k] = b[k];
    matvec_acc(w, cache.zin.data(), z.data(), 4 * hid, zlen);

    cache.i.resize(hid);
    cache.f.resize(hid);
    cache.g.resize(hid);
    cache.o.resize(hid);
    cache.tanh_c.resize(hid);
    for (std::size_t k = 0; k < hid; ++k) {
        cache.i[k] = sigmoid(z[k]);
        cache.f[k] = sigmoid(z[hid + k]);
        cache.g[k] = std::tanh(z[2 * hid + k]);
        cache.o[k] = sigmoid(z[3 * hid + k]);
        c[k] = cache.f[k] * cache.c_prev[k] + cache.i[k] * cache.g[k];
        cache.tanh_c[k] = std::tanh(c[k]);
        h[k] = cache.o[k] * cache.tanh_c[k];
    }
}

void lstm_step_backward(const double* w, const LstmDims& dims,
                        const LstmStepCache& cache, std::vector<double>& dh,
                        std::vector<double>& dc, double* dx, double* dw,
                        double* db) {
    const std::size_t in = dims.input;
    const std::size_t hid = dims.hidden;
    const std::size_t zlen = in + hid;

    std::vector<double> dz(4 * hid);
    for (std::size_t k = 0; k < hid; ++k) {
        const double i = cache.i[k];
        const double f = cache.f[k];
        const double g = cache.g[k];
        const double o = cache.o[k];
        const double tc = cache.tanh_c[k];

        const double do_ = dh[k] * tc;
        const double dct = dc[k] + dh[k] * o * (1.0 - tc * tc);

        const double di = dct * g;
        const double df = dct * cache.c_prev[k];
        const double dg = dct * i;
        dc[k] = dct * f;  // becomes dc_{t-1}

        dz[k] = di * i * (1.0 - i);
        dz[hid + k] = df * f * (1.0 - f);
        dz[2 * hid + k] = dg * (1.0 - g * g);
        dz[3 * hid + k] = do_ * o * (1.0 - o);
    }

    outer_acc(dw, dz.data(), cache.zin.data(), 4 * hid, zlen);
    for (std::size_t k = 0; k < 4 * hid; ++k) db[k] += dz[k];

    std::vector<double> dzin(zlen, 0.0);
    matvec_t_acc(w, dz.data(), dzin.data(), 4 * hid, zlen);
    for (std::size_t k = 0; k < in; ++k) dx[k] += dzin[k];
    for (std::size_t k = 0; k < hid; ++k) dh[k] = dzin[in + k];  // dh_{t-1}
}

std::vector<double> make_dropout_mask(std::size_t n, double rate, Rng& rng) {
    std::vector<double> mask(n, 1.0);
    if (rate <= 0.0) return mask;
    if (rate >= 1.0) throw std::invalid_argument("dropout rate must be < 1");
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& m : mask) m = dist(rng) < rate ? 0.0 : keep_scale;
    return mask;
}

}  // namespace maredl::nn
