#include "maredl/evidential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maredl::evid {

namespace {

constexpr double kPi = std::numbers::pi;

void check_nig(const NigParams& p) {
    if (!(p.v > 0.0) || !(p.alpha > 1.0) || !(p.beta > 0.0) ||
        !std::isfinite(p.x_hat) || !std::isfinite(p.v) ||
        !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
        throw std::invalid_argument(
            "NigParams out of domain (need v>0, alpha>1, beta>0, finite)");
    }
}

void check_dirichlet(const DirichletParams& d) {
    if (d.alpha.size() < 2) {
        throw std::invalid_argument("DirichletParams: need K >= 2");
    }
    for (double a : d.alpha) {
        if (!(a >= 1.0) || !std::isfinite(a)) {
            throw std::invalid_argument("DirichletParams: alpha_c must be >= 1");
        }
    }
}

}  // namespace

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be > 0");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series, |error| < 1e-12 for x >= 10
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 -
                                      inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

double studentt_logpdf(double x, const NigParams& p) {
    check_nig(p);
    if (!std::isfinite(x)) {
        throw std::invalid_argument("studentt_logpdf: non-finite x");
    }
    const double nu = 2.0 * p.alpha;
    const double scale_sq = p.beta * (1.0 + p.v) / (p.v * p.alpha);
    const double e = x - p.x_hat;
    return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
           0.5 * std::log(nu * kPi * scale_sq) -
           (nu + 1.0) / 2.0 * std::log1p(e * e / (nu * scale_sq));
}

double regression_loss(double x, const NigParams& p, double lambda,
                       NigGrad* grad) {
    if (lambda < 0.0) throw std::invalid_argument("regression_loss: lambda < 0");
    const double nll = -studentt_logpdf(x, p);
    const double e = x - p.x_hat;
    const double abs_e = std::abs(e);
    const double loss = nll + lambda * abs_e * (2.0 * p.v + p.alpha);

    if (grad) {
        // NLL in the form 0.5*log(pi/v) - alpha*log(L) + (alpha+0.5)*log(G)
        //                 + lgamma(alpha) - lgamma(alpha+0.5),
        // with L = 2*beta*(1+v) and G = e^2*v + L.
        const double L = 2.0 * p.beta * (1.0 + p.v);
        const double G = e * e * p.v + L;
        const double ap = p.alpha + 0.5;
        grad->d_x_hat = ap * (-2.0 * e * p.v) / G;
        grad->d_v = -0.5 / p.v - p.alpha * (2.0 * p.beta) / L + ap * (e * e + 2.0 * p.beta) / G;
        grad->d_alpha = -std::log(L) + std::log(G) + digamma(p.alpha) - digamma(ap);
        grad->d_beta = -p.alpha / p.beta + ap * 2.0 * (1.0 + p.v) / G;

        const double sgn = (e > 0.0) - (e < 0.0);
        grad->d_x_hat += lambda * (-sgn) * (2.0 * p.v + p.alpha);
        grad->d_v += 2.0 * lambda * abs_e;
        grad->d_alpha += lambda * abs_e;
    }
    return loss;
}

UncertaintyPair nig_uncertainties(const NigParams& p) {
    check_nig(p);
    const double epistemic = p.beta / (p.v * (p.alpha - 1.0));
    return {p.v * epistemic, epistemic};
}

std::vector<double> dirichlet_probs(const DirichletParams& d) {
    check_dirichlet(d);
    double s = 0.0;
    for (double a : d.alpha) s += a;
    std::vector<double> probs(d.alpha.size());
    for (std::size_t c = 0; c < d.alpha.size(); ++c) probs[c] = d.alpha[c] / s;
    return probs;
}

double dirichlet_uncertainty(const DirichletParams& d) {
    check_dirichlet(d);
    double s = 0.0;
    for (double a : d.alpha) s += a;
    return static_cast<double>(d.alpha.size()) / s;
}

double classification_loss(const std::vector<double>& y_onehot,
                           const DirichletParams& d,
                           std::vector<double>* grad_alpha, bool plain) {
    check_dirichlet(d);
    const std::size_t k = d.alpha.size();
    if (y_onehot.size() != k) {
        throw std::invalid_argument("classification_loss: y/alpha size mismatch");
    }
    double ones = 0.0;
    for (double y : y_onehot) {
        if (y != 0.0 && y != 1.0) {
            throw std::invalid_argument("classification_loss: y must be one-hot");
        }
        ones += y;
    }
    if (ones != 1.0) {
        throw std::invalid_argument("classification_loss: y must be one-hot");
    }

    double s = 0.0;
    for (double a : d.alpha) s += a;

    double loss = 0.0;
    double var_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double pc = d.alpha[c] / s;
        const double r = y_onehot[c] - pc;
        loss += r * r;
        var_sum += pc * (1.0 - pc);
    }
    if (!plain) loss += var_sum / (s + 1.0);

    if (grad_alpha) {
        grad_alpha->assign(k, 0.0);
        // dp_c/dalpha_j = (delta_cj - p_c)/S
        double dot = 0.0;
        std::vector<double> coeff(k);
        for (std::size_t c = 0; c < k; ++c) {
            const double pc = d.alpha[c] / s;
            double a_c = -2.0 * (y_onehot[c] - pc);
            if (!plain) a_c += (1.0 - 2.0 * pc) / (s + 1.0);
            coeff[c] = a_c;
            dot += a_c * pc;
        }
        for (std::size_t j = 0; j < k; ++j) {
            double g = (coeff[j] - dot) / s;
            if (!plain) g -= var_sum / ((s + 1.0) * (s + 1.0));
            (*grad_alpha)[j] = g;
        }
    }
    return loss;
}

}  // namespace maredl::evid
