#pragma once

#include <vector>

namespace maredl::evid {

// Normal-Inverse-Gamma evidential output for one regression target.
// Constraints hold by head construction: v > 0, alpha > 1, beta > 0.
struct NigParams {
    double x_hat = 0.0;
    double v = 1.0;
    double alpha = 2.0;
    double beta = 1.0;
};

struct NigGrad {
    double d_x_hat = 0.0;
    double d_v = 0.0;
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

struct UncertaintyPair {
    double aleatoric = 0.0;
    double epistemic = 0.0;
};

// Dirichlet evidential output for a K-class prediction, alpha_c >= 1.
struct DirichletParams {
    std::vector<double> alpha;
};

double digamma(double x);

// Log density of the NIG marginal likelihood: Student-t with location x_hat,
// squared scale beta*(1+v)/(v*alpha) and 2*alpha degrees of freedom.
double studentt_logpdf(double x, const NigParams& p);

// Evidential regression loss: -log St(x) + lambda*|x - x_hat|*(2v + alpha).
// When grad is non-null the four analytic partials are written, using the
// subgradient convention sign(0) = 0 for the regularizer.
double regression_loss(double x, const NigParams& p, double lambda,
                       NigGrad* grad = nullptr);

// epistemic = beta / (v*(alpha-1));  aleatoric = v * epistemic.
UncertaintyPair nig_uncertainties(const NigParams& p);

// Mean of the Dirichlet: alpha_c / S.
std::vector<double> dirichlet_probs(const DirichletParams& d);

// Evidential classifier uncertainty u = K / S, in (0, 1].
double dirichlet_uncertainty(const DirichletParams& d);

// Expected sum-of-squares loss under the Dirichlet:
//   sum_c (y_c - p_c)^2 + p_c*(1 - p_c)/(S + 1).
// plain = true drops the variance term (kept for comparison runs).
// grad_alpha, when non-null, receives dL/dalpha_c.
double classification_loss(const std::vector<double>& y_onehot,
                           const DirichletParams& d,
                           std::vector<double>* grad_alpha = nullptr,
                           bool plain = false);

}  // namespace maredl::evid
