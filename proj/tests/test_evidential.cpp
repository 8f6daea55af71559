#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "maredl/evidential.hpp"

using namespace maredl;
using testutil::integrate;
using testutil::rel_err;

TEST_SUITE_BEGIN("evidential");

namespace {

double gamma_logpdf(double y, double alpha, double rate) {
    return alpha * std::log(rate) + (alpha - 1.0) * std::log(y) - rate * y -
           std::lgamma(alpha);
}

double normal_pdf(double x, double mu, double var) {
    return std::exp(-(x - mu) * (x - mu) / (2.0 * var)) /
           std::sqrt(2.0 * M_PI * var);
}

// Numeric marginal of the NIG mixture: integrates the Gaussian likelihood
// against the NIG prior over (mu, precision), independent of the closed form.
double nig_marginal_quadrature(double x, const evid::NigParams& p) {
    const double y_hi = (p.alpha + 14.0 * std::sqrt(p.alpha) + 14.0) / p.beta;
    const double y_lo = 1e-8 / p.beta;
    auto outer = [&](double y) {
        const double var = 1.0 / y;           // sigma^2
        const double mu_var = var / p.v;      // prior variance of mu
        const double spread = 10.0 * (std::sqrt(var) + std::sqrt(mu_var));
        const double lo = std::min(x, p.x_hat) - spread;
        const double hi = std::max(x, p.x_hat) + spread;
        auto inner = [&](double mu) {
            return normal_pdf(x, mu, var) * normal_pdf(mu, p.x_hat, mu_var);
        };
        return std::exp(gamma_logpdf(y, p.alpha, p.beta)) *
               integrate(inner, lo, hi, 1e-12, 28);
    };
    return integrate(outer, y_lo, y_hi, 1e-10, 28);
}

}  // namespace

TEST_CASE("studentt_logpdf integrates to one") {
    const evid::NigParams p{0.4, 1.3, 3.0, 0.9};
    const double scale = std::sqrt(p.beta * (1.0 + p.v) / (p.v * p.alpha));
    auto density = [&](double x) { return std::exp(evid::studentt_logpdf(x, p)); };
    const double total =
        integrate(density, p.x_hat - 50.0 * scale, p.x_hat + 50.0 * scale, 1e-12, 36);
    CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("studentt_logpdf matches the 2-D quadrature of the NIG mixture") {
    const evid::NigParams p{0.3, 1.2, 3.0, 0.8};
    const double scale = std::sqrt(p.beta * (1.0 + p.v) / (p.v * p.alpha));
    const double probes[5] = {p.x_hat - 3.0 * scale, p.x_hat - scale, p.x_hat,
                              p.x_hat + 0.5 * scale, p.x_hat + 2.0 * scale};
    for (double x : probes) {
        const double closed = std::exp(evid::studentt_logpdf(x, p));
        const double numeric = nig_marginal_quadrature(x, p);
        CHECK(rel_err(closed, numeric) < 1e-4);
    }
}

TEST_CASE("studentt_logpdf is symmetric about x_hat") {
    const evid::NigParams p{1.5, 0.7, 2.5, 1.1};
    for (double delta : {0.1, 0.9, 3.4, 11.0}) {
        CHECK(evid::studentt_logpdf(p.x_hat + delta, p) ==
              doctest::Approx(evid::studentt_logpdf(p.x_hat - delta, p))
                  .epsilon(1e-12));
    }
    CHECK_THROWS(evid::studentt_logpdf(std::nan(""), p));
}

TEST_CASE("studentt_logpdf is concave within sqrt(nu) scales of the mode") {
    // the log density's curvature flips sign at |x - x_hat| = sqrt(nu)*scale,
    // so the concave window is min(5, sqrt(2*alpha)) scales wide
    for (double alpha : {1.5, 2.0, 4.0, 13.0}) {
        const evid::NigParams p{0.0, 1.0, alpha, 1.0};
        const double scale = std::sqrt(p.beta * (1.0 + p.v) / (p.v * p.alpha));
        const double span = std::min(5.0, 0.98 * std::sqrt(2.0 * alpha));
        const double h = scale / 40.0;
        for (double x = -span * scale; x <= span * scale; x += scale / 10.0) {
            const double second = evid::studentt_logpdf(x - h, p) -
                                  2.0 * evid::studentt_logpdf(x, p) +
                                  evid::studentt_logpdf(x + h, p);
            CHECK(second <= 1e-12);
        }
        // and it is finite well beyond that window
        CHECK(std::isfinite(evid::studentt_logpdf(50.0 * scale, p)));
    }
}

TEST_CASE("regression_loss reduces to the NLL at lambda 0") {
    const evid::NigParams p{0.2, 0.9, 2.4, 1.7};
    const double x = 1.3;
    CHECK(evid::regression_loss(x, p, 0.0) == -evid::studentt_logpdf(x, p));
    // x == x_hat removes the regularizer regardless of v and alpha
    CHECK(evid::regression_loss(p.x_hat, p, 5.0) ==
          -evid::studentt_logpdf(p.x_hat, p));
}

TEST_CASE("regression_loss partials match finite differences") {
    // the documented probe point plus a few random ones
    struct Probe {
        double x;
        evid::NigParams p;
        double lambda;
    };
    std::vector<Probe> probes{{1.0, {0.0, 1.0, 2.0, 1.0}, 0.01}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int i = 0; i < 12; ++i) {
        probes.push_back({u(rng) - 1.5,
                          {u(rng) - 1.5, u(rng), 1.0 + u(rng), u(rng)},
                          i % 3 == 0 ? 0.0 : 0.01 * u(rng)});
    }

    for (const auto& probe : probes) {
        evid::NigGrad grad;
        evid::regression_loss(probe.x, probe.p, probe.lambda, &grad);

        auto loss_at = [&](auto setter) {
            return [&, setter](double value) {
                evid::NigParams q = probe.p;
                setter(q, value);
                return evid::regression_loss(probe.x, q, probe.lambda);
            };
        };
        const double fd_xhat = testutil::central_diff(
            loss_at([](evid::NigParams& q, double v) { q.x_hat = v; }),
            probe.p.x_hat);
        const double fd_v = testutil::central_diff(
            loss_at([](evid::NigParams& q, double v) { q.v = v; }), probe.p.v);
        const double fd_alpha = testutil::central_diff(
            loss_at([](evid::NigParams& q, double v) { q.alpha = v; }),
            probe.p.alpha);
        const double fd_beta = testutil::central_diff(
            loss_at([](evid::NigParams& q, double v) { q.beta = v; }),
            probe.p.beta);

        CHECK(rel_err(grad.d_x_hat, fd_xhat) < 1e-6);
        CHECK(rel_err(grad.d_v, fd_v) < 1e-6);
        CHECK(rel_err(grad.d_alpha, fd_alpha) < 1e-6);
        CHECK(rel_err(grad.d_beta, fd_beta) < 1e-6);
    }
}

TEST_CASE("nig_uncertainties closed form and identity") {
    auto u = evid::nig_uncertainties({0.0, 1.0, 2.0, 2.0});
    CHECK(u.epistemic == doctest::Approx(2.0));
    CHECK(u.aleatoric == doctest::Approx(2.0));

    auto confident = evid::nig_uncertainties({0.0, 1e9, 2.0, 2.0});
    CHECK(confident.epistemic < 1e-8);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.2, 4.0);
    for (int i = 0; i < 200; ++i) {
        evid::NigParams p{d(rng), d(rng), 1.0 + d(rng), d(rng)};
        auto pair = evid::nig_uncertainties(p);
        CHECK(pair.epistemic * p.v == doctest::Approx(pair.aleatoric).epsilon(1e-12));
    }
}

TEST_CASE("nig epistemic matches a Monte Carlo draw of the prior") {
    const evid::NigParams p{0.5, 1.5, 4.0, 2.0};
    std::mt19937_64 rng(12345);
    std::gamma_distribution<double> gamma(p.alpha, 1.0 / p.beta);  // precision
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::size_t n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma_sq = 1.0 / gamma(rng);
        const double mu = p.x_hat + normal(rng) * std::sqrt(sigma_sq / p.v);
        sum += mu;
        sum_sq += mu * mu;
    }
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    const double epistemic = evid::nig_uncertainties(p).epistemic;
    CHECK(rel_err(var, epistemic) < 0.02);
}

TEST_CASE("dirichlet probabilities and uncertainty") {
    CHECK(evid::dirichlet_probs({{1.0, 1.0}}) == std::vector<double>{0.5, 0.5});
    auto probs = evid::dirichlet_probs({{2.0, 1.0}});
    CHECK(probs[0] == doctest::Approx(2.0 / 3.0));
    CHECK(probs[1] == doctest::Approx(1.0 / 3.0));

    CHECK(evid::dirichlet_uncertainty({{1.0, 1.0}}) == doctest::Approx(1.0));
    CHECK(evid::dirichlet_uncertainty({{9.0, 1.0}}) == doctest::Approx(0.2));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(1.0, 30.0);
    for (int i = 0; i < 100; ++i) {
        evid::DirichletParams params{{d(rng), d(rng), d(rng)}};
        auto pr = evid::dirichlet_probs(params);
        double total = 0.0;
        for (double v : pr) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

        const double before = evid::dirichlet_uncertainty(params);
        params.alpha[1] += 1.0;
        CHECK(evid::dirichlet_uncertainty(params) < before);
    }
}

TEST_CASE("classification_loss closed form") {
    const double loss =
        evid::classification_loss({1.0, 0.0}, {{2.0, 1.0}});
    CHECK(loss == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // evidence concentrating on the true class drives the loss to zero
    CHECK(evid::classification_loss({1.0, 0.0}, {{1e7, 1.0}}) < 1e-6);

    // the variance term keeps the expected loss above the plain residual
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(1.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        evid::DirichletParams params{{d(rng), d(rng)}};
        const double expected = evid::classification_loss({0.0, 1.0}, params);
        const double plain =
            evid::classification_loss({0.0, 1.0}, params, nullptr, true);
        CHECK(expected >= plain);
    }
}

TEST_CASE("classification_loss partials match finite differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(1.0, 12.0);
    for (int rep = 0; rep < 20; ++rep) {
        evid::DirichletParams params{{d(rng), d(rng), d(rng)}};
        std::vector<double> y{0.0, 0.0, 0.0};
        y[rep % 3] = 1.0;
        for (bool plain : {false, true}) {
            std::vector<double> grad;
            evid::classification_loss(y, params, &grad, plain);
            for (std::size_t j = 0; j < params.alpha.size(); ++j) {
                auto f = [&](double value) {
                    evid::DirichletParams q = params;
                    q.alpha[j] = value;
                    return evid::classification_loss(y, q, nullptr, plain);
                };
                const double fd = testutil::central_diff(f, params.alpha[j]);
                CHECK(rel_err(grad[j], fd) < 1e-6);
            }
        }
    }
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(evid::nig_uncertainties({0.0, -1.0, 2.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(evid::dirichlet_probs({{0.5, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(evid::classification_loss({0.5, 0.5}, {{2.0, 2.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(evid::dirichlet_uncertainty({{2.0}}), std::invalid_argument);
}

TEST_SUITE_END();
