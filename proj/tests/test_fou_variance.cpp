#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracstrip/fou_variance.hpp"

using namespace fracstrip;

namespace {

double brownian_ou_variance(double sigma, double eps, double t) {
    // dx = (1/eps)(-x) dt + (sigma/sqrt(eps)) dW: Var = sigma^2 (1 - e^{-2t/eps}) / 2.
    return sigma * sigma * (1.0 - std::exp(-2.0 * t / eps)) / 2.0;
}

} // namespace

TEST_CASE("alpha against closed forms") {
    const LinearDrift unit = LinearDrift::constant(-1.0, 2.0);
    CHECK(alpha(unit, 1.3, 0.4) == doctest::Approx(-0.9).epsilon(1e-12));
    CHECK(alpha(unit, 0.7, 0.7) == 0.0);

    // a(s) = -(1+s): alpha(1,0) = -(s + s^2/2) |_0^1 = -1.5.
    const LinearDrift affine([](double s) { return -(1.0 + s); }, 1.0, 1.0, 2.0,
                             [](double) { return -1.0; });
    CHECK(alpha(affine, 1.0, 0.0) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(alpha(affine, 1.0, 0.0) <= -affine.a0() * 1.0);
    CHECK_THROWS_AS(alpha(affine, 0.3, 0.5), ValidationError);
}

TEST_CASE("drift audit rejects contract violations") {
    // a(t) crosses above -a0.
    CHECK_THROWS_AS(LinearDrift([](double t) { return -1.0 + 1.2 * t; }, 1.0, 1.3, 1.0),
                    ValidationError);
    // derivative bound too small.
    CHECK_THROWS_AS(LinearDrift([](double t) { return -(2.0 + std::sin(5.0 * t)); }, 1.0, 1.0, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(LinearDrift::sinusoid(0.5, 0.6, 1.0, 1.0), ValidationError);
}

TEST_CASE("exact variance matches the classical OU closed form at H=1/2") {
    const LinearDrift unit = LinearDrift::constant(-1.0, 2.0);
    const HurstIndex h(0.5);
    QuadratureSpec spec;
    for (double eps : {1.0, 0.25}) {
        for (double t : {0.3, 1.0, 2.0}) {
            const double v = variance_exact_double_integral(unit, h, 1.0, eps, t, spec);
            CHECK(v == doctest::Approx(brownian_ou_variance(1.0, eps, t)).epsilon(1e-7));
        }
    }
    CHECK(variance_exact_double_integral(unit, h, 1.0, 0.5, 0.0, spec) == 0.0);
}

TEST_CASE("exact variance agrees between graded and adaptive methods") {
    const LinearDrift drift = LinearDrift::sinusoid(1.0, 0.1, 1.0, 1.0);
    QuadratureSpec graded;
    QuadratureSpec adaptive;
    adaptive.method = QuadMethod::Adaptive;
    for (double hv : {0.3, 0.7}) {
        const HurstIndex h(hv);
        const double vg = variance_exact_double_integral(drift, h, 1.0, 0.05, 0.8, graded);
        const double va = variance_exact_double_integral(drift, h, 1.0, 0.05, 0.8, adaptive);
        CHECK(vg == doctest::Approx(va).epsilon(1e-6));
    }
}

TEST_CASE("variance bound dominates the exact variance") {
    const LinearDrift drift = LinearDrift::sinusoid(1.0, 0.1, 1.0, 1.0);
    QuadratureSpec spec;
    for (double hv : {0.3, 0.5, 0.7}) {
        const HurstIndex h(hv);
        for (double t : {0.25, 0.6, 1.0}) {
            const double exact = variance_exact_double_integral(drift, h, 1.0, 0.02, t, spec);
            const double bound = variance_bound_quadrature(drift, h, 1.0, 0.02, t, spec);
            CHECK(exact <= bound + 1e-6);
        }
    }
    CHECK(variance_bound_quadrature(drift, HurstIndex(0.3), 1.0, 0.02, 0.0, spec) == 0.0);
}

TEST_CASE("asymptotic bound closed forms") {
    const LinearDrift unit = LinearDrift::constant(-1.0, 1.0);
    const HurstIndex h05(0.5);
    // 2H Gamma(2H) = 1 at H = 1/2.
    CHECK(variance_asymptotic(unit, h05, 1.0, 0.3, 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // eps-independence at r1 = 0.
    CHECK(variance_asymptotic(unit, h05, 1.0, 0.001, 0.5, 0.0) ==
          variance_asymptotic(unit, h05, 1.0, 0.9, 0.5, 0.0));

    const LinearDrift two = LinearDrift::constant(-2.0, 1.0);
    const double expected = 0.01 * 1.5 * std::tgamma(1.5) / std::pow(2.0, 1.5);
    CHECK(variance_asymptotic(two, HurstIndex(0.75), 0.1, 0.1, 0.5, 0.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.004700).epsilon(1e-3));
    CHECK_THROWS_AS(variance_asymptotic(unit, h05, 1.0, 0.1, 0.5, -1.0), ValidationError);
}

TEST_CASE("calibrated r1 makes the asymptotic bound dominate") {
    const LinearDrift drift = LinearDrift::sinusoid(1.0, 0.1, 1.0, 1.0);
    QuadratureSpec spec;
    const std::vector<double> ts{0.2, 0.5, 0.8, 1.0};
    const std::vector<double> eps{0.04, 0.02, 0.01};
    for (double hv : {0.3, 0.5, 0.7}) {
        const HurstIndex h(hv);
        const double r1 = calibrate_r1(drift, h, ts, eps, spec);
        CHECK(r1 >= 0.0);
        for (double e : eps)
            for (double t : ts) {
                const double v31 = variance_bound_quadrature(drift, h, 1.0, e, t, spec);
                const double v32 = variance_asymptotic(drift, h, 1.0, e, t, r1);
                CHECK(v31 <= v32 * (1.0 + 1e-10) + 1e-10);
            }
    }
}

TEST_CASE("monte carlo variance: deterministic at sigma=0, OU closed form at H=1/2") {
    const LinearDrift unit = LinearDrift::constant(-1.0, 1.0);
    const HurstIndex h(0.5);

    const McEstimate zero = mc_variance(unit, h, 0.0, 0.1, 1.0, 200, 9);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.ci_low == 0.0);
    CHECK(zero.ci_high == 0.0);

    McVarianceOptions opts;
    const double sigma = 0.3;
    const McEstimate est = mc_variance(unit, h, sigma, 0.1, 1.0, 4000, 1234, opts);
    const double truth = brownian_ou_variance(sigma, 0.1, 1.0);
    CHECK(est.ci_low <= truth);
    CHECK(est.ci_high >= truth);
    CHECK(est.estimate == doctest::Approx(truth).epsilon(0.1));

    CHECK_THROWS_AS(mc_variance(unit, h, 1.0, 0.1, 1.0, 50, 1), ValidationError);
}

TEST_CASE("mc variance is bounded by the integral bound across H") {
    const LinearDrift drift = LinearDrift::sinusoid(1.0, 0.1, 1.0, 1.0);
    QuadratureSpec spec;
    for (double hv : {0.3, 0.7}) {
        const HurstIndex h(hv);
        const McEstimate mc = mc_variance(drift, h, 1.0, 0.05, 0.7, 3000, 77);
        const double exact = variance_exact_double_integral(drift, h, 1.0, 0.05, 0.7, spec);
        const double bound = variance_bound_quadrature(drift, h, 1.0, 0.05, 0.7, spec);
        CHECK(mc.ci_low <= exact);
        CHECK(mc.ci_high >= exact * 0.8);
        CHECK(mc.estimate <= bound + (mc.ci_high - mc.estimate));
    }
}

TEST_CASE("triangle-doubled tensor rule equals full-square evaluation") {
    // Symmetry of the |u-v|^{2H} kernel: summing one triangle (diagonal halved
    // implicitly by symmetry) and doubling reproduces the full tensor sum.
    const LinearDrift drift = LinearDrift::sinusoid(1.0, 0.1, 1.0, 1.0);
    const HurstIndex h(0.35);
    const double eps = 0.3, t = 0.9;
    const GaussRule& g = gauss_rule(32);
    auto weight = [&](double u) { return drift(u) / eps * std::exp(drift.alpha(t, u) / eps); };
    auto kernel = [&](double u, double v) {
        return weight(u) * weight(v) * fbm_covariance(u, v, h);
    };
    std::vector<double> xs(32), ws(32);
    for (int i = 0; i < 32; ++i) {
        xs[i] = 0.5 * t * (1.0 + g.nodes[i]);
        ws[i] = 0.5 * t * g.weights[i];
    }
    double full = 0.0, tri = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double term = ws[i] * ws[j] * kernel(xs[i], xs[j]);
            full += term;
            if (j < i) tri += term;
            if (j == i) tri += 0.5 * term;
        }
    tri *= 2.0;
    CHECK(tri == doctest::Approx(full).epsilon(1e-10));
}
