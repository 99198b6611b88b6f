#include <doctest.h>

#include <cmath>

#include "fracstrip/errors.hpp"
#include "fracstrip/rng.hpp"
#include "fracstrip/stats.hpp"

using namespace fracstrip;

TEST_CASE("normal quantile round-trips the normal CDF") {
    for (double p : {1e-6, 0.01, 0.025, 0.5, 0.975, 0.99, 1.0 - 1e-6}) {
        const double x = normal_quantile(p);
        const double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(back == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), ValidationError);
}

TEST_CASE("wilson interval brackets the point estimate") {
    const McEstimate e = wilson_interval(3, 1000, 0.95);
    CHECK(e.estimate == doctest::Approx(0.003));
    CHECK(e.ci_low <= e.estimate);
    CHECK(e.ci_high >= e.estimate);
    CHECK(e.ci_low > 0.0);

    // Zero successes still give a sensible upper edge.
    const McEstimate z = wilson_interval(0, 1000, 0.95);
    CHECK(z.estimate == 0.0);
    CHECK(z.ci_low == 0.0);
    CHECK(z.ci_high > 0.0);
    CHECK(z.ci_high < 0.01);
}

TEST_CASE("jackknife variance CI covers the truth for gaussian data") {
    GaussianStream rng(12345);
    std::vector<double> x(20000);
    for (double& v : x) v = 2.0 * rng.normal();
    const McEstimate e = jackknife_variance(x, 0.99);
    CHECK(e.ci_low <= 4.0);
    CHECK(e.ci_high >= 4.0);
    CHECK(e.estimate == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("pairwise sum is exact on integers and order-stable") {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i + 1);
    CHECK(pairwise_sum(x) == 500500.0);
}

TEST_CASE("line fit recovers exact affine data") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) {
        xs.push_back(0.5 * i);
        ys.push_back(3.0 - 2.0 * xs.back());
    }
    const LineFit fit = fit_line(xs, ys);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("two-sample KS accepts same distribution, rejects different") {
    GaussianStream rng(777);
    std::vector<double> a(5000), b(5000), c(5000);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    for (double& v : c) v = rng.normal() + 0.25;
    CHECK_FALSE(ks_two_sample(a, b, 0.01).reject);
    CHECK(ks_two_sample(a, c, 0.01).reject);
}

TEST_CASE("seed derivation separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}
