#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fracstrip {

/// A Monte Carlo point estimate with a confidence interval. Probability
/// estimates carry a Wilson score interval; variance estimates a jackknife
/// interval. ci_low <= estimate <= ci_high always holds.
struct McEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long replicas = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
};

/// Inverse standard normal CDF (Acklam's rational approximation polished by
/// one Halley step; accurate to ~1e-15 over (0,1)).
double normal_quantile(double p);

/// Wilson score interval for a binomial proportion.
McEstimate wilson_interval(long successes, long trials, double level = 0.95);

/// Sample variance (denominator n-1) with a jackknife confidence interval.
McEstimate jackknife_variance(std::span<const double> sample, double level = 0.95);

/// Pairwise (cascade) summation; the result depends only on the element
/// order, never on the thread count that produced the elements.
double pairwise_sum(std::span<const double> x);

double mean(std::span<const double> x);

/// Least-squares line y ~ intercept + slope*x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    long points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic and the level-alpha critical value
/// c(alpha)*sqrt((n+m)/(n*m)), c(alpha) = sqrt(-ln(alpha/2)/2).
struct KsResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool reject = false;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha);

} // namespace fracstrip
