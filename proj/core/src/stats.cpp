#include "fracstrip/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracstrip/errors.hpp"

namespace fracstrip {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must be in (0,1)");
    // Acklam's approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against erfc.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x -= u / (1.0 + x * u / 2.0);
    return x;
}

McEstimate wilson_interval(long successes, long trials, double level) {
    if (trials <= 0) throw ValidationError("wilson_interval: trials must be positive");
    if (successes < 0 || successes > trials)
        throw ValidationError("wilson_interval: successes out of range");
    const double z = normal_quantile(0.5 + level / 2.0);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    McEstimate est;
    est.estimate = p;
    est.ci_low = std::max(0.0, std::min(p, center - half));
    est.ci_high = std::min(1.0, std::max(p, center + half));
    est.replicas = trials;
    est.level = level;
    return est;
}

double pairwise_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x) {
    if (x.empty()) throw ValidationError("mean: empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

McEstimate jackknife_variance(std::span<const double> sample, double level) {
    const long n = static_cast<long>(sample.size());
    if (n < 3) throw ValidationError("jackknife_variance: need at least 3 samples");
    const double nn = static_cast<double>(n);
    const double s1 = pairwise_sum(sample);
    std::vector<double> sq(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) sq[i] = sample[i] * sample[i];
    const double s2 = pairwise_sum(sq);
    const double m = s1 / nn;
    const double var_hat = std::max(0.0, (s2 - nn * m * m) / (nn - 1.0));

    // Leave-one-out variances in O(n) from the two power sums.
    std::vector<double> loo(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double x = sample[i];
        const double m_i = (s1 - x) / (nn - 1.0);
        const double ss_i = (s2 - x * x) - (nn - 1.0) * m_i * m_i;
        loo[i] = std::max(0.0, ss_i / (nn - 2.0));
    }
    const double loo_mean = mean(loo);
    double acc = 0.0;
    for (double v : loo) acc += (v - loo_mean) * (v - loo_mean);
    const double jack_var = (nn - 1.0) / nn * acc;
    const double se = std::sqrt(jack_var);
    const double z = normal_quantile(0.5 + level / 2.0);

    McEstimate est;
    est.estimate = var_hat;
    est.ci_low = std::max(0.0, var_hat - z * se);
    est.ci_high = var_hat + z * se;
    est.replicas = n;
    est.level = level;
    return est;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("fit_line: need matched samples of size >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.points = static_cast<long>(x.size());
    return fit;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
    if (a.empty() || b.empty()) throw ValidationError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult res;
    res.statistic = d;
    res.critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((na + nb) / (na * nb));
    res.reject = d > res.critical;
    return res;
}

} // namespace fracstrip
