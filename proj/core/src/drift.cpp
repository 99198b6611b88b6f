#include "fracstrip/drift.hpp"

#include <cmath>

#include "fracstrip/errors.hpp"

namespace fracstrip {

LinearDrift::LinearDrift(std::function<double(double)> a, double a0, double a1, double horizon,
                         std::function<double(double)> a_prime, int audit_points)
    : a_(std::move(a)), a0_(a0), a1_(a1), horizon_(horizon) {
    if (!(a0 > 0.0)) throw ValidationError("LinearDrift: a0 must be > 0");
    if (a1 < 0.0) throw ValidationError("LinearDrift: a1 must be >= 0");
    if (!(horizon > 0.0)) throw ValidationError("LinearDrift: horizon must be > 0");

    const double slack = 1e-9 * (1.0 + a0 + a1);
    const double fd_step = horizon / (64.0 * audit_points);
    for (int i = 0; i <= audit_points; ++i) {
        const double t = horizon * i / audit_points;
        const double at = a_(t);
        if (!(at <= -a0 + slack))
            throw ValidationError("LinearDrift: a(" + std::to_string(t) + ") = " +
                                  std::to_string(at) + " violates a(t) <= -a0");
        double da;
        if (a_prime) {
            da = a_prime(t);
        } else {
            const double tl = std::max(0.0, t - fd_step);
            const double tr = std::min(horizon, t + fd_step);
            da = (a_(tr) - a_(tl)) / (tr - tl);
        }
        if (std::abs(da) > a1 + 1e-6 * (1.0 + a1))
            throw ValidationError("LinearDrift: |a'(" + std::to_string(t) + ")| = " +
                                  std::to_string(std::abs(da)) + " exceeds a1");
    }

    const int panels = std::max(64, static_cast<int>(horizon * 32.0));
    antiderivative_ = std::make_shared<SmoothAntiderivative>(a_, 0.0, horizon, panels, 16);
}

double LinearDrift::alpha(double t, double u) const {
    if (u > t) throw ValidationError("LinearDrift::alpha: need u <= t");
    if (u == t) return 0.0;
    return (*antiderivative_)(t) - (*antiderivative_)(u);
}

LinearDrift LinearDrift::constant(double value, double horizon) {
    if (!(value < 0.0)) throw ValidationError("LinearDrift::constant: value must be negative");
    return LinearDrift([value](double) { return value; }, -value, 0.0, horizon,
                       [](double) { return 0.0; });
}

LinearDrift LinearDrift::sinusoid(double base, double amp, double omega, double horizon) {
    if (!(base > std::abs(amp)))
        throw ValidationError("LinearDrift::sinusoid: need base > |amp| for a(t) <= -a0 < 0");
    auto fn = [base, amp, omega](double t) { return -(base + amp * std::sin(omega * t)); };
    auto dfn = [amp, omega](double t) { return -amp * omega * std::cos(omega * t); };
    return LinearDrift(fn, base - std::abs(amp), std::abs(amp * omega), horizon, dfn);
}

NonlinearDrift::NonlinearDrift(std::function<double(double, double)> f,
                               std::function<double(double, double)> df_dx, double M, double d,
                               double horizon, AuditBox box)
    : f_(std::move(f)), df_(std::move(df_dx)), m_(M), d_(d), horizon_(horizon) {
    if (m_ < 0.0) throw ValidationError("NonlinearDrift: M must be >= 0");
    if (!(d_ > 0.0)) throw ValidationError("NonlinearDrift: d must be > 0");
    if (!(horizon > 0.0)) throw ValidationError("NonlinearDrift: horizon must be > 0");

    for (int i = 0; i < box.t_points; ++i) {
        const double t = horizon * i / (box.t_points - 1);
        for (int j = 0; j < box.x_points; ++j) {
            const double x = box.x_lo + (box.x_hi - box.x_lo) * j / (box.x_points - 1);
            const double hx = 6e-6 * std::max(1.0, std::abs(x));
            const double fd = (f_(t, x + hx) - f_(t, x - hx)) / (2.0 * hx);
            const double an = df_(t, x);
            const double scale = std::max(1.0, std::abs(an));
            if (std::abs(fd - an) > 1e-6 * scale)
                throw ValidationError("NonlinearDrift: df_dx disagrees with finite difference at t=" +
                                      std::to_string(t) + ", x=" + std::to_string(x));
        }
    }
}

NonlinearDrift NonlinearDrift::cubic(double amp, double omega, double horizon) {
    auto f = [amp, omega](double t, double x) { return x - x * x * x + amp * std::sin(omega * t); };
    auto df = [](double, double x) { return 1.0 - 3.0 * x * x; };
    // Near the branch at x ~ -1 (|xbar| <= 1.06 for amp <= 0.25), the Taylor
    // remainder is b(t,y) = -3 xbar y^2 - y^3, so |b| <= (3|xbar| + d) y^2.
    const double d = 0.5;
    const double M = 3.0 * 1.06 + d;
    return NonlinearDrift(std::move(f), std::move(df), M, d, horizon);
}

} // namespace fracstrip
