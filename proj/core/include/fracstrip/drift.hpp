#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fracstrip/quadrature.hpp"

namespace fracstrip {

/// Time-dependent linear drift coefficient a(t) with the uniform-stability
/// data (a0, a1): a(t) <= -a0 and |a'(t)| <= a1 on [0, horizon]. Both claims
/// are checked on a dense audit grid at construction. The antiderivative
/// A(t) = \int_0^t a is precomputed so alpha(t,u) evaluations are cheap.
class LinearDrift {
public:
    LinearDrift(std::function<double(double)> a, double a0, double a1, double horizon,
                std::function<double(double)> a_prime = {}, int audit_points = 512);

    double operator()(double t) const { return a_(t); }
    double a0() const { return a0_; }
    double a1() const { return a1_; }
    double horizon() const { return horizon_; }

    /// alpha(t) = \int_0^t a(s) ds.
    double alpha(double t) const { return (*antiderivative_)(t); }
    /// alpha(t,u) = \int_u^t a(s) ds, 0 <= u <= t <= horizon.
    double alpha(double t, double u) const;

    static LinearDrift constant(double value, double horizon);
    /// a(t) = -(base + amp*sin(omega*t)); requires base > |amp|.
    static LinearDrift sinusoid(double base, double amp, double omega, double horizon);

private:
    std::function<double(double)> a_;
    double a0_, a1_, horizon_;
    std::shared_ptr<const SmoothAntiderivative> antiderivative_;
};

/// Nonlinear drift f(t,x) with its x-derivative and the quadratic-remainder
/// constants (M, d) used by the nonlinear concentration bound: near a stable
/// branch, |f(t, xbar+y) - f(t,xbar) - df(t,xbar) y| <= M y^2 for |y| <= d.
/// The supplied derivative is audited against a central difference.
struct DriftAuditBox {
    double x_lo = -2.0;
    double x_hi = 2.0;
    int t_points = 33;
    int x_points = 65;
};

class NonlinearDrift {
public:
    using AuditBox = DriftAuditBox;

    NonlinearDrift(std::function<double(double, double)> f,
                   std::function<double(double, double)> df_dx, double M, double d,
                   double horizon, AuditBox box = AuditBox{});

    double value(double t, double x) const { return f_(t, x); }
    double slope(double t, double x) const { return df_(t, x); }
    double remainder_m() const { return m_; }
    double remainder_d() const { return d_; }
    double horizon() const { return horizon_; }

    /// f(t,x) = x - x^3 + amp*sin(omega*t), the stable cubic benchmark.
    static NonlinearDrift cubic(double amp, double omega, double horizon);

private:
    std::function<double(double, double)> f_, df_;
    double m_, d_, horizon_;
};

} // namespace fracstrip
