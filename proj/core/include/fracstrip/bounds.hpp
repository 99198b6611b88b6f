#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracstrip/fbm.hpp"

namespace fracstrip {

/// The implicit constants of the concentration bounds, exposed as
/// configuration: none of them is derivable from the theory alone, so they
/// are defaulted, calibrated, or supplied by the experiment config.
struct BoundParams {
    double k0 = 1.0;      // sup-tail constant K0(gamma); calibrate_k0 pins it
    double r1 = 0.0;      // eps-correction of the variance bound
    double r2 = 0.0;      // eps-correction of the exponent
    double eta = -1.0;    // mode-allocation exponent; <= 0 means 2H - s - 1/2
    double c_mode = 4.0 * 9.869604401089358; // c in mu_k = (a0 + c k^2)^{-1}; (2 pi)^2
    double nu = 1.0;      // h <= h0 * eps^nu scale exponent (echoed in reports)

    void validate() const;
};

/// Default allocation exponent eta = 2H - s - 1/2.
double default_eta(HurstIndex H, double s);

/// One evaluated probability bound. `value` is clipped at 1 (a bound above 1
/// is valid but vacuous); the raw product is retained alongside.
struct BoundReport {
    double prefactor = 0.0;
    double exponent_rate = 0.0; // bound = prefactor * exp(-exponent_rate)
    double raw = 0.0;
    double value = 0.0;         // min(1, raw)
    bool clipped = false;
    std::optional<double> h0;   // nonlinear split, when applicable
    std::optional<double> h1;
    std::optional<double> nu;
    std::map<std::string, double> inputs;
};

/// Tail bound for the supremum of a mean-square Hoelder Gaussian process:
///   K0 * G^{-1/gamma} * T * c^{2/gamma} * exp(-c^2 / (2 var_sup)).
double gaussian_sup_tail(double k0, double gamma, double G, double T, double c, double var_sup);

/// Exponent factor kappa(eps) = (1 - r2*eps) / (2H Gamma(2H)); requires
/// r2*eps < 1 (otherwise the bound is vacuous and the call signals it).
double kappa(double eps, HurstIndex H, double r2);

/// Prefactor 2 K0 T^2 / a0 * (h/sigma)^{1/H} of the linear SDE bound.
double prefactor_sde(double T, double h_over_sigma, double a0, HurstIndex H, double k0);

/// Linear SDE concentration bound:
///   prefactor_sde * exp(-kappa(eps) h^2 / (2 sigma^2)), clipped at 1.
BoundReport sde_bound(double T, double h, double sigma, double a0, double eps, HurstIndex H,
                      const BoundParams& params);

/// Nonlinear SDE bound: h is split as h = h0 + h1 with h1 = M h^2 / a0bar^{1+H}
/// (the nonlinear remainder's reach), and the linear bound is evaluated at h0.
/// Signals h-too-large when h1 >= h.
BoundReport sde_bound_nonlinear(double T, double h, double sigma, double a0_bar, double eps,
                                HurstIndex H, double M, const BoundParams& params);

/// Q(s) = ( sum_{k in Z} <k>^{-(4H-2s-eta)} )^{-1}, the mode-allocation
/// constant. The series is summed directly up to an adaptive cutoff and
/// closed with an integral tail estimate whose bracket guarantees relative
/// error < tail_tol. Requires 4H - 2s - eta > 1 (divergent otherwise).
double q_of_s(HurstIndex H, double s, double eta, double tail_tol = 1e-10);

struct HkAllocation {
    std::vector<double> hk; // h_k for k = 0..K (modes -k and k share h_k)
    double sum_sq = 0.0;    // h_0^2 + 2 sum_{k=1}^K h_k^2
    double deficit = 0.0;   // h^2 - sum_sq, the truncated tail
};

/// Threshold allocation h_k^2 = Q(s) h^2 <k>^{-(4H-2s-eta)} for |k| <= K.
HkAllocation allocate_hk(double h, double s, HurstIndex H, double eta, int K,
                         double tail_tol = 1e-10);

/// Linear SPDE concentration bound in the time-dependent norm:
///   2 K0 T^2 a0^2 (Q(s)^{1/2} h/sigma)^{1/H} * exp(-kappa(eps) Q(s) h^2/(2 sigma^2)),
/// clipped at 1. The vanishing [1 + O(e^{-c1 h^2/sigma^2})] prefactor
/// correction is omitted (c1 is not computable); reports carry the raw value.
BoundReport spde_bound(double T, double h, double sigma, double s, double a0, double eps,
                       HurstIndex H, const BoundParams& params);

/// Nonlinear SPDE bound: h1 = cprime * eps^{(q-r)/2 - 1} * M * h^2 and the
/// linear SPDE bound is evaluated at h0 = h - h1; nu = 1 - (q-r)/2 is
/// recorded. Requires r in (0, 2H-1/2), q < r+2, and h1 < h.
BoundReport spde_bound_nonlinear(double T, double h, double sigma, double s, double a0_bar,
                                 double eps, HurstIndex H, double M, double cprime, double q,
                                 double r, const BoundParams& params);

} // namespace fracstrip
