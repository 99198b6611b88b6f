#include "fracstrip/bounds.hpp"

#include <cmath>

#include "fracstrip/errors.hpp"

namespace fracstrip {

void BoundParams::validate() const {
    if (!(k0 > 0.0)) throw ValidationError("BoundParams: K0 must be > 0");
    if (r1 < 0.0 || r2 < 0.0) throw ValidationError("BoundParams: r1, r2 must be >= 0");
    if (!(c_mode > 0.0)) throw ValidationError("BoundParams: c_mode must be > 0");
    if (!(nu > 0.0)) throw ValidationError("BoundParams: nu must be > 0");
}

double default_eta(HurstIndex H, double s) { return 2.0 * H.value() - s - 0.5; }

double gaussian_sup_tail(double k0, double gamma, double G, double T, double c, double var_sup) {
    if (!(gamma > 0.0 && gamma <= 2.0)) throw ValidationError("gaussian_sup_tail: gamma out of (0,2]");
    if (!(G > 0.0 && T > 0.0 && c > 0.0 && var_sup > 0.0))
        throw ValidationError("gaussian_sup_tail: G, T, c, var_sup must be > 0");
    return k0 * std::pow(G, -1.0 / gamma) * T * std::pow(c, 2.0 / gamma) *
           std::exp(-c * c / (2.0 * var_sup));
}

double kappa(double eps, HurstIndex H, double r2) {
    if (eps < 0.0) throw ValidationError("kappa: eps must be >= 0");
    if (r2 < 0.0) throw ValidationError("kappa: r2 must be >= 0");
    if (r2 * eps >= 1.0)
        throw ValidationError("kappa: r2*eps >= 1 makes the exponent non-positive (vacuous bound)");
    const double two_h = 2.0 * H.value();
    return (1.0 - r2 * eps) / (two_h * std::tgamma(two_h));
}

double prefactor_sde(double T, double h_over_sigma, double a0, HurstIndex H, double k0) {
    if (!(T > 0.0 && h_over_sigma > 0.0 && a0 > 0.0 && k0 > 0.0))
        throw ValidationError("prefactor_sde: all inputs must be > 0");
    return 2.0 * k0 * T * T / a0 * std::pow(h_over_sigma, 1.0 / H.value());
}

namespace {

BoundReport assemble(double prefactor, double rate) {
    BoundReport rep;
    rep.prefactor = prefactor;
    rep.exponent_rate = rate;
    rep.raw = prefactor * std::exp(-rate);
    rep.clipped = rep.raw > 1.0;
    rep.value = rep.clipped ? 1.0 : rep.raw;
    return rep;
}

} // namespace

BoundReport sde_bound(double T, double h, double sigma, double a0, double eps, HurstIndex H,
                      const BoundParams& params) {
    params.validate();
    if (!(sigma > 0.0)) throw ValidationError("sde_bound: sigma must be > 0");
    if (h < 0.0) throw ValidationError("sde_bound: h must be >= 0");
    const double kap = kappa(eps, H, params.r2);
    BoundReport rep;
    if (h == 0.0) {
        rep.prefactor = 0.0;
        rep.exponent_rate = 0.0;
        rep.raw = 1.0;
        rep.value = 1.0;
        rep.clipped = true;
    } else {
        rep = assemble(prefactor_sde(T, h / sigma, a0, H, params.k0),
                       kap * h * h / (2.0 * sigma * sigma));
    }
    rep.inputs = {{"T", T}, {"h", h}, {"sigma", sigma}, {"a0", a0},
                  {"eps", eps}, {"H", H.value()}, {"K0", params.k0}, {"r2", params.r2}};
    return rep;
}

BoundReport sde_bound_nonlinear(double T, double h, double sigma, double a0_bar, double eps,
                                HurstIndex H, double M, const BoundParams& params) {
    if (M < 0.0) throw ValidationError("sde_bound_nonlinear: M must be >= 0");
    if (!(h > 0.0)) throw ValidationError("sde_bound_nonlinear: h must be > 0");
    const double h1 = M * h * h / std::pow(a0_bar, 1.0 + H.value());
    if (h1 >= h)
        throw ValidationError("sde_bound_nonlinear: h too large, nonlinear split h1 = " +
                              std::to_string(h1) + " >= h = " + std::to_string(h));
    const double h0 = h - h1;
    BoundReport rep = sde_bound(T, h0, sigma, a0_bar, eps, H, params);
    rep.h0 = h0;
    rep.h1 = h1;
    rep.inputs["h"] = h;
    rep.inputs["M"] = M;
    return rep;
}

namespace {

/// \int_X^infinity (1+x^2)^{-beta/2} dx, expanded in x^{-2} (X large).
double zeta_tail_integral(double beta, double x) {
    double sum = 0.0;
    double coeff = 1.0; // binomial(-beta/2, j)
    for (int j = 0; j < 6; ++j) {
        sum += coeff * std::pow(x, 1.0 - beta - 2.0 * j) / (beta + 2.0 * j - 1.0);
        coeff *= -(beta / 2.0 + j) / (j + 1.0);
    }
    return sum;
}

struct AngleSeries {
    double total = 0.0;   // sum over all k in Z of <k>^{-beta}
    double head = 0.0;    // partial sum over |k| <= K
    long cutoff = 0;
};

AngleSeries angle_bracket_series(double beta, double tail_tol, long head_terms) {
    AngleSeries out;
    out.head = 1.0;       // k = 0 term, <0> = 1
    double partial = 1.0; // Kahan-compensated below
    double comp = 0.0;
    long k = 1;
    long cutoff = std::max<long>(1024, head_terms);
    while (true) {
        for (; k <= cutoff; ++k) {
            const double term = 2.0 * std::pow(1.0 + static_cast<double>(k) * k, -beta / 2.0);
            const double y = term - comp;
            const double t = partial + y;
            comp = (t - partial) - y;
            partial = t;
            if (k == head_terms) out.head = partial;
        }
        const double x = static_cast<double>(cutoff);
        const double bracket = std::pow(1.0 + x * x, -beta / 2.0); // f(K): gap between the
        const double mid_tail = 2.0 * zeta_tail_integral(beta, x + 0.5);
        if (bracket * 2.0 <= tail_tol * partial || cutoff >= (1L << 26)) {
            out.total = partial + mid_tail;
            out.cutoff = cutoff;
            if (head_terms > cutoff) out.head = out.total;
            return out;
        }
        cutoff *= 2;
    }
}

} // namespace

double q_of_s(HurstIndex H, double s, double eta, double tail_tol) {
    const double two_h = 2.0 * H.value();
    if (!(s > 0.0 && s < two_h - 0.5))
        throw ValidationError("q_of_s: s must lie in (0, 2H - 1/2)");
    if (!(eta > 0.0)) throw ValidationError("q_of_s: eta must be > 0");
    if (!(tail_tol > 0.0)) throw ValidationError("q_of_s: tail_tol must be > 0");
    const double beta = 4.0 * H.value() - 2.0 * s - eta;
    if (beta <= 1.0)
        throw ValidationError("q_of_s: divergent sum, 4H - 2s - eta = " + std::to_string(beta) +
                              " <= 1");
    return 1.0 / angle_bracket_series(beta, tail_tol, 0).total;
}

HkAllocation allocate_hk(double h, double s, HurstIndex H, double eta, int K, double tail_tol) {
    if (!(h > 0.0)) throw ValidationError("allocate_hk: h must be > 0");
    if (K < 0) throw ValidationError("allocate_hk: K must be >= 0");
    const double two_h = 2.0 * H.value();
    if (!(s > 0.0 && s < two_h - 0.5))
        throw ValidationError("allocate_hk: s must lie in (0, 2H - 1/2)");
    if (!(eta > 0.0)) throw ValidationError("allocate_hk: eta must be > 0");
    const double beta = 4.0 * H.value() - 2.0 * s - eta;
    if (beta <= 1.0) throw ValidationError("allocate_hk: divergent sum, 4H - 2s - eta <= 1");

    const AngleSeries series = angle_bracket_series(beta, tail_tol, K);
    const double q = 1.0 / series.total;
    HkAllocation alloc;
    alloc.hk.resize(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        const double bracket = std::pow(1.0 + static_cast<double>(k) * k, -beta / 2.0);
        alloc.hk[static_cast<std::size_t>(k)] = h * std::sqrt(q * bracket);
    }
    alloc.sum_sq = h * h * q * series.head;
    alloc.deficit = h * h - alloc.sum_sq;
    return alloc;
}

BoundReport spde_bound(double T, double h, double sigma, double s, double a0, double eps,
                       HurstIndex H, const BoundParams& params) {
    params.validate();
    if (!H.spde_admissible()) throw ValidationError("spde_bound: requires H > 1/4");
    if (!(sigma > 0.0)) throw ValidationError("spde_bound: sigma must be > 0");
    if (!(a0 > 0.0)) throw ValidationError("spde_bound: a0 must be > 0");
    if (h < 0.0) throw ValidationError("spde_bound: h must be >= 0");
    const double eta = params.eta > 0.0 ? params.eta : default_eta(H, s);
    const double q = q_of_s(H, s, eta);
    const double kap = kappa(eps, H, params.r2);
    BoundReport rep;
    if (h == 0.0) {
        rep.prefactor = 0.0;
        rep.exponent_rate = 0.0;
        rep.raw = 1.0;
        rep.value = 1.0;
        rep.clipped = true;
    } else {
        const double pref = 2.0 * params.k0 * T * T * a0 * a0 *
                            std::pow(std::sqrt(q) * h / sigma, 1.0 / H.value());
        rep = assemble(pref, kap * q * h * h / (2.0 * sigma * sigma));
    }
    rep.inputs = {{"T", T},   {"h", h},   {"sigma", sigma}, {"s", s},
                  {"a0", a0}, {"eps", eps}, {"H", H.value()}, {"K0", params.k0},
                  {"r2", params.r2}, {"eta", eta}, {"Q", q}};
    return rep;
}

BoundReport spde_bound_nonlinear(double T, double h, double sigma, double s, double a0_bar,
                                 double eps, HurstIndex H, double M, double cprime, double q,
                                 double r, const BoundParams& params) {
    if (M < 0.0) throw ValidationError("spde_bound_nonlinear: M must be >= 0");
    if (!(cprime > 0.0)) throw ValidationError("spde_bound_nonlinear: cprime must be > 0");
    if (!(h > 0.0)) throw ValidationError("spde_bound_nonlinear: h must be > 0");
    const double two_h = 2.0 * H.value();
    if (!(r > 0.0 && r < two_h - 0.5))
        throw ValidationError("spde_bound_nonlinear: r must lie in (0, 2H - 1/2)");
    if (!(q < r + 2.0)) throw ValidationError("spde_bound_nonlinear: need q < r + 2");
    const double nu = 1.0 - (q - r) / 2.0;
    if (!(nu > 0.0)) throw ValidationError("spde_bound_nonlinear: nu = 1 - (q-r)/2 must be > 0");

    const double h1 = cprime * std::pow(eps, (q - r) / 2.0 - 1.0) * M * h * h;
    if (h1 >= h)
        throw ValidationError("spde_bound_nonlinear: h too large, h1 = " + std::to_string(h1) +
                              " >= h = " + std::to_string(h));
    const double h0 = h - h1;
    BoundReport rep = spde_bound(T, h0, sigma, s, a0_bar, eps, H, params);
    rep.h0 = h0;
    rep.h1 = h1;
    rep.nu = nu;
    rep.inputs["h"] = h;
    rep.inputs["M"] = M;
    rep.inputs["cprime"] = cprime;
    rep.inputs["q"] = q;
    rep.inputs["r"] = r;
    return rep;
}

} // namespace fracstrip
