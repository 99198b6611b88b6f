#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "fracstrip/errors.hpp"

namespace fracstrip {

/// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of the given order (thread-safe).
const GaussRule& gauss_rule(int order);

enum class QuadMethod { GradedGauss, Adaptive };

/// How the variance integrals are evaluated. abs_tol applies to the final
/// returned value; the integrators split it across sub-integrals.
struct QuadratureSpec {
    QuadMethod method = QuadMethod::GradedGauss;
    double abs_tol = 1e-8;
    int max_subdivisions = 200000;
};

namespace detail {

template <class F>
double gauss_cell(const F& f, double a, double b, const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

} // namespace detail

/// Cell boundaries of a ratio-1/2 graded mesh on [a,b], accumulating at the
/// flagged endpoints, with `splits` extra uniform splits per cell.
std::vector<double> graded_mesh(double a, double b, bool grade_left, bool grade_right,
                                int levels, int splits);

/// Graded-mesh Gauss-Legendre: a ratio-1/2 mesh accumulating at the flagged
/// endpoints, order-8 cells, refined by uniform cell splitting until two
/// successive refinements agree within abs_tol.
template <class F>
double integrate_graded(F&& f, double a, double b, bool grade_left, bool grade_right,
                        double abs_tol, int max_subdivisions) {
    if (!(b > a)) return 0.0;
    const GaussRule& g8 = gauss_rule(8);
    double prev = 0.0;
    bool have_prev = false;
    for (int splits = 0;; ++splits) {
        const std::vector<double> mesh = graded_mesh(a, b, grade_left, grade_right, 52, splits);
        if (static_cast<int>(mesh.size()) > max_subdivisions)
            throw NumericalError("integrate_graded: subdivision limit reached before convergence");
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
            sum += detail::gauss_cell(f, mesh[i], mesh[i + 1], g8);
        if (have_prev && std::abs(sum - prev) <= abs_tol) return sum;
        prev = sum;
        have_prev = true;
    }
}

/// Globally adaptive Gauss-Legendre with an embedded 8/16 error estimate and
/// a worst-interval-first refinement queue. `breakpoints` (sorted, spanning
/// [a,b]) seed the initial mesh so that boundary layers are not missed.
template <class F>
double integrate_adaptive(F&& f, const std::vector<double>& breakpoints, double abs_tol,
                          int max_subdivisions) {
    if (breakpoints.size() < 2) throw ValidationError("integrate_adaptive: need >= 2 breakpoints");
    const GaussRule& g8 = gauss_rule(8);
    const GaussRule& g16 = gauss_rule(16);
    struct Cell {
        double a, b, value, err;
        bool operator<(const Cell& o) const { return err < o.err; }
    };
    const double span = breakpoints.back() - breakpoints.front();
    const double min_width = span * 1e-14;
    auto make_cell = [&](double a, double b) {
        const double v8 = detail::gauss_cell(f, a, b, g8);
        const double v16 = detail::gauss_cell(f, a, b, g16);
        return Cell{a, b, v16, std::abs(v16 - v8)};
    };
    std::priority_queue<Cell> queue;
    double total = 0.0, total_err = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Cell c = make_cell(breakpoints[i], breakpoints[i + 1]);
        total += c.value;
        total_err += c.err;
        queue.push(c);
        ++cells;
    }
    std::vector<Cell> frozen; // cells at the width floor, no longer refined
    while (total_err > abs_tol) {
        if (queue.empty() || cells > max_subdivisions)
            throw NumericalError("integrate_adaptive: subdivision limit reached, error " +
                                 std::to_string(total_err) + " > tol " + std::to_string(abs_tol));
        Cell worst = queue.top();
        queue.pop();
        total -= worst.value;
        total_err -= worst.err;
        if (worst.b - worst.a < min_width) {
            // Cannot refine further; account for it as-is.
            total += worst.value;
            total_err += worst.err;
            frozen.push_back(worst);
            // If everything refinable is exhausted, bail out below via queue size.
            if (queue.empty())
                throw NumericalError("integrate_adaptive: width floor reached, error " +
                                     std::to_string(total_err));
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        for (Cell c : {make_cell(worst.a, mid), make_cell(mid, worst.b)}) {
            total += c.value;
            total_err += c.err;
            queue.push(c);
            ++cells;
        }
    }
    return total;
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_subdivisions) {
    return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, abs_tol,
                              max_subdivisions);
}

/// Antiderivative A(x) = \int_lo^x f of a smooth integrand, stored as
/// panel-wise Chebyshev series. Build once, evaluate in O(degree).
class SmoothAntiderivative {
public:
    SmoothAntiderivative(const std::function<double(double)>& f, double lo, double hi,
                         int panels = 64, int degree = 16);

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double x) const;

private:
    double lo_, hi_, panel_width_;
    int panels_, degree_;
    std::vector<double> coeffs_; // (degree+2) antiderivative coefficients per panel
    std::vector<double> prefix_; // integral up to each panel's left edge
};

} // namespace fracstrip
