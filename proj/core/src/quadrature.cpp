#include "fracstrip/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>

namespace fracstrip {

namespace {

GaussRule compute_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussRule& gauss_rule(int order) {
    if (order < 1) throw ValidationError("gauss_rule: order must be >= 1");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
    return it->second;
}

std::vector<double> graded_mesh(double a, double b, bool grade_left, bool grade_right,
                                int levels, int splits) {
    std::vector<double> mesh;
    const double span = b - a;
    // Keep cell edges at least ~1e-13*span away from graded endpoints so that
    // integrand evaluations like (b - x)^p stay representable.
    const double floor_width = span * 1e-13;
    auto push_graded = [&](double from, double to, bool towards_to,
                           std::vector<double>& out) {
        // Geometric cells from `from` accumulating at `to` (ratio 1/2).
        double width = std::abs(to - from) / 2.0;
        double edge = from;
        out.push_back(edge);
        const double dir = to > from ? 1.0 : -1.0;
        for (int l = 0; l < levels && width > floor_width; ++l) {
            edge += dir * width;
            out.push_back(edge);
            width /= 2.0;
        }
        out.push_back(to);
        if (!towards_to) std::reverse(out.begin(), out.end());
    };
    if (grade_left && grade_right) {
        const double mid = 0.5 * (a + b);
        std::vector<double> left, right;
        push_graded(mid, a, true, left); // accumulate at a
        std::reverse(left.begin(), left.end());
        push_graded(mid, b, true, right); // accumulate at b
        mesh = left;
        mesh.insert(mesh.end(), right.begin() + 1, right.end());
    } else if (grade_right) {
        push_graded(a, b, true, mesh);
    } else if (grade_left) {
        std::vector<double> rev;
        push_graded(b, a, true, rev);
        std::reverse(rev.begin(), rev.end());
        mesh = rev;
    } else {
        mesh = {a, b};
    }
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
    if (splits > 0) {
        std::vector<double> fine;
        fine.reserve(mesh.size() << splits);
        const int parts = 1 << splits;
        for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
            for (int p = 0; p < parts; ++p)
                fine.push_back(mesh[i] + (mesh[i + 1] - mesh[i]) * p / parts);
        }
        fine.push_back(mesh.back());
        return fine;
    }
    return mesh;
}

SmoothAntiderivative::SmoothAntiderivative(const std::function<double(double)>& f, double lo,
                                           double hi, int panels, int degree)
    : lo_(lo), hi_(hi), panels_(panels), degree_(degree) {
    if (!(hi > lo)) throw ValidationError("SmoothAntiderivative: need hi > lo");
    if (panels < 1 || degree < 2) throw ValidationError("SmoothAntiderivative: bad resolution");
    panel_width_ = (hi - lo) / panels;
    const int n = degree;
    coeffs_.assign(static_cast<std::size_t>(panels) * (n + 2), 0.0);
    prefix_.assign(panels + 1, 0.0);

    std::vector<double> theta(n + 1), fv(n + 1), c(n + 1);
    for (int k = 0; k <= n; ++k) theta[k] = std::numbers::pi * k / n;

    for (int p = 0; p < panels_; ++p) {
        const double a = lo_ + p * panel_width_;
        const double b = a + panel_width_;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        // Values at Chebyshev-Lobatto points, then interpolation coefficients
        // (c_0 doubled so the series reads f = c_0/2 + sum c_j T_j).
        for (int k = 0; k <= n; ++k) fv[k] = f(mid + half * std::cos(theta[k]));
        for (int j = 0; j <= n; ++j) {
            double s = 0.5 * (fv[0] + (j % 2 == 0 ? fv[n] : -fv[n]));
            for (int k = 1; k < n; ++k) s += fv[k] * std::cos(j * theta[k]);
            c[j] = 2.0 * s / n;
        }
        c[n] *= 0.5;
        // Antiderivative coefficients A_j, j = 1..n+1 (A_0 fixed by P(-1)=0).
        double* A = &coeffs_[static_cast<std::size_t>(p) * (n + 2)];
        for (int j = 1; j <= n + 1; ++j) {
            const double cm = c[j - 1];
            const double cp = (j + 1 <= n) ? c[j + 1] : 0.0;
            A[j] = (cm - cp) / (2.0 * j);
        }
        double at_minus1 = 0.0, at_plus1 = 0.0;
        for (int j = 1; j <= n + 1; ++j) {
            at_minus1 += (j % 2 == 0 ? A[j] : -A[j]);
            at_plus1 += A[j];
        }
        A[0] = -at_minus1;
        prefix_[p + 1] = prefix_[p] + half * (A[0] + at_plus1);
    }
}

double SmoothAntiderivative::operator()(double x) const {
    if (x < lo_ - 1e-12 * (hi_ - lo_) || x > hi_ + 1e-12 * (hi_ - lo_))
        throw ValidationError("SmoothAntiderivative: argument outside [lo, hi]");
    x = std::clamp(x, lo_, hi_);
    int p = static_cast<int>((x - lo_) / panel_width_);
    p = std::clamp(p, 0, panels_ - 1);
    const double a = lo_ + p * panel_width_;
    const double u = std::clamp(2.0 * (x - a) / panel_width_ - 1.0, -1.0, 1.0);
    const double* A = &coeffs_[static_cast<std::size_t>(p) * (degree_ + 2)];
    // Clenshaw over A_0..A_{n+1}.
    double b1 = 0.0, b2 = 0.0;
    for (int j = degree_ + 1; j >= 1; --j) {
        const double b0 = A[j] + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    const double val = A[0] + u * b1 - b2;
    return prefix_[p] + 0.5 * panel_width_ * val;
}

} // namespace fracstrip
