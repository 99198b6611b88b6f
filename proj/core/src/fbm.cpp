#include "fracstrip/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <cstdio>

#include "fracstrip/errors.hpp"
#include "fracstrip/rng.hpp"

namespace fracstrip {

HurstIndex::HurstIndex(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
        throw ValidationError("HurstIndex: H out of (0,1), got " + std::to_string(value));
}

double fbm_covariance(double t, double s, HurstIndex H) {
    if (t < 0.0 || s < 0.0) throw ValidationError("fbm_covariance: times must be >= 0");
    const double two_h = 2.0 * H.value();
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

namespace {

/// Autocovariance of the fBm increment sequence at lag k (grid spacing dt).
double fgn_autocov(long k, double dt, double two_h) {
    const double ak = static_cast<double>(std::llabs(k));
    return 0.5 * std::pow(dt, two_h) *
           (std::pow(ak + 1.0, two_h) - 2.0 * std::pow(ak, two_h) +
            std::pow(std::abs(ak - 1.0), two_h));
}

} // namespace

FbmSampler::FbmSampler(HurstIndex H, TimeGrid grid, FbmMethod method)
    : hurst_(H), grid_(grid), resolved_(method) {
    switch (method) {
        case FbmMethod::CirculantEmbedding:
            build_circulant();
            break;
        case FbmMethod::Cholesky:
            build_cholesky();
            break;
        case FbmMethod::Auto:
            try {
                build_circulant();
                resolved_ = FbmMethod::CirculantEmbedding;
            } catch (const NumericalError& e) {
                std::fprintf(stderr, "[fracstrip] circulant embedding failed (%s); "
                                     "falling back to dense Cholesky\n", e.what());
                build_cholesky();
                resolved_ = FbmMethod::Cholesky;
            }
            break;
    }
}

void FbmSampler::build_circulant() {
    const std::size_t n = grid_.steps();
    const std::size_t m = next_pow2(2 * n);
    const double two_h = 2.0 * hurst_.value();

    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t lag = std::min(j, m - j);
        c[j] = fgn_autocov(static_cast<long>(lag), grid_.dt(), two_h);
    }
    auto fft = std::make_shared<Fft>(m);
    fft->forward(c);

    double max_eig = 0.0;
    for (const auto& z : c) max_eig = std::max(max_eig, z.real());
    const double tol = 1e-8 * max_eig;

    std::vector<double> eig(m);
    clamped_ = 0;
    for (std::size_t k = 0; k < m; ++k) {
        double lam = c[k].real();
        if (lam < -tol)
            throw NumericalError("fBm circulant embedding has eigenvalue " +
                                 std::to_string(lam) + " < -1e-8*max; covariance not PSD");
        if (lam < 0.0) {
            lam = 0.0;
            ++clamped_;
        }
        eig[k] = lam;
    }
    if (clamped_ > 0)
        std::fprintf(stderr, "[fracstrip] warning: clamped %d slightly negative embedding "
                             "eigenvalues to zero\n", clamped_);

    sym_scale_.resize(m);
    pair_scale_.resize(m);
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        sym_scale_[k] = std::sqrt(eig[k] / (2.0 * dm));
        pair_scale_[k] = std::sqrt(eig[k] / dm);
    }
    fft_ = std::move(fft);
}

void FbmSampler::build_cholesky() {
    const std::size_t n = grid_.steps();
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = grid_.node(i + 1);
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = fbm_covariance(ti, grid_.node(j + 1), hurst_);
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("fBm path covariance is not numerically positive definite");
    Eigen::MatrixXd lower = llt.matrixL();
    chol_.resize(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            chol_[i * n + j] = lower(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

FbmPath FbmSampler::sample(std::uint64_t seed) const {
    const std::size_t n = grid_.steps();
    FbmPath path{grid_, std::vector<double>(n + 1, 0.0)};
    GaussianStream rng(seed);

    if (resolved_ == FbmMethod::Cholesky) {
        std::vector<double> z(n);
        rng.fill_normal(z);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* row = &chol_[i * n];
            for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
            path.values[i + 1] = acc;
        }
        return path;
    }

    // Hermitian-symmetrized synthesis: M draws, one FFT, real output.
    const std::size_t m = fft_->size();
    std::vector<std::complex<double>> y(m);
    y[0] = std::sqrt(2.0) * sym_scale_[0] * rng.normal();
    y[m / 2] = std::sqrt(2.0) * sym_scale_[m / 2] * rng.normal();
    for (std::size_t k = 1; k < m / 2; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        y[k] = std::complex<double>(sym_scale_[k] * a, sym_scale_[k] * b);
        y[m - k] = std::conj(y[k]);
    }
    fft_->forward(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += y[i].real();
        path.values[i + 1] = acc;
    }
    return path;
}

std::pair<FbmPath, FbmPath> FbmSampler::sample_pair(std::uint64_t seed) const {
    if (resolved_ != FbmMethod::CirculantEmbedding)
        throw ValidationError("FbmSampler::sample_pair requires the circulant method");
    const std::size_t n = grid_.steps();
    const std::size_t m = fft_->size();
    GaussianStream rng(seed);
    std::vector<std::complex<double>> y(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        y[k] = std::complex<double>(pair_scale_[k] * a, pair_scale_[k] * b);
    }
    fft_->forward(y);
    FbmPath p1{grid_, std::vector<double>(n + 1, 0.0)};
    FbmPath p2{grid_, std::vector<double>(n + 1, 0.0)};
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc_re += y[i].real();
        acc_im += y[i].imag();
        p1.values[i + 1] = acc_re;
        p2.values[i + 1] = acc_im;
    }
    return {std::move(p1), std::move(p2)};
}

FbmPath sample_fbm(HurstIndex H, const TimeGrid& grid, std::uint64_t seed) {
    return FbmSampler(H, grid).sample(seed);
}

CylindricalFbmSampler::CylindricalFbmSampler(HurstIndex H, int truncation, TimeGrid grid,
                                             FbmMethod method)
    : truncation_(truncation), sampler_(H, grid, method) {
    if (truncation < 0) throw ValidationError("CylindricalFbmSampler: K must be >= 0");
}

FbmPath CylindricalFbmSampler::sample_mode(std::uint64_t seed, int mode_index) const {
    if (mode_index < 0 || mode_index > 2 * truncation_)
        throw ValidationError("CylindricalFbmSampler: mode index out of range");
    return sampler_.sample(derive_seed(seed, static_cast<std::uint64_t>(mode_index)));
}

CylindricalFbmPath CylindricalFbmSampler::sample(std::uint64_t seed) const {
    CylindricalFbmPath out;
    out.truncation = truncation_;
    out.modes.reserve(2 * static_cast<std::size_t>(truncation_) + 1);
    for (int m = 0; m <= 2 * truncation_; ++m) out.modes.push_back(sample_mode(seed, m));
    return out;
}

CylindricalFbmPath sample_cylindrical_fbm(HurstIndex H, int truncation, const TimeGrid& grid,
                                          std::uint64_t seed) {
    return CylindricalFbmSampler(H, truncation, grid).sample(seed);
}

} // namespace fracstrip
