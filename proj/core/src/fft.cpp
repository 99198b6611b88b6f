#include "fracstrip/fft.hpp"

#include <cmath>
#include <numbers>

#include "fracstrip/errors.hpp"

namespace fracstrip {

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw ValidationError("Fft: length must be a positive power of two");
    rev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        rev_[i] = r;
    }
    // Twiddles for stage of half-length m: tw_[m-1 .. 2m-2] hold w^0..w^{m-1}.
    tw_.resize(n);
    for (std::size_t m = 1; m < n; m <<= 1) {
        const double theta = -std::numbers::pi / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j)
            tw_[m - 1 + j] = std::polar(1.0, theta * static_cast<double>(j));
    }
}

void Fft::transform(std::complex<double>* a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i)
        if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    for (std::size_t m = 1; m < n_; m <<= 1) {
        const std::complex<double>* w = &tw_[m - 1];
        for (std::size_t k = 0; k < n_; k += 2 * m) {
            for (std::size_t j = 0; j < m; ++j) {
                const std::complex<double> wj = inverse ? std::conj(w[j]) : w[j];
                const std::complex<double> t = wj * a[k + j + m];
                a[k + j + m] = a[k + j] - t;
                a[k + j] += t;
            }
        }
    }
}

void Fft::forward(std::complex<double>* a) const { transform(a, false); }
void Fft::backward(std::complex<double>* a) const { transform(a, true); }

} // namespace fracstrip
