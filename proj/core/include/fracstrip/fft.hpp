#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fracstrip {

/// In-place iterative radix-2 FFT with precomputed twiddles.
///
/// All transform lengths in this project are powers of two by construction
/// (circulant embeddings and collocation grids are padded), so a local
/// kernel keeps sampling deterministic and thread-safe without a plan cache.
/// An instance is immutable after construction and can be shared across
/// threads.
class Fft {
public:
    explicit Fft(std::size_t n); // n must be a power of two

    std::size_t size() const { return n_; }

    /// X_k = sum_j x_j exp(-2*pi*i*j*k/n), unscaled.
    void forward(std::complex<double>* a) const;

    /// X_k = sum_j x_j exp(+2*pi*i*j*k/n), unscaled.
    void backward(std::complex<double>* a) const;

    void forward(std::vector<std::complex<double>>& a) const { forward(a.data()); }
    void backward(std::vector<std::complex<double>>& a) const { backward(a.data()); }

private:
    void transform(std::complex<double>* a, bool inverse) const;

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> tw_; // forward twiddles, all stages
};

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace fracstrip
