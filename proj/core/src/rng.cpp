#include "fracstrip/rng.hpp"

#include <cmath>

namespace fracstrip {

double GaussianStream::uniform() {
    // 53-bit mantissa; top bits of the engine output.
    while (true) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

double GaussianStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    while (true) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double m = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * m;
            has_spare_ = true;
            return u * m;
        }
    }
}

void GaussianStream::fill_normal(std::span<double> out) {
    for (double& x : out) x = normal();
}

} // namespace fracstrip
