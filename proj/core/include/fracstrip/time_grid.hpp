#pragma once

#include <cstddef>
#include <vector>

namespace fracstrip {

/// Uniform grid t_j = j*T/N on [0,T], j = 0..N.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const { return horizon_; }
    std::size_t steps() const { return n_; }
    std::size_t nodes() const { return n_ + 1; }
    double dt() const { return dt_; }

    /// t_0 = 0 and t_N = horizon exactly.
    double node(std::size_t j) const {
        return horizon_ * (static_cast<double>(j) / static_cast<double>(n_));
    }

    std::vector<double> all_nodes() const;

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    std::size_t n_;
    double dt_;
};

} // namespace fracstrip
