#include "fracstrip/time_grid.hpp"

#include "fracstrip/errors.hpp"

namespace fracstrip {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_(n_steps), dt_(horizon / static_cast<double>(n_steps)) {
    if (!(horizon > 0.0)) throw ValidationError("TimeGrid: horizon must be > 0");
    if (n_steps == 0) throw ValidationError("TimeGrid: N must be positive");
}

std::vector<double> TimeGrid::all_nodes() const {
    std::vector<double> t(n_ + 1);
    for (std::size_t j = 0; j <= n_; ++j) t[j] = node(j);
    return t;
}

} // namespace fracstrip
