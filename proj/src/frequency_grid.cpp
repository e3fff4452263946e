#include "fdilab/frequency_grid.hpp"

#include <cmath>
#include <string>

#include "fdilab/errors.hpp"

namespace fdilab {

FrequencyGrid::FrequencyGrid(std::size_t n_points, double omega_max)
    : n_points_(n_points), omega_max_(omega_max) {
    if (n_points < 3 || n_points % 2 == 0) {
        throw GridAsymmetric("FrequencyGrid: n_points must be odd and >= 3, got " +
                             std::to_string(n_points));
    }
    if (!(omega_max > 0.0) || !std::isfinite(omega_max)) {
        throw GridAsymmetric("FrequencyGrid: omega_max must be positive and finite");
    }
    delta_ = 2.0 * omega_max_ / static_cast<double>(n_points_ - 1);
    values_.resize(n_points_);
    const auto half = static_cast<std::ptrdiff_t>((n_points_ - 1) / 2);
    for (std::size_t k = 0; k < n_points_; ++k) {
        // integer offset scaled by ω_max/half keeps ±pairs, ω = 0, and the
        // endpoints ±ω_max exact
        const auto offset = static_cast<double>(static_cast<std::ptrdiff_t>(k) - half);
        values_[k] = offset * omega_max_ / static_cast<double>(half);
    }
}

std::size_t FrequencyGrid::nearest_index(double omega) const {
    const double pos = (omega + omega_max_) / delta_;
    if (pos <= 0.0) return 0;
    const auto k = static_cast<std::size_t>(std::lround(pos));
    return k >= n_points_ ? n_points_ - 1 : k;
}

} // namespace fdilab
