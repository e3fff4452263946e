// frequency_grid.hpp — symmetric uniform frequency grid containing ω = 0

#pragma once

#include <cstddef>
#include <vector>

namespace fdilab {

// Uniform grid ω_k = (k − (n−1)/2)·Δω, k = 0..n−1, with Δω = 2ω_max/(n−1).
// n_points must be odd so the grid is exactly symmetric about zero and
// contains ω = 0; ω_{n−1−k} = −ω_k holds bitwise.
class FrequencyGrid {
public:
    FrequencyGrid(std::size_t n_points, double omega_max);

    std::size_t size() const { return n_points_; }
    double omega_max() const { return omega_max_; }
    double spacing() const { return delta_; }

    double operator[](std::size_t k) const { return values_[k]; }
    const std::vector<double>& values() const { return values_; }

    // Index of ω = 0.
    std::size_t zero_index() const { return (n_points_ - 1) / 2; }
    // Index of −ω_k.
    std::size_t mirror_index(std::size_t k) const { return n_points_ - 1 - k; }

    // Nearest grid index to omega (clamped to range).
    std::size_t nearest_index(double omega) const;

    bool operator==(const FrequencyGrid& other) const {
        return n_points_ == other.n_points_ && omega_max_ == other.omega_max_;
    }

private:
    std::size_t n_points_;
    double omega_max_;
    double delta_;
    std::vector<double> values_;
};

} // namespace fdilab
