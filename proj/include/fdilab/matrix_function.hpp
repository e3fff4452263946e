// matrix_function.hpp — matrix-valued functions sampled on frequency or time grids

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fdilab/frequency_grid.hpp"

namespace fdilab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Complex N×N matrix per frequency grid point.
class MatrixFunction {
public:
    MatrixFunction(FrequencyGrid grid, int n_channels);
    MatrixFunction(FrequencyGrid grid, std::vector<Matrix> data);

    // Sample a scalar profile f(ω) onto the diagonal of every channel.
    static MatrixFunction from_scalar(const FrequencyGrid& grid,
                                      const std::function<double(double)>& f,
                                      int n_channels = 1);

    const FrequencyGrid& grid() const { return grid_; }
    int n_channels() const { return n_channels_; }
    std::size_t size() const { return data_.size(); }

    const Matrix& operator[](std::size_t k) const { return data_[k]; }
    Matrix& operator[](std::size_t k) { return data_[k]; }

    // Scalar (1×1) access.
    Complex scalar(std::size_t k) const { return data_[k](0, 0); }

    // Linear interpolation between grid points; throws OffGrid outside range.
    Matrix value_at(double omega) const;

    // max_k ‖f(ω_k) − f(ω_k)†‖∞, as a Hermiticity defect measure.
    double hermiticity_defect() const;
    // max_k ‖f(ω_k)‖∞
    double max_norm() const;

    void require_same_grid(const MatrixFunction& other, const char* where) const;

private:
    FrequencyGrid grid_;
    int n_channels_;
    std::vector<Matrix> data_;
};

// Complex N×N matrix per time sample, uniform on [−t_max, +t_max] with t = 0
// at the center index.
class TimeKernel {
public:
    TimeKernel(double dt, std::size_t n_half, int n_channels);

    double dt() const { return dt_; }
    double t_max() const { return static_cast<double>(n_half_) * dt_; }
    std::size_t size() const { return data_.size(); }
    std::size_t zero_index() const { return n_half_; }
    int n_channels() const { return n_channels_; }

    double time(std::size_t j) const {
        return (static_cast<double>(j) - static_cast<double>(n_half_)) * dt_;
    }

    const Matrix& operator[](std::size_t j) const { return data_[j]; }
    Matrix& operator[](std::size_t j) { return data_[j]; }

    // Sample at lag index l (may be negative), i.e. k(l·dt).
    const Matrix& at_lag(std::ptrdiff_t l) const {
        return data_[static_cast<std::size_t>(l + static_cast<std::ptrdiff_t>(n_half_))];
    }

private:
    double dt_;
    std::size_t n_half_;
    int n_channels_;
    std::vector<Matrix> data_;
};

} // namespace fdilab
