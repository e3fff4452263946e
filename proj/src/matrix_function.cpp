#include "fdilab/matrix_function.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "fdilab/errors.hpp"

namespace fdilab {

MatrixFunction::MatrixFunction(FrequencyGrid grid, int n_channels)
    : grid_(std::move(grid)), n_channels_(n_channels) {
    if (n_channels < 1) throw Error("MatrixFunction: n_channels must be >= 1");
    data_.assign(grid_.size(), Matrix::Zero(n_channels, n_channels));
}

MatrixFunction::MatrixFunction(FrequencyGrid grid, std::vector<Matrix> data)
    : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_.size()) {
        throw Error("MatrixFunction: data length does not match grid");
    }
    if (data_.empty() || data_[0].rows() == 0) {
        throw Error("MatrixFunction: empty data");
    }
    n_channels_ = static_cast<int>(data_[0].rows());
    for (const auto& m : data_) {
        if (m.rows() != n_channels_ || m.cols() != n_channels_) {
            throw Error("MatrixFunction: matrices must all be N×N");
        }
    }
}

MatrixFunction MatrixFunction::from_scalar(const FrequencyGrid& grid,
                                           const std::function<double(double)>& f,
                                           int n_channels) {
    MatrixFunction out(grid, n_channels);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double v = f(grid[k]);
        for (int c = 0; c < n_channels; ++c) out[k](c, c) = v;
    }
    return out;
}

Matrix MatrixFunction::value_at(double omega) const {
    const double w_max = grid_.omega_max();
    if (omega < -w_max || omega > w_max) {
        throw OffGrid("MatrixFunction: ω = " + std::to_string(omega) +
                      " outside [−" + std::to_string(w_max) + ", " + std::to_string(w_max) + "]");
    }
    const double pos = (omega + w_max) / grid_.spacing();
    const auto k0 = static_cast<std::size_t>(std::floor(pos));
    if (k0 + 1 >= grid_.size()) return data_.back();
    const double frac = pos - static_cast<double>(k0);
    return (1.0 - frac) * data_[k0] + frac * data_[k0 + 1];
}

double MatrixFunction::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& m : data_) {
        const double d = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (d > worst) worst = d;
    }
    return worst;
}

double MatrixFunction::max_norm() const {
    double worst = 0.0;
    for (const auto& m : data_) {
        const double d = m.cwiseAbs().maxCoeff();
        if (d > worst) worst = d;
    }
    return worst;
}

void MatrixFunction::require_same_grid(const MatrixFunction& other, const char* where) const {
    if (!(grid_ == other.grid_)) {
        throw GridMismatch(std::string(where) + ": matrix functions live on different grids");
    }
    if (n_channels_ != other.n_channels_) {
        throw GridMismatch(std::string(where) + ": channel counts differ");
    }
}

TimeKernel::TimeKernel(double dt, std::size_t n_half, int n_channels)
    : dt_(dt), n_half_(n_half), n_channels_(n_channels) {
    if (!(dt > 0.0)) throw Error("TimeKernel: dt must be positive");
    if (n_channels < 1) throw Error("TimeKernel: n_channels must be >= 1");
    data_.assign(2 * n_half_ + 1, Matrix::Zero(n_channels, n_channels));
}

} // namespace fdilab
