// kernels.hpp — stationary correlation kernels: decomposition, Fourier pair,
// and positivity diagnostics

#pragma once

#include <cstdint>

#include "fdilab/matrix_function.hpp"

namespace fdilab {

// Frequency-domain kernel family of one environment:
//   alpha — complex correlation α̃(ω), Hermitian and positive semidefinite
//   nu    — noise kernel ν̃(ω) = ½[α̃(ω) + α̃ᵀ(−ω)]
//   mu    — dissipation kernel μ̃(ω) = (1/2i)[α̃(ω) − α̃ᵀ(−ω)]
//   gamma — damping kernel γ̃(ω) = μ̃(ω)/(iω)
struct KernelSet {
    MatrixFunction alpha;
    MatrixFunction nu;
    MatrixFunction mu;
    MatrixFunction gamma;

    const FrequencyGrid& grid() const { return alpha.grid(); }
    int n_channels() const { return alpha.n_channels(); }
};

// Split a Hermitian-per-point correlation α̃ into noise/dissipation/damping
// parts. γ̃(0) is filled by an even quadratic fit through the four nearest
// nonzero grid points. Throws NonHermitianInput if the per-point Hermiticity
// defect exceeds tol·max‖α̃‖.
KernelSet decompose(const MatrixFunction& alpha, double tol = 1e-9);

// α̃(ω) = ν̃(ω) − ω·γ̃(ω). Throws GridMismatch if the grids differ.
MatrixFunction reconstruct(const MatrixFunction& nu, const MatrixFunction& gamma);

// Fourier pair with the convention
//   α̃(ω) = ∫ dτ e^{−iωτ} α(τ),   α(t) = (1/2π) ∫ dω e^{+iωt} α̃(ω),
// discretized by trapezoid sums on the respective grids. Throws AliasingRisk
// if dt > π/ω_max. The time window snaps to an integer number of steps.
TimeKernel to_time(const MatrixFunction& f, double t_max, double dt);
MatrixFunction to_frequency(const TimeKernel& k, const FrequencyGrid& grid);

// Monte Carlo probe of the double-integral positivity of a time kernel:
// draws n_trials random complex vector paths f(t) (white Gaussian samples
// smoothed by a 3-point moving average), evaluates
//   Q[f] = ∫∫ f†(τ₁) α(τ₁−τ₂) f(τ₂) dτ₁ dτ₂
// over [0, t_max] by trapezoid rule and returns the minimum of Q/‖f‖²_{L²}.
// The caller must sample the kernel finely enough for the trapezoid
// quadrature to have converged.
double posdef_quadratic_check(const TimeKernel& k, int n_trials, std::uint64_t seed);

// Minimum over the grid of the smallest eigenvalue of f(ω).
// Throws NonHermitianInput if the per-point defect exceeds tol·max‖f‖.
double posdef_spectral_check(const MatrixFunction& f, double tol = 1e-9);

} // namespace fdilab
