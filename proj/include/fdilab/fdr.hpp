// fdr.hpp — fluctuation-dissipation inequality checks and FDR kernel extraction

#pragma once

#include <cstdint>
#include <vector>

#include "fdilab/environments.hpp"
#include "fdilab/kernels.hpp"

namespace fdilab {

// Per-frequency margins of ν̃(ω) ≥ ±ωγ̃(ω):
//   margin_plus  = λ_min(ν̃(ω) − ωγ̃(ω))
//   margin_minus = λ_min(ν̃(ω) + ωγ̃(ω))
struct FdiReport {
    std::vector<double> omegas;
    std::vector<double> margin_plus;
    std::vector<double> margin_minus;
    double worst_margin = 0.0;
    double tol = 0.0;
    bool passed = false;
    std::vector<double> violating_frequencies;

    double margin(std::size_t k) const {
        return std::min(margin_plus[k], margin_minus[k]);
    }
};

// Hermitian N×N FDR kernel per frequency point (1×1 in the scalar case).
struct FdrKernel {
    FrequencyGrid grid;
    std::vector<Matrix> data;

    double scalar(std::size_t k) const { return data[k](0, 0).real(); }
    Matrix value_at(double omega) const;
};

FdiReport fdi_check(const KernelSet& k, double tol = 1e-9);

// κ̃(ω) = ν̃(ω)/γ̃(ω) for one channel. Throws DampingVanishes where
// |γ̃| ≤ 1e−12·max γ̃.
FdrKernel fdr_kernel_scalar(const KernelSet& k);

// Solves ν̃ = ½(κ̃γ̃ + γ̃κ̃) per frequency in γ̃'s eigenbasis:
// κ̃'_ab = 2ν̃'_ab/(g_a + g_b). Throws NotDamping when some g_a ≤ tol.
FdrKernel fdr_kernel_matrix(const KernelSet& k);

// Margins λ_min(κ̃(ω) − |ω|·I); both margin arrays carry the same values.
FdiReport fdi_check_kappa(const FdrKernel& kappa, double tol = 1e-9);

// Single-point Hermitian Lyapunov solve X from nu = ½(X·gamma + gamma·X);
// gamma must be Hermitian positive definite.
Matrix hermitian_lyapunov_solve(const Matrix& nu, const Matrix& gamma);

// Coupling-independence experiment: for n_couplings random Hermitian coupling
// matrices on fixed {levels, probs}, build the broadened correlation on the
// grid, decompose, extract κ̃ = ν̃/γ̃, and record the relative spread of κ̃
// across couplings at grid points within η of a populated transition line
// (the zero-frequency line is excluded; κ̃ is 0/0 there).
struct IndependenceResult {
    std::vector<double> omegas;        // probed grid frequencies
    std::vector<double> spread;        // (max−min)/|mean| of κ̃ across couplings
    std::vector<double> kappa_mean;    // mean κ̃ across couplings
    std::vector<double> line_frequency; // transition energy the point belongs to
    double broadening = 0.0;

    // Spread at the probed frequency nearest ω; throws NoTransitionNearOmega
    // if ω is not within the broadening of any populated line.
    double spread_at(double omega) const;
    double kappa_at(double omega) const;
};

IndependenceResult coupling_independence_test(const std::vector<double>& levels,
                                              const std::vector<double>& probs,
                                              int n_couplings, std::uint64_t seed,
                                              const FrequencyGrid& grid,
                                              double broadening);

} // namespace fdilab
