// environments.hpp — spectral-density models, environment states, discrete
// microscopic environments, and the damping/amplifying classification

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdilab/kernels.hpp"

namespace fdilab {

// Parametric damping-kernel spectrum γ̃(ω) = γ₀ (|ω|/Λ)^{s−1} f_cut(|ω|/Λ).
// Ohmic (s = 1) with no cutoff gives a flat γ̃ = γ₀. For sub-ohmic families
// the ω = 0 value diverges; grid builders fill that single point by the same
// even quadratic extrapolation decompose() uses.
class SpectralModel {
public:
    enum class Cutoff { none, exponential, drude, sharp };

    static SpectralModel ohmic(double gamma0, Cutoff cutoff = Cutoff::none,
                               double cutoff_freq = 0.0);
    static SpectralModel sub_ohmic(double exponent, double gamma0, Cutoff cutoff,
                                   double cutoff_freq);
    static SpectralModel supra_ohmic(double exponent, double gamma0, Cutoff cutoff,
                                     double cutoff_freq);

    double damping(double omega) const;

    double exponent() const { return exponent_; }
    double gamma0() const { return gamma0_; }
    Cutoff cutoff() const { return cutoff_; }
    double cutoff_freq() const { return cutoff_freq_; }
    SpectralModel with_gamma0(double gamma0) const;

private:
    SpectralModel(double exponent, double gamma0, Cutoff cutoff, double cutoff_freq);

    double exponent_;
    double gamma0_;
    Cutoff cutoff_;
    double cutoff_freq_;
};

// Statistical state of the environment, defining the scalar FDR kernel κ̃(ω):
//   thermal(T > 0)             κ̃ = ω coth(ω/2T), κ̃(0) = 2T exactly
//   zero_temperature           κ̃ = |ω|
//   negative_temperature(T<0)  κ̃ = ω coth(ω/2T)  (negative for ω ≠ 0)
//   squeezed(T ≥ 0, r)         κ̃ = cosh(2r(|ω|)) · ω coth(ω/2T)
//   classical(T_cl ≥ 0)        κ̃ = 2 T_cl
//   custom                     user-supplied even κ̃(ω)
class EnvironmentState {
public:
    enum class Kind {
        thermal,
        zero_temperature,
        negative_temperature,
        squeezed,
        classical,
        custom
    };

    static EnvironmentState thermal(double temperature);
    static EnvironmentState zero_temperature();
    static EnvironmentState negative_temperature(double temperature);
    static EnvironmentState squeezed(double temperature, double r);
    // r tabulated on |ω| (even), linearly interpolated, clamped at the ends.
    static EnvironmentState squeezed(double temperature,
                                     std::vector<std::pair<double, double>> r_table);
    static EnvironmentState classical(double t_classical);
    static EnvironmentState custom(std::function<double(double)> kappa);

    double kappa(double omega) const;
    Kind kind() const { return kind_; }
    double temperature() const { return temperature_; }

private:
    EnvironmentState() = default;

    Kind kind_ = Kind::thermal;
    double temperature_ = 0.0;
    double squeeze_r_ = 0.0;
    std::vector<std::pair<double, double>> r_table_;
    std::function<double(double)> custom_kappa_;
};

// Finite level list with Hermitian coupling matrix elements per channel.
struct DiscreteEnvironment {
    std::vector<double> levels;                 // energies ε_i
    std::vector<double> probs;                  // p_E(ε_i), Σ = 1
    std::vector<Matrix> couplings;              // per channel: ⟨ε_i|l_n|ε_j⟩
    double broadening = 0.0;                    // Lorentzian half width η

    void validate() const;
    int n_channels() const { return static_cast<int>(couplings.size()); }
};

enum class EnvironmentClass { Damping, Amplifying, Indefinite };

// Phenomenological kernel construction: γ̃ from the model replicated on each
// diagonal channel, ν̃ = κ̃ γ̃, μ̃ = iωγ̃, α̃ = ν̃ − ωγ̃.
KernelSet build_kernels(const SpectralModel& model, const EnvironmentState& state,
                        const FrequencyGrid& grid, int n_channels = 1);

// Cross-correlated channels: γ̃_nm(ω) = mixing_nm · s_n(ω) s_m(ω) with
// s_n = sqrt of the n-th scalar profile, which preserves positivity for
// Hermitian PSD mixing. Throws MixingNotPositive otherwise.
KernelSet build_multichannel(const std::vector<SpectralModel>& models,
                             const EnvironmentState& state, const Matrix& mixing,
                             const FrequencyGrid& grid);

// Microscopic correlation of a discrete environment:
//   α̃_nm(ω) = 2π Σ_ij p_i ⟨ε_i|l_n|ε_j⟩ conj(⟨ε_i|l_m|ε_j⟩) δ_η(ω − ε_ij)
// with δ_η a unit-normalized Lorentzian. Throws BroadeningTooNarrow if
// η < 2·grid spacing.
MatrixFunction discrete_correlation(const DiscreteEnvironment& env,
                                    const FrequencyGrid& grid);

// Damping if min eig γ̃(ω) > tol everywhere, Amplifying if max eig < −tol
// everywhere, Indefinite otherwise.
EnvironmentClass classify(const KernelSet& k, double tol = 0.0);

// Random Hermitian matrix with independent Gaussian entries (test/CLI helper;
// deterministic for a fixed seed).
Matrix random_hermitian(int n, std::uint64_t seed);

} // namespace fdilab
