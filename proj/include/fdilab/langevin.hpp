// langevin.hpp — stationary Gaussian noise synthesis and stochastic
// oscillator integration for validating the steady-state predictions

#pragma once

#include <cstdint>
#include <vector>

#include "fdilab/kernels.hpp"
#include "fdilab/qbm.hpp"

namespace fdilab {

// Stationary real Gaussian N-channel noise with two-sided spectrum ν̃(ω),
// synthesized per frequency bin with conjugate symmetry and inverse FFT.
// The synthesis period is the first power of two with at least 2·n_steps
// samples, so returned paths never wrap around the circular correlation.
// Trajectories are materialized on demand from (seed, index)-derived
// streams; the normalization makes the full-period periodogram expectation
// equal ν̃(ω).
class NoiseEnsemble {
public:
    NoiseEnsemble(const MatrixFunction& nu, double dt, std::size_t n_steps,
                  std::size_t n_trajectories, std::uint64_t seed);

    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_trajectories() const { return n_trajectories_; }
    std::uint64_t seed() const { return seed_; }
    int n_channels() const { return n_channels_; }
    std::size_t period() const { return period_; }

    // Path samples for one trajectory: n_channels × n_steps.
    Eigen::MatrixXd trajectory(std::size_t index) const;

    // Ensemble-mean lag autocovariance of channel pair (a, b) up to max_lag,
    // averaged over time and trajectories.
    std::vector<double> autocovariance(int a, int b, std::size_t max_lag) const;

    // Ensemble-mean periodogram of channel a at angular frequency nearest
    // omega, using the leading n_steps window of each trajectory.
    double mean_periodogram(int a, double omega) const;

private:
    double dt_;
    std::size_t n_steps_;
    std::size_t n_trajectories_;
    std::uint64_t seed_;
    int n_channels_;
    std::size_t period_;
    std::vector<Matrix> factors_; // per bin j = 0..period/2: B with B B† = ν̃(Ω_j)/(M dt)
};

NoiseEnsemble generate_noise(const MatrixFunction& nu, double dt, std::size_t n_steps,
                             std::size_t n_trajectories, std::uint64_t seed);

enum class DampingMode { local, memory };

struct SimulateOptions {
    double x0 = 0.0;             // initial displacement, every mode
    double p0 = 0.0;             // initial momentum, every mode
    double burn_in_time = -1.0;  // < 0: 10 relaxation times 10m/λ_min(γ̃(ω₀))
    int n_batches = 20;
    double history_time = -1.0;  // memory mode; < 0: auto-truncate on kernel decay
    double energy_blowup_factor = 1e6;
};

struct TrajectoryStats {
    Eigen::MatrixXd sigma_xx, sigma_xp, sigma_pp;
    Eigen::MatrixXd se_xx, se_xp, se_pp; // batch-mean standard errors
    std::size_t burn_in_steps = 0;
    std::size_t samples_per_trajectory = 0;
    int n_batches = 0;

    // det(σ) of mode 0 for single-mode runs, with a propagated standard error.
    double det_sigma() const;
    double det_sigma_se() const;
};

// Integrates m ẍ + 2∫₀ᵗ γ(t−τ) ẋ(τ) dτ + m ω₀² x = ξ(t) with Heun stepping
// at the noise step dt. Local mode replaces the memory term by γ̃(ω₀) ẋ (the
// resonant effective damping of the one-sided convolution); memory mode keeps
// the discrete convolution over a truncated kernel history. Empirical
// covariances are taken after burn-in with batch-mean errors.
TrajectoryStats simulate(const OscillatorBank& bank, const KernelSet& k,
                         const NoiseEnsemble& noise, DampingMode mode,
                         const SimulateOptions& options = {});

// Single trajectory for diagnostics: returns (x, v) per step, no burn-in
// discard, stepping as in simulate().
struct TrajectoryPath {
    std::vector<double> x;
    std::vector<double> v;
};
TrajectoryPath integrate_single(const OscillatorBank& bank, const KernelSet& k,
                                const NoiseEnsemble& noise, std::size_t index,
                                DampingMode mode, const SimulateOptions& options = {});

struct SweepRow {
    double gamma0 = 0.0;
    double det_empirical = 0.0;
    double det_se = 0.0;
    double det_predicted = 0.0;
};

// Runs simulate() for each coupling strength and tabulates the empirical
// uncertainty product against (κ̃(ω₀)/2ω₀)². Deterministic for a fixed seed.
std::vector<SweepRow> sweep_damping(const OscillatorBank& bank,
                                    const SpectralModel& base_model,
                                    const EnvironmentState& state,
                                    const std::vector<double>& gamma0_list,
                                    const FrequencyGrid& grid, double dt,
                                    std::size_t n_steps, std::size_t n_trajectories,
                                    std::uint64_t seed,
                                    DampingMode mode = DampingMode::local);

} // namespace fdilab
