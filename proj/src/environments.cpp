#include "fdilab/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "fdilab/errors.hpp"

namespace fdilab {

namespace {

constexpr Complex kImag{0.0, 1.0};

// ω coth(ω/2T) with the exact ω = 0 limit 2T; T = 0 means |ω|.
double thermal_kappa(double temperature, double omega) {
    if (temperature == 0.0) return std::abs(omega);
    if (omega == 0.0) return 2.0 * temperature;
    return omega / std::tanh(omega / (2.0 * temperature));
}

// Unit-normalized Lorentzian of half width η.
double lorentzian(double x, double eta) {
    return eta / (std::numbers::pi * (x * x + eta * eta));
}

// Fill the ω = 0 entry of a frequency-sampled damping profile when the model
// diverges there (sub-ohmic): even quadratic through ±Δω, ±2Δω.
void patch_zero_point(std::vector<double>& g, std::size_t z) {
    if (std::isfinite(g[z])) return;
    if (g.size() >= 5) {
        const double g1 = 0.5 * (g[z + 1] + g[z - 1]);
        const double g2 = 0.5 * (g[z + 2] + g[z - 2]);
        g[z] = (4.0 * g1 - g2) / 3.0;
    } else {
        g[z] = 0.5 * (g[z + 1] + g[z - 1]);
    }
}

std::vector<double> sample_damping(const SpectralModel& model, const FrequencyGrid& grid) {
    std::vector<double> g(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) g[k] = model.damping(grid[k]);
    patch_zero_point(g, grid.zero_index());
    return g;
}

} // namespace

// ----------------------------- SpectralModel --------------------------------

SpectralModel::SpectralModel(double exponent, double gamma0, Cutoff cutoff,
                             double cutoff_freq)
    : exponent_(exponent), gamma0_(gamma0), cutoff_(cutoff), cutoff_freq_(cutoff_freq) {
    if (!(exponent_ > 0.0)) throw Error("SpectralModel: exponent must be > 0");
    if (cutoff_ != Cutoff::none && !(cutoff_freq_ > 0.0)) {
        throw Error("SpectralModel: cutoff frequency must be > 0");
    }
    // With no cutoff the power law still needs a reference frequency; the
    // shared unit system makes Λ = 1 the natural choice.
    if (cutoff_ == Cutoff::none && cutoff_freq_ <= 0.0) cutoff_freq_ = 1.0;
}

SpectralModel SpectralModel::ohmic(double gamma0, Cutoff cutoff, double cutoff_freq) {
    return SpectralModel(1.0, gamma0, cutoff, cutoff_freq);
}

SpectralModel SpectralModel::sub_ohmic(double exponent, double gamma0, Cutoff cutoff,
                                       double cutoff_freq) {
    if (!(exponent < 1.0)) throw Error("SpectralModel: sub-ohmic requires s < 1");
    return SpectralModel(exponent, gamma0, cutoff, cutoff_freq);
}

SpectralModel SpectralModel::supra_ohmic(double exponent, double gamma0, Cutoff cutoff,
                                         double cutoff_freq) {
    if (!(exponent > 1.0)) throw Error("SpectralModel: supra-ohmic requires s > 1");
    return SpectralModel(exponent, gamma0, cutoff, cutoff_freq);
}

SpectralModel SpectralModel::with_gamma0(double gamma0) const {
    SpectralModel m = *this;
    m.gamma0_ = gamma0;
    return m;
}

double SpectralModel::damping(double omega) const {
    const double x = std::abs(omega) / cutoff_freq_;
    double f_cut = 1.0;
    switch (cutoff_) {
        case Cutoff::none: break;
        case Cutoff::exponential: f_cut = std::exp(-x); break;
        case Cutoff::drude: f_cut = 1.0 / (1.0 + x * x); break;
        case Cutoff::sharp: f_cut = x <= 1.0 ? 1.0 : 0.0; break;
    }
    if (exponent_ == 1.0) return gamma0_ * f_cut;
    return gamma0_ * std::pow(x, exponent_ - 1.0) * f_cut;
}

// ---------------------------- EnvironmentState ------------------------------

EnvironmentState EnvironmentState::thermal(double temperature) {
    if (!(temperature > 0.0)) throw Error("EnvironmentState: thermal requires T > 0");
    EnvironmentState s;
    s.kind_ = Kind::thermal;
    s.temperature_ = temperature;
    return s;
}

EnvironmentState EnvironmentState::zero_temperature() {
    EnvironmentState s;
    s.kind_ = Kind::zero_temperature;
    return s;
}

EnvironmentState EnvironmentState::negative_temperature(double temperature) {
    if (!(temperature < 0.0)) {
        throw Error("EnvironmentState: negative_temperature requires T < 0");
    }
    EnvironmentState s;
    s.kind_ = Kind::negative_temperature;
    s.temperature_ = temperature;
    return s;
}

EnvironmentState EnvironmentState::squeezed(double temperature, double r) {
    if (temperature < 0.0) throw Error("EnvironmentState: squeezed requires T >= 0");
    EnvironmentState s;
    s.kind_ = Kind::squeezed;
    s.temperature_ = temperature;
    s.squeeze_r_ = r;
    return s;
}

EnvironmentState EnvironmentState::squeezed(double temperature,
                                            std::vector<std::pair<double, double>> r_table) {
    if (temperature < 0.0) throw Error("EnvironmentState: squeezed requires T >= 0");
    if (r_table.empty()) throw Error("EnvironmentState: empty squeezing table");
    std::sort(r_table.begin(), r_table.end());
    EnvironmentState s;
    s.kind_ = Kind::squeezed;
    s.temperature_ = temperature;
    s.r_table_ = std::move(r_table);
    return s;
}

EnvironmentState EnvironmentState::classical(double t_classical) {
    if (t_classical < 0.0) throw Error("EnvironmentState: classical requires T_cl >= 0");
    EnvironmentState s;
    s.kind_ = Kind::classical;
    s.temperature_ = t_classical;
    return s;
}

EnvironmentState EnvironmentState::custom(std::function<double(double)> kappa) {
    if (!kappa) throw Error("EnvironmentState: custom kappa function is empty");
    EnvironmentState s;
    s.kind_ = Kind::custom;
    s.custom_kappa_ = std::move(kappa);
    return s;
}

double EnvironmentState::kappa(double omega) const {
    switch (kind_) {
        case Kind::thermal:
        case Kind::negative_temperature:
            return thermal_kappa(temperature_, omega);
        case Kind::zero_temperature:
            return std::abs(omega);
        case Kind::squeezed: {
            double r = squeeze_r_;
            if (!r_table_.empty()) {
                const double a = std::abs(omega);
                if (a <= r_table_.front().first) {
                    r = r_table_.front().second;
                } else if (a >= r_table_.back().first) {
                    r = r_table_.back().second;
                } else {
                    auto hi = std::upper_bound(
                        r_table_.begin(), r_table_.end(), std::make_pair(a, 0.0),
                        [](const auto& x, const auto& y) { return x.first < y.first; });
                    auto lo = hi - 1;
                    const double t = (a - lo->first) / (hi->first - lo->first);
                    r = (1.0 - t) * lo->second + t * hi->second;
                }
            }
            return std::cosh(2.0 * r) * thermal_kappa(temperature_, omega);
        }
        case Kind::classical:
            return 2.0 * temperature_;
        case Kind::custom:
            return custom_kappa_(omega);
    }
    return 0.0;
}

// --------------------------- kernel construction ----------------------------

namespace {

KernelSet assemble(const FrequencyGrid& grid, const EnvironmentState& state,
                   std::vector<Matrix> gamma_data) {
    const int nc = static_cast<int>(gamma_data[0].rows());
    MatrixFunction gamma(grid, std::move(gamma_data));
    MatrixFunction nu(grid, nc);
    MatrixFunction mu(grid, nc);
    MatrixFunction alpha(grid, nc);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        nu[k] = state.kappa(w) * gamma[k];
        mu[k] = kImag * w * gamma[k];
        alpha[k] = nu[k] - w * gamma[k];
    }
    return KernelSet{std::move(alpha), std::move(nu), std::move(mu), std::move(gamma)};
}

} // namespace

KernelSet build_kernels(const SpectralModel& model, const EnvironmentState& state,
                        const FrequencyGrid& grid, int n_channels) {
    if (n_channels < 1) throw Error("build_kernels: n_channels must be >= 1");
    const std::vector<double> g = sample_damping(model, grid);
    std::vector<Matrix> gamma(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        gamma[k] = g[k] * Matrix::Identity(n_channels, n_channels);
    }
    return assemble(grid, state, std::move(gamma));
}

KernelSet build_multichannel(const std::vector<SpectralModel>& models,
                             const EnvironmentState& state, const Matrix& mixing,
                             const FrequencyGrid& grid) {
    const int nc = static_cast<int>(models.size());
    if (nc < 1) throw Error("build_multichannel: need at least one model");
    if (mixing.rows() != nc || mixing.cols() != nc) {
        throw MixingNotPositive("build_multichannel: mixing shape does not match channels");
    }
    const double scale = std::max(mixing.cwiseAbs().maxCoeff(), 1e-300);
    if ((mixing - mixing.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw MixingNotPositive("build_multichannel: mixing is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mixing, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-9 * scale) {
        throw MixingNotPositive("build_multichannel: mixing has a negative eigenvalue");
    }

    std::vector<std::vector<double>> profiles(nc);
    for (int c = 0; c < nc; ++c) profiles[c] = sample_damping(models[c], grid);

    std::vector<Matrix> gamma(grid.size());
    Eigen::VectorXd s(nc);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int c = 0; c < nc; ++c) s(c) = std::sqrt(std::max(profiles[c][k], 0.0));
        gamma[k] = mixing.cwiseProduct((s * s.transpose()).cast<Complex>());
    }
    return assemble(grid, state, std::move(gamma));
}

// --------------------------- discrete environments --------------------------

void DiscreteEnvironment::validate() const {
    if (levels.empty()) throw Error("DiscreteEnvironment: empty level list");
    if (probs.size() != levels.size()) {
        throw Error("DiscreteEnvironment: probs and levels differ in length");
    }
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw Error("DiscreteEnvironment: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error("DiscreteEnvironment: probabilities sum to " + std::to_string(total));
    }
    if (couplings.empty()) throw Error("DiscreteEnvironment: no coupling channels");
    const auto dim = static_cast<Eigen::Index>(levels.size());
    for (const auto& l : couplings) {
        if (l.rows() != dim || l.cols() != dim) {
            throw Error("DiscreteEnvironment: coupling shape does not match levels");
        }
        const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
        if ((l - l.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
            throw NonHermitianInput("DiscreteEnvironment: coupling channel not Hermitian");
        }
    }
    if (!(broadening > 0.0)) throw Error("DiscreteEnvironment: broadening must be > 0");
}

MatrixFunction discrete_correlation(const DiscreteEnvironment& env,
                                    const FrequencyGrid& grid) {
    env.validate();
    if (env.broadening < 2.0 * grid.spacing()) {
        throw BroadeningTooNarrow("discrete_correlation: η = " +
                                  std::to_string(env.broadening) + " < 2Δω = " +
                                  std::to_string(2.0 * grid.spacing()));
    }
    const int nc = env.n_channels();
    const auto n_levels = env.levels.size();
    MatrixFunction alpha(grid, nc);

    Eigen::VectorXcd v(nc);
    for (std::size_t i = 0; i < n_levels; ++i) {
        if (env.probs[i] == 0.0) continue;
        for (std::size_t j = 0; j < n_levels; ++j) {
            for (int n = 0; n < nc; ++n) {
                v(n) = env.couplings[n](static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j));
            }
            const Matrix line = (2.0 * std::numbers::pi * env.probs[i]) * (v * v.adjoint());
            const double e_ij = env.levels[i] - env.levels[j];
            for (std::size_t k = 0; k < grid.size(); ++k) {
                alpha[k] += lorentzian(grid[k] - e_ij, env.broadening) * line;
            }
        }
    }
    return alpha;
}

EnvironmentClass classify(const KernelSet& k, double tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    bool all_positive = true;
    bool all_negative = true;
    for (std::size_t i = 0; i < k.gamma.size(); ++i) {
        solver.compute(k.gamma[i], Eigen::EigenvaluesOnly);
        if (!(solver.eigenvalues().minCoeff() > tol)) all_positive = false;
        if (!(solver.eigenvalues().maxCoeff() < -tol)) all_negative = false;
        if (!all_positive && !all_negative) return EnvironmentClass::Indefinite;
    }
    if (all_positive) return EnvironmentClass::Damping;
    if (all_negative) return EnvironmentClass::Amplifying;
    return EnvironmentClass::Indefinite;
}

Matrix random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = Complex(normal(rng), 0.0);
        for (int j = i + 1; j < n; ++j) {
            const Complex z(normal(rng), normal(rng));
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

} // namespace fdilab
