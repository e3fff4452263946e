#include "fdilab/langevin.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fftw3.h>

#include "fdilab/errors.hpp"

namespace fdilab {

namespace {

// splitmix64-style stream derivation for per-trajectory seeds
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Hermitian PSD square root with tiny negative eigenvalues clamped to zero.
Matrix psd_factor(const Matrix& s, double tol_scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    const Eigen::VectorXd ev = solver.eigenvalues();
    if (ev.minCoeff() < -tol_scale) {
        throw SpectrumNotPositive("generate_noise: spectrum eigenvalue " +
                                  std::to_string(ev.minCoeff()) + " below tolerance");
    }
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() *
           solver.eigenvectors().adjoint();
}

} // namespace

NoiseEnsemble::NoiseEnsemble(const MatrixFunction& nu, double dt, std::size_t n_steps,
                             std::size_t n_trajectories, std::uint64_t seed)
    : dt_(dt),
      n_steps_(n_steps),
      n_trajectories_(n_trajectories),
      seed_(seed),
      n_channels_(nu.n_channels()) {
    if (!(dt > 0.0)) throw Error("generate_noise: dt must be positive");
    if (n_steps == 0) throw Error("generate_noise: n_steps must be positive");
    const double nyquist = std::numbers::pi / dt;
    if (nyquist > nu.grid().omega_max() * (1.0 + 1e-12)) {
        throw AliasingRisk("generate_noise: π/dt exceeds the spectrum grid bandwidth");
    }

    period_ = next_pow2(2 * n_steps);
    const std::size_t half = period_ / 2;
    const double bin = 2.0 * std::numbers::pi / (static_cast<double>(period_) * dt);
    const double tol_scale = 1e-9 * std::max(nu.max_norm(), 1e-300);
    const double norm = 1.0 / (static_cast<double>(period_) * dt);

    factors_.resize(half + 1);
    for (std::size_t j = 0; j <= half; ++j) {
        Matrix s = nu.value_at(static_cast<double>(j) * bin) * norm;
        if (j == 0 || j == half) s = s.real().cast<Complex>(); // self-conjugate bins
        factors_[j] = psd_factor(s, tol_scale * norm);
    }
}

NoiseEnsemble generate_noise(const MatrixFunction& nu, double dt, std::size_t n_steps,
                             std::size_t n_trajectories, std::uint64_t seed) {
    return NoiseEnsemble(nu, dt, n_steps, n_trajectories, seed);
}

Eigen::MatrixXd NoiseEnsemble::trajectory(std::size_t index) const {
    if (index >= n_trajectories_) {
        throw Error("NoiseEnsemble: trajectory index out of range");
    }
    const std::size_t m = period_;
    const std::size_t half = m / 2;
    const int nc = n_channels_;

    std::mt19937_64 rng(derive_seed(seed_, index));
    std::normal_distribution<double> normal(0.0, 1.0);

    // spectral coefficients per channel, conjugate-symmetric
    std::vector<std::vector<Complex>> coeff(
        static_cast<std::size_t>(nc), std::vector<Complex>(m, Complex(0.0, 0.0)));
    Eigen::VectorXcd z(nc), c(nc);

    for (std::size_t j = 0; j <= half; ++j) {
        const bool self_conjugate = (j == 0 || j == half);
        if (self_conjugate) {
            for (int a = 0; a < nc; ++a) z(a) = Complex(normal(rng), 0.0);
        } else {
            const double s = 1.0 / std::numbers::sqrt2;
            for (int a = 0; a < nc; ++a) z(a) = Complex(normal(rng) * s, normal(rng) * s);
        }
        c = factors_[j] * z;
        for (int a = 0; a < nc; ++a) {
            coeff[static_cast<std::size_t>(a)][j] = c(a);
            if (!self_conjugate) {
                coeff[static_cast<std::size_t>(a)][m - j] = std::conj(c(a));
            }
        }
    }

    Eigen::MatrixXd out(nc, static_cast<Eigen::Index>(n_steps_));
    std::vector<Complex> buf(m);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    for (int a = 0; a < nc; ++a) {
        std::copy(coeff[static_cast<std::size_t>(a)].begin(),
                  coeff[static_cast<std::size_t>(a)].end(), buf.begin());
        fftw_execute(plan);
        for (std::size_t l = 0; l < n_steps_; ++l) {
            out(a, static_cast<Eigen::Index>(l)) = buf[l].real();
        }
    }
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> NoiseEnsemble::autocovariance(int a, int b, std::size_t max_lag) const {
    std::vector<double> acc(max_lag + 1, 0.0);
    std::vector<double> cnt(max_lag + 1, 0.0);
    for (std::size_t t = 0; t < n_trajectories_; ++t) {
        const Eigen::MatrixXd x = trajectory(t);
        for (std::size_t lag = 0; lag <= max_lag && lag < n_steps_; ++lag) {
            for (std::size_t l = 0; l + lag < n_steps_; ++l) {
                acc[lag] += x(a, static_cast<Eigen::Index>(l + lag)) *
                            x(b, static_cast<Eigen::Index>(l));
                cnt[lag] += 1.0;
            }
        }
    }
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        if (cnt[lag] > 0.0) acc[lag] /= cnt[lag];
    }
    return acc;
}

double NoiseEnsemble::mean_periodogram(int a, double omega) const {
    const auto n = static_cast<double>(n_steps_);
    const double bin = 2.0 * std::numbers::pi / (n * dt_);
    const auto j = static_cast<std::size_t>(std::llround(std::abs(omega) / bin));

    double acc = 0.0;
    for (std::size_t t = 0; t < n_trajectories_; ++t) {
        const Eigen::MatrixXd x = trajectory(t);
        Complex X(0.0, 0.0);
        for (std::size_t l = 0; l < n_steps_; ++l) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(j) *
                                 static_cast<double>(l) / n;
            X += x(a, static_cast<Eigen::Index>(l)) * std::polar(1.0, phase);
        }
        acc += std::norm(X) * dt_ / n;
    }
    return acc / static_cast<double>(n_trajectories_);
}

// ------------------------------- integration --------------------------------

namespace {

struct Integrator {
    const OscillatorBank& bank;
    DampingMode mode;
    Eigen::MatrixXd gamma_local;           // γ̃(ω₀), local mode
    std::vector<Eigen::MatrixXd> gamma_s;  // γ(h·dt), memory mode
    double dt;

    // trapezoid-weighted convolution 2·Σ_h w_h γ(h dt) v(t−h dt) dt over the
    // available history; `head` is v at lag 0
    Eigen::VectorXd memory_force(const std::vector<Eigen::VectorXd>& hist,
                                 std::size_t step, const Eigen::VectorXd& head) const {
        const std::size_t depth = std::min(gamma_s.size() - 1, step);
        Eigen::VectorXd acc = 0.5 * (gamma_s[0] * head);
        for (std::size_t h = 1; h <= depth; ++h) {
            const double w = (h == depth) ? 0.5 : 1.0;
            acc += w * (gamma_s[h] * hist[(step - h) % hist.size()]);
        }
        return 2.0 * dt * acc;
    }

    Eigen::VectorXd damping_force(const std::vector<Eigen::VectorXd>& hist,
                                  std::size_t step, const Eigen::VectorXd& head) const {
        if (mode == DampingMode::local) return gamma_local * head;
        return memory_force(hist, step, head);
    }
};

Integrator make_integrator(const OscillatorBank& bank, const KernelSet& k,
                           DampingMode mode, double dt,
                           const SimulateOptions& options) {
    Integrator in{bank, mode, {}, {}, dt};
    const Matrix gamma_w0 = k.gamma.value_at(bank.frequency);
    in.gamma_local = gamma_w0.real();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(in.gamma_local,
                                                          Eigen::EigenvaluesOnly);
    if (!(solver.eigenvalues().minCoeff() > 0.0)) {
        throw NotDamping("simulate: γ̃(ω₀) not positive definite");
    }

    if (mode == DampingMode::memory) {
        double history = options.history_time;
        const std::size_t scan_max = 4096;
        const auto scan_half = (history > 0.0)
                                   ? static_cast<std::size_t>(std::ceil(history / dt))
                                   : scan_max;
        const TimeKernel gs = to_time(k.gamma, static_cast<double>(scan_half) * dt, dt);
        std::size_t n_keep = scan_half;
        if (history <= 0.0) {
            // auto-truncate at the first decay below 1e−4 of the peak; scanning
            // upward keeps the grid-truncation ripple floor out of the history
            const double g0 = gs.at_lag(0).cwiseAbs().maxCoeff();
            n_keep = scan_half;
            for (std::size_t h = 2; h <= scan_half; ++h) {
                if (gs.at_lag(static_cast<std::ptrdiff_t>(h)).cwiseAbs().maxCoeff() <
                    1e-4 * g0) {
                    n_keep = h;
                    break;
                }
            }
        }
        in.gamma_s.resize(n_keep + 1);
        for (std::size_t h = 0; h <= n_keep; ++h) {
            in.gamma_s[h] = gs.at_lag(static_cast<std::ptrdiff_t>(h)).real();
        }
    }
    return in;
}

} // namespace

double TrajectoryStats::det_sigma() const {
    return sigma_xx(0, 0) * sigma_pp(0, 0) - sigma_xp(0, 0) * sigma_xp(0, 0);
}

double TrajectoryStats::det_sigma_se() const {
    const double a = sigma_pp(0, 0) * se_xx(0, 0);
    const double b = sigma_xx(0, 0) * se_pp(0, 0);
    const double c = 2.0 * sigma_xp(0, 0) * se_xp(0, 0);
    return std::sqrt(a * a + b * b + c * c);
}

TrajectoryStats simulate(const OscillatorBank& bank, const KernelSet& k,
                         const NoiseEnsemble& noise, DampingMode mode,
                         const SimulateOptions& options) {
    bank.validate();
    const int nc = bank.n_modes;
    if (noise.n_channels() != nc || k.n_channels() != nc) {
        throw Error("simulate: channel counts of bank, kernels, and noise must match");
    }
    if (noise.n_trajectories() == 0) throw Error("simulate: no trajectories");

    const double dt = noise.dt();
    const double m = bank.mass;
    const double w0 = bank.frequency;
    Integrator integ = make_integrator(bank, k, mode, dt, options);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gsolve(integ.gamma_local,
                                                          Eigen::EigenvaluesOnly);
    const double rate = gsolve.eigenvalues().minCoeff() / m;
    const double burn_time = options.burn_in_time >= 0.0 ? options.burn_in_time
                                                         : 10.0 / rate;
    const auto burn_steps = static_cast<std::size_t>(std::ceil(burn_time / dt));
    if (burn_steps + 64 > noise.n_steps()) {
        throw Error("simulate: n_steps too short for burn-in of " +
                    std::to_string(burn_steps) + " steps");
    }
    const std::size_t window = noise.n_steps() - burn_steps;

    const int n_batches = options.n_batches;
    const bool batch_by_traj = noise.n_trajectories() >= static_cast<std::size_t>(n_batches);

    struct Accum {
        Eigen::VectorXd sx, sp;
        Eigen::MatrixXd sxx, spp, sxp;
        double count = 0.0;
    };
    std::vector<Accum> batches(static_cast<std::size_t>(n_batches));
    for (auto& b : batches) {
        b.sx = Eigen::VectorXd::Zero(nc);
        b.sp = Eigen::VectorXd::Zero(nc);
        b.sxx = Eigen::MatrixXd::Zero(nc, nc);
        b.spp = Eigen::MatrixXd::Zero(nc, nc);
        b.sxp = Eigen::MatrixXd::Zero(nc, nc);
    }

    const std::size_t hist_size =
        mode == DampingMode::memory ? integ.gamma_s.size() + 1 : 1;
    std::vector<Eigen::VectorXd> hist(hist_size, Eigen::VectorXd::Zero(nc));

    for (std::size_t traj = 0; traj < noise.n_trajectories(); ++traj) {
        const Eigen::MatrixXd xi = noise.trajectory(traj);
        Eigen::VectorXd x = Eigen::VectorXd::Constant(nc, options.x0);
        Eigen::VectorXd v = Eigen::VectorXd::Constant(nc, options.p0 / m);
        for (auto& h : hist) h.setZero();
        hist[0] = v;

        double e_ref = 0.0;
        int checkpoints = 0;
        for (std::size_t l = 0; l + 1 < noise.n_steps(); ++l) {
            const Eigen::VectorXd f0 = xi.col(static_cast<Eigen::Index>(l));
            const Eigen::VectorXd f1 = xi.col(static_cast<Eigen::Index>(l + 1));

            const Eigen::VectorXd d0 = integ.damping_force(hist, l, v);
            const Eigen::VectorXd a0 = (f0 - d0 - m * w0 * w0 * x) / m;
            const Eigen::VectorXd xp = x + dt * v;
            const Eigen::VectorXd vp = v + dt * a0;

            if (mode == DampingMode::memory) hist[(l + 1) % hist.size()] = vp;
            const Eigen::VectorXd d1 = integ.damping_force(hist, l + 1, vp);
            const Eigen::VectorXd a1 = (f1 - d1 - m * w0 * w0 * xp) / m;

            x += 0.5 * dt * (v + vp);
            v += 0.5 * dt * (a0 + a1);
            if (mode == DampingMode::memory) hist[(l + 1) % hist.size()] = v;

            if ((l & 255) == 0) {
                const double energy =
                    0.5 * m * v.squaredNorm() + 0.5 * m * w0 * w0 * x.squaredNorm();
                if (!std::isfinite(energy)) {
                    throw Unstable("simulate: non-finite energy during integration");
                }
                // reference scale settles over the first checkpoints so a
                // single quiet start cannot fake a blowup later
                if (checkpoints < 16) {
                    e_ref = std::max(e_ref, energy);
                    ++checkpoints;
                } else if (energy > options.energy_blowup_factor * std::max(e_ref, 1e-300)) {
                    throw Unstable("simulate: energy grew beyond " +
                                   std::to_string(options.energy_blowup_factor) +
                                   "× its early value");
                }
            }

            const std::size_t step = l + 1;
            if (step >= burn_steps) {
                std::size_t bidx;
                if (batch_by_traj) {
                    bidx = traj * static_cast<std::size_t>(n_batches) /
                           noise.n_trajectories();
                } else {
                    bidx = (step - burn_steps) * static_cast<std::size_t>(n_batches) /
                           window;
                }
                if (bidx >= batches.size()) bidx = batches.size() - 1;
                Accum& b = batches[bidx];
                const Eigen::VectorXd p = m * v;
                b.sx += x;
                b.sp += p;
                b.sxx += x * x.transpose();
                b.spp += p * p.transpose();
                b.sxp += x * p.transpose();
                b.count += 1.0;
            }
        }
    }

    // global means, then batch central moments about them
    Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(nc);
    Eigen::VectorXd mean_p = Eigen::VectorXd::Zero(nc);
    double total = 0.0;
    for (const auto& b : batches) {
        mean_x += b.sx;
        mean_p += b.sp;
        total += b.count;
    }
    mean_x /= total;
    mean_p /= total;

    TrajectoryStats stats;
    stats.burn_in_steps = burn_steps;
    stats.samples_per_trajectory = window;
    stats.n_batches = n_batches;
    stats.sigma_xx = Eigen::MatrixXd::Zero(nc, nc);
    stats.sigma_pp = Eigen::MatrixXd::Zero(nc, nc);
    stats.sigma_xp = Eigen::MatrixXd::Zero(nc, nc);
    stats.se_xx = Eigen::MatrixXd::Zero(nc, nc);
    stats.se_pp = Eigen::MatrixXd::Zero(nc, nc);
    stats.se_xp = Eigen::MatrixXd::Zero(nc, nc);

    std::vector<Eigen::MatrixXd> bxx, bpp, bxp;
    int used = 0;
    for (const auto& b : batches) {
        if (b.count == 0.0) continue;
        const Eigen::MatrixXd cxx = b.sxx / b.count - b.sx / b.count * mean_x.transpose() -
                                    mean_x * (b.sx / b.count).transpose() +
                                    mean_x * mean_x.transpose();
        const Eigen::MatrixXd cpp = b.spp / b.count - b.sp / b.count * mean_p.transpose() -
                                    mean_p * (b.sp / b.count).transpose() +
                                    mean_p * mean_p.transpose();
        const Eigen::MatrixXd cxp = b.sxp / b.count - b.sx / b.count * mean_p.transpose() -
                                    mean_x * (b.sp / b.count).transpose() +
                                    mean_x * mean_p.transpose();
        bxx.push_back(cxx);
        bpp.push_back(cpp);
        bxp.push_back(cxp);
        stats.sigma_xx += cxx;
        stats.sigma_pp += cpp;
        stats.sigma_xp += cxp;
        ++used;
    }
    stats.sigma_xx /= used;
    stats.sigma_pp /= used;
    stats.sigma_xp /= used;
    for (int b = 0; b < used; ++b) {
        stats.se_xx += (bxx[b] - stats.sigma_xx).cwiseAbs2();
        stats.se_pp += (bpp[b] - stats.sigma_pp).cwiseAbs2();
        stats.se_xp += (bxp[b] - stats.sigma_xp).cwiseAbs2();
    }
    const double denom = std::max(used * (used - 1), 1);
    stats.se_xx = (stats.se_xx / denom).cwiseSqrt();
    stats.se_pp = (stats.se_pp / denom).cwiseSqrt();
    stats.se_xp = (stats.se_xp / denom).cwiseSqrt();
    return stats;
}

TrajectoryPath integrate_single(const OscillatorBank& bank, const KernelSet& k,
                                const NoiseEnsemble& noise, std::size_t index,
                                DampingMode mode, const SimulateOptions& options) {
    bank.validate();
    if (bank.n_modes != 1) throw Error("integrate_single: single mode only");
    const double dt = noise.dt();
    const double m = bank.mass;
    const double w0 = bank.frequency;
    Integrator integ = make_integrator(bank, k, mode, dt, options);

    const std::size_t hist_size =
        mode == DampingMode::memory ? integ.gamma_s.size() + 1 : 1;
    std::vector<Eigen::VectorXd> hist(hist_size, Eigen::VectorXd::Zero(1));

    const Eigen::MatrixXd xi = noise.trajectory(index);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, options.x0);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, options.p0 / m);
    hist[0] = v;

    TrajectoryPath path;
    path.x.push_back(x(0));
    path.v.push_back(v(0));
    for (std::size_t l = 0; l + 1 < noise.n_steps(); ++l) {
        const Eigen::VectorXd f0 = xi.col(static_cast<Eigen::Index>(l));
        const Eigen::VectorXd f1 = xi.col(static_cast<Eigen::Index>(l + 1));
        const Eigen::VectorXd d0 = integ.damping_force(hist, l, v);
        const Eigen::VectorXd a0 = (f0 - d0 - m * w0 * w0 * x) / m;
        const Eigen::VectorXd xp = x + dt * v;
        const Eigen::VectorXd vp = v + dt * a0;
        if (mode == DampingMode::memory) hist[(l + 1) % hist.size()] = vp;
        const Eigen::VectorXd d1 = integ.damping_force(hist, l + 1, vp);
        const Eigen::VectorXd a1 = (f1 - d1 - m * w0 * w0 * xp) / m;
        x += 0.5 * dt * (v + vp);
        v += 0.5 * dt * (a0 + a1);
        if (mode == DampingMode::memory) hist[(l + 1) % hist.size()] = v;
        path.x.push_back(x(0));
        path.v.push_back(v(0));
    }
    return path;
}

std::vector<SweepRow> sweep_damping(const OscillatorBank& bank,
                                    const SpectralModel& base_model,
                                    const EnvironmentState& state,
                                    const std::vector<double>& gamma0_list,
                                    const FrequencyGrid& grid, double dt,
                                    std::size_t n_steps, std::size_t n_trajectories,
                                    std::uint64_t seed, DampingMode mode) {
    bank.validate();
    if (bank.n_modes != 1) throw Error("sweep_damping: single mode only");
    std::vector<SweepRow> rows;
    rows.reserve(gamma0_list.size());
    for (std::size_t i = 0; i < gamma0_list.size(); ++i) {
        const SpectralModel model = base_model.with_gamma0(gamma0_list[i]);
        const KernelSet k = build_kernels(model, state, grid);
        const NoiseEnsemble noise =
            generate_noise(k.nu, dt, n_steps, n_trajectories, derive_seed(seed, i));
        const TrajectoryStats stats = simulate(bank, k, noise, mode);

        SweepRow row;
        row.gamma0 = gamma0_list[i];
        row.det_empirical = stats.det_sigma();
        row.det_se = stats.det_sigma_se();
        const double kappa = state.kappa(bank.frequency);
        row.det_predicted = (kappa / (2.0 * bank.frequency)) *
                            (kappa / (2.0 * bank.frequency));
        rows.push_back(row);
    }
    return rows;
}

} // namespace fdilab
