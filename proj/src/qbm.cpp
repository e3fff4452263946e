#include "fdilab/qbm.hpp"

#include <cmath>
#include <string>

#include "fdilab/errors.hpp"

namespace fdilab {

namespace {

double trapezoid_weight(std::size_t j, std::size_t n) {
    return (j == 0 || j + 1 == n) ? 0.5 : 1.0;
}

} // namespace

void OscillatorBank::validate() const {
    if (n_modes < 1) throw Error("OscillatorBank: n_modes must be >= 1");
    if (!(mass > 0.0)) throw Error("OscillatorBank: mass must be > 0");
    if (!(frequency > 0.0)) throw Error("OscillatorBank: frequency must be > 0");
}

PhaseSpaceCovariance steady_state_covariance(const OscillatorBank& bank,
                                             const KernelSet& k) {
    bank.validate();
    if (k.n_channels() != bank.n_modes) {
        throw Error("steady_state_covariance: channel count does not match n_modes");
    }
    const double w0 = bank.frequency;
    if (w0 > k.grid().omega_max()) {
        throw OffGrid("steady_state_covariance: ω₀ = " + std::to_string(w0) +
                      " beyond ω_max");
    }
    const Matrix nu = k.nu.value_at(w0);
    const Matrix gamma = k.gamma.value_at(w0);
    const Matrix kappa = hermitian_lyapunov_solve(nu, gamma);

    PhaseSpaceCovariance cov;
    cov.sigma_pp = (0.5 * bank.mass) * kappa.real();
    cov.sigma_xx = cov.sigma_pp / (bank.mass * w0 * bank.mass * w0);
    cov.sigma_xp = Eigen::MatrixXd::Zero(bank.n_modes, bank.n_modes);
    return cov;
}

std::vector<double> uncertainty_product(const PhaseSpaceCovariance& cov,
                                        const OscillatorBank& bank) {
    bank.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.sigma_pp);
    const Eigen::MatrixXd& u = solver.eigenvectors();
    const Eigen::VectorXd pp = solver.eigenvalues();
    const Eigen::MatrixXd xx = u.transpose() * cov.sigma_xx * u;
    const Eigen::MatrixXd xp = u.transpose() * cov.sigma_xp * u;

    std::vector<double> dets(static_cast<std::size_t>(pp.size()));
    for (Eigen::Index n = 0; n < pp.size(); ++n) {
        dets[static_cast<std::size_t>(n)] = xx(n, n) * pp(n) - xp(n, n) * xp(n, n);
    }
    return dets;
}

HupReport hup_check(const std::vector<double>& determinants, double tol) {
    HupReport report;
    report.determinants = determinants;
    report.passed = true;
    for (double d : determinants) {
        const bool ok = d >= 0.25 - tol;
        report.mode_passed.push_back(ok);
        if (!ok) report.passed = false;
    }
    return report;
}

MasterEquationCoefficients me_coefficients(const OscillatorBank& bank,
                                           const KernelSet& k, double t, double dt) {
    if (k.n_channels() != 1) throw Error("me_coefficients: requires one channel");
    // half a step of margin so the snapped window never falls short of t
    const TimeKernel nu_time = to_time(k.nu, t + 0.5 * dt, dt);
    const TimeKernel gamma_time = to_time(k.gamma, t + 0.5 * dt, dt);
    return me_coefficients(bank, nu_time, gamma_time, t);
}

MasterEquationCoefficients me_coefficients(const OscillatorBank& bank,
                                           const TimeKernel& nu_time,
                                           const TimeKernel& gamma_time, double t) {
    bank.validate();
    if (nu_time.n_channels() != 1 || gamma_time.n_channels() != 1) {
        throw Error("me_coefficients: requires one channel");
    }
    if (nu_time.dt() != gamma_time.dt()) {
        throw Error("me_coefficients: kernels sampled with different dt");
    }
    const double dt = nu_time.dt();
    const double slack = 1.0 + 1e-9;
    if (t > nu_time.t_max() * slack || t > gamma_time.t_max() * slack) {
        throw KernelWindowTooShort("me_coefficients: t = " + std::to_string(t) +
                                   " exceeds the kernel window");
    }

    const auto n_steps = static_cast<std::size_t>(std::llround(t / dt));
    const double w0 = bank.frequency;
    const double m = bank.mass;
    if (n_steps == 0) {
        MasterEquationCoefficients c;
        c.renormalization = 2.0 * gamma_time.at_lag(0)(0, 0).real() / m;
        c.slip_weight = c.renormalization;
        return c;
    }
    const std::size_t n = n_steps + 1;

    double nu_cos = 0.0, nu_sin = 0.0, ga_cos = 0.0, ga_sin = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = static_cast<double>(j) * dt;
        const double w = trapezoid_weight(j, n) * dt;
        const double nu = nu_time.at_lag(static_cast<std::ptrdiff_t>(j))(0, 0).real();
        const double ga = gamma_time.at_lag(static_cast<std::ptrdiff_t>(j))(0, 0).real();
        nu_cos += w * nu * std::cos(w0 * s);
        nu_sin += w * nu * std::sin(w0 * s);
        ga_cos += w * ga * std::cos(w0 * s);
        ga_sin += w * ga * std::sin(w0 * s);
    }
    const double gamma_t =
        gamma_time.at_lag(static_cast<std::ptrdiff_t>(n_steps))(0, 0).real();
    const double gamma_0 = gamma_time.at_lag(0)(0, 0).real();

    MasterEquationCoefficients c;
    c.d_normal = nu_cos;
    c.d_anomalous = -nu_sin / (m * w0);
    c.damping_rate = (2.0 / m) * ga_cos;
    c.freq_shift = -(2.0 * w0 / m) * ga_sin;
    c.renormalization = 2.0 * gamma_0 / m;
    c.slip_weight = 2.0 * gamma_t / m;
    return c;
}

double dissipated_energy(const OscillatorBank& bank, const TimeKernel& gamma_time,
                         const GaussianState& state0, double t) {
    bank.validate();
    if (bank.n_modes != 1 || gamma_time.n_channels() != 1) {
        throw Error("dissipated_energy: requires one mode and one channel");
    }
    if (t > gamma_time.t_max() * (1.0 + 1e-9)) {
        throw KernelWindowTooShort("dissipated_energy: t exceeds the kernel window");
    }
    const double dt = gamma_time.dt();
    const auto n_steps = static_cast<std::size_t>(std::llround(t / dt));
    const std::size_t n = n_steps + 1;
    const double w0 = bank.frequency;
    const double m = bank.mass;

    // Free evolution: v(τ) = −x₀ ω₀ sin(ω₀τ) + (p₀/m) cos(ω₀τ). Second
    // moments of v(τ₁)v(τ₂) in terms of state0's moments (means included).
    const double sxx = state0.cov.sigma_xx(0, 0) + state0.mean_x(0) * state0.mean_x(0);
    const double spp = state0.cov.sigma_pp(0, 0) + state0.mean_p(0) * state0.mean_p(0);
    const double sxp = state0.cov.sigma_xp(0, 0) + state0.mean_x(0) * state0.mean_p(0);

    std::vector<double> sin_t(n), cos_t(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = static_cast<double>(j) * dt;
        sin_t[j] = std::sin(w0 * tau);
        cos_t[j] = std::cos(w0 * tau);
    }

    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double wa = trapezoid_weight(a, n) * dt;
        for (std::size_t b = 0; b < n; ++b) {
            const double wb = trapezoid_weight(b, n) * dt;
            const double c_vv = w0 * w0 * sxx * sin_t[a] * sin_t[b] -
                                (w0 / m) * sxp * (sin_t[a] * cos_t[b] + cos_t[a] * sin_t[b]) +
                                (spp / (m * m)) * cos_t[a] * cos_t[b];
            const double ga = gamma_time
                                  .at_lag(static_cast<std::ptrdiff_t>(a) -
                                          static_cast<std::ptrdiff_t>(b))(0, 0)
                                  .real();
            total += wa * wb * ga * c_vv;
        }
    }
    return -total;
}

} // namespace fdilab
