#include "fdilab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fdilab/errors.hpp"

namespace fdilab {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require_hermitian(const MatrixFunction& f, double tol, const char* where) {
    const double scale = std::max(f.max_norm(), 1e-300);
    if (f.hermiticity_defect() > tol * scale) {
        throw NonHermitianInput(std::string(where) + ": Hermiticity defect " +
                                std::to_string(f.hermiticity_defect()) +
                                " exceeds tolerance");
    }
}

// Trapezoid weight: ½ at the ends of a closed uniform grid.
double trapezoid_weight(std::size_t j, std::size_t n) {
    return (j == 0 || j + 1 == n) ? 0.5 : 1.0;
}

} // namespace

KernelSet decompose(const MatrixFunction& alpha, double tol) {
    require_hermitian(alpha, tol, "decompose");

    const FrequencyGrid& grid = alpha.grid();
    const std::size_t n = grid.size();
    const int nc = alpha.n_channels();

    MatrixFunction nu(grid, nc);
    MatrixFunction mu(grid, nc);
    MatrixFunction gamma(grid, nc);

    for (std::size_t k = 0; k < n; ++k) {
        const Matrix mirrored = alpha[grid.mirror_index(k)].transpose();
        nu[k] = 0.5 * (alpha[k] + mirrored);
        mu[k] = (alpha[k] - mirrored) / (2.0 * kImag);
        const double w = grid[k];
        if (w != 0.0) {
            gamma[k] = mu[k] / (kImag * w);
        }
    }

    // γ̃(0): even quadratic a + b·ω² fitted through ±Δω and ±2Δω. γ̃ is even
    // Hermitian, so pair-averaging plus Richardson gives an O(Δω⁴) value.
    const std::size_t z = grid.zero_index();
    if (n >= 5) {
        const Matrix g1 = 0.5 * (gamma[z + 1] + gamma[z - 1]);
        const Matrix g2 = 0.5 * (gamma[z + 2] + gamma[z - 2]);
        gamma[z] = (4.0 * g1 - g2) / 3.0;
    } else {
        gamma[z] = 0.5 * (gamma[z + 1] + gamma[z - 1]);
    }

    return KernelSet{alpha, std::move(nu), std::move(mu), std::move(gamma)};
}

MatrixFunction reconstruct(const MatrixFunction& nu, const MatrixFunction& gamma) {
    nu.require_same_grid(gamma, "reconstruct");
    const FrequencyGrid& grid = nu.grid();
    MatrixFunction alpha(grid, nu.n_channels());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        alpha[k] = nu[k] - grid[k] * gamma[k];
    }
    return alpha;
}

TimeKernel to_time(const MatrixFunction& f, double t_max, double dt) {
    const FrequencyGrid& grid = f.grid();
    if (dt > std::numbers::pi / grid.omega_max() * (1.0 + 1e-12)) {
        throw AliasingRisk("to_time: dt = " + std::to_string(dt) +
                           " exceeds π/ω_max = " +
                           std::to_string(std::numbers::pi / grid.omega_max()));
    }
    const auto n_half = static_cast<std::size_t>(std::llround(t_max / dt));
    TimeKernel out(dt, n_half, f.n_channels());

    const std::size_t n_w = grid.size();
    const std::size_t n_t = out.size();
    const double norm = grid.spacing() / (2.0 * std::numbers::pi);

    // α(t_j) = (Δω/2π) Σ_k w_k e^{+iω_k t_j} f(ω_k); rotor recurrence over j
    // with periodic exact re-phasing to stop drift.
    for (std::size_t k = 0; k < n_w; ++k) {
        const Matrix term = (norm * trapezoid_weight(k, n_w)) * f[k];
        const double w = grid[k];
        const Complex rot = std::polar(1.0, w * dt);
        Complex phase = std::polar(1.0, w * out.time(0));
        for (std::size_t j = 0; j < n_t; ++j) {
            if (j % 64 == 0) phase = std::polar(1.0, w * out.time(j));
            out[j] += phase * term;
            phase *= rot;
        }
    }
    return out;
}

MatrixFunction to_frequency(const TimeKernel& k, const FrequencyGrid& grid) {
    if (k.dt() > std::numbers::pi / grid.omega_max() * (1.0 + 1e-12)) {
        throw AliasingRisk("to_frequency: kernel sampling too coarse for the target grid");
    }
    MatrixFunction out(grid, k.n_channels());
    const std::size_t n_t = k.size();
    const std::size_t n_w = grid.size();

    for (std::size_t j = 0; j < n_t; ++j) {
        const Matrix term = (k.dt() * trapezoid_weight(j, n_t)) * k[j];
        const double t = k.time(j);
        const Complex rot = std::polar(1.0, -grid.spacing() * t);
        Complex phase = std::polar(1.0, -grid[0] * t);
        for (std::size_t m = 0; m < n_w; ++m) {
            if (m % 64 == 0) phase = std::polar(1.0, -grid[m] * t);
            out[m] += phase * term;
            phase *= rot;
        }
    }
    return out;
}

double posdef_quadratic_check(const TimeKernel& k, int n_trials, std::uint64_t seed) {
    const std::size_t half = k.zero_index();
    const std::size_t n = half + 1; // samples on [0, t_max]
    const int nc = k.n_channels();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double worst = 0.0;
    std::vector<Eigen::VectorXcd> f(n);
    std::vector<Eigen::VectorXcd> raw(n);

    for (int trial = 0; trial < n_trials; ++trial) {
        for (std::size_t j = 0; j < n; ++j) {
            Eigen::VectorXcd v(nc);
            for (int c = 0; c < nc; ++c) v(c) = Complex(normal(rng), normal(rng));
            raw[j] = v;
        }
        // 3-point moving average, shrinking at the boundaries
        for (std::size_t j = 0; j < n; ++j) {
            Eigen::VectorXcd acc = raw[j];
            int cnt = 1;
            if (j > 0) { acc += raw[j - 1]; ++cnt; }
            if (j + 1 < n) { acc += raw[j + 1]; ++cnt; }
            f[j] = acc / static_cast<double>(cnt);
        }

        Complex q{0.0, 0.0};
        double norm2 = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const double wa = trapezoid_weight(a, n);
            norm2 += wa * f[a].squaredNorm() * k.dt();
            for (std::size_t b = 0; b < n; ++b) {
                const double wb = trapezoid_weight(b, n);
                const Matrix& alpha = k.at_lag(static_cast<std::ptrdiff_t>(a) -
                                               static_cast<std::ptrdiff_t>(b));
                q += wa * wb * (f[a].dot(alpha * f[b])) * k.dt() * k.dt();
            }
        }
        const double value = q.real() / std::max(norm2, 1e-300);
        if (trial == 0 || value < worst) worst = value;
    }
    return worst;
}

double posdef_spectral_check(const MatrixFunction& f, double tol) {
    require_hermitian(f, tol, "posdef_spectral_check");
    double min_eig = 0.0;
    bool first = true;
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    for (std::size_t k = 0; k < f.size(); ++k) {
        solver.compute(f[k], Eigen::EigenvaluesOnly);
        const double lo = solver.eigenvalues().minCoeff();
        if (first || lo < min_eig) {
            min_eig = lo;
            first = false;
        }
    }
    return min_eig;
}

} // namespace fdilab
