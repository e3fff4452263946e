#include "fdilab/fdr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdilab/errors.hpp"

namespace fdilab {

namespace {

FdiReport margins_to_report(std::vector<double> omegas, std::vector<double> plus,
                            std::vector<double> minus, double tol) {
    FdiReport report;
    report.omegas = std::move(omegas);
    report.margin_plus = std::move(plus);
    report.margin_minus = std::move(minus);
    report.tol = tol;
    report.worst_margin = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < report.omegas.size(); ++k) {
        const double m = report.margin(k);
        if (first || m < report.worst_margin) {
            report.worst_margin = m;
            first = false;
        }
        if (m < -tol) report.violating_frequencies.push_back(report.omegas[k]);
    }
    report.passed = report.worst_margin >= -tol;
    return report;
}

} // namespace

Matrix FdrKernel::value_at(double omega) const {
    const double w_max = grid.omega_max();
    if (omega < -w_max || omega > w_max) {
        throw OffGrid("FdrKernel: ω outside the grid range");
    }
    const double pos = (omega + w_max) / grid.spacing();
    const auto k0 = static_cast<std::size_t>(std::floor(pos));
    if (k0 + 1 >= data.size()) return data.back();
    const double frac = pos - static_cast<double>(k0);
    return (1.0 - frac) * data[k0] + frac * data[k0 + 1];
}

FdiReport fdi_check(const KernelSet& k, double tol) {
    const FrequencyGrid& grid = k.grid();
    const std::size_t n = grid.size();
    std::vector<double> plus(n), minus(n);
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix wg = grid[i] * k.gamma[i];
        solver.compute(k.nu[i] - wg, Eigen::EigenvaluesOnly);
        plus[i] = solver.eigenvalues().minCoeff();
        solver.compute(k.nu[i] + wg, Eigen::EigenvaluesOnly);
        minus[i] = solver.eigenvalues().minCoeff();
    }
    return margins_to_report(grid.values(), std::move(plus), std::move(minus), tol);
}

FdrKernel fdr_kernel_scalar(const KernelSet& k) {
    if (k.n_channels() != 1) {
        throw Error("fdr_kernel_scalar: requires a single channel");
    }
    const FrequencyGrid& grid = k.grid();
    double gamma_max = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        gamma_max = std::max(gamma_max, std::abs(k.gamma[i](0, 0).real()));
    }
    const double floor = 1e-12 * gamma_max;

    FdrKernel kappa{grid, std::vector<Matrix>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = k.gamma[i](0, 0).real();
        if (std::abs(g) <= floor) {
            throw DampingVanishes("fdr_kernel_scalar: |γ̃| below floor at ω = " +
                                  std::to_string(grid[i]));
        }
        kappa.data[i] = Matrix::Constant(1, 1, Complex(k.nu[i](0, 0).real() / g, 0.0));
    }
    return kappa;
}

Matrix hermitian_lyapunov_solve(const Matrix& nu, const Matrix& gamma) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gamma);
    const Eigen::VectorXd g = solver.eigenvalues();
    const double g_max = g.cwiseAbs().maxCoeff();
    if (g.minCoeff() <= 1e-12 * std::max(g_max, 1e-300)) {
        throw NotDamping("hermitian_lyapunov_solve: damping kernel not positive definite");
    }
    const Matrix& u = solver.eigenvectors();
    Matrix nu_p = u.adjoint() * nu * u;
    for (Eigen::Index a = 0; a < nu_p.rows(); ++a) {
        for (Eigen::Index b = 0; b < nu_p.cols(); ++b) {
            nu_p(a, b) *= 2.0 / (g(a) + g(b));
        }
    }
    return u * nu_p * u.adjoint();
}

FdrKernel fdr_kernel_matrix(const KernelSet& k) {
    const FrequencyGrid& grid = k.grid();
    FdrKernel kappa{grid, std::vector<Matrix>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            kappa.data[i] = hermitian_lyapunov_solve(k.nu[i], k.gamma[i]);
        } catch (const NotDamping&) {
            throw NotDamping("fdr_kernel_matrix: γ̃ not positive definite at ω = " +
                             std::to_string(grid[i]));
        }
    }
    return kappa;
}

FdiReport fdi_check_kappa(const FdrKernel& kappa, double tol) {
    const std::size_t n = kappa.data.size();
    std::vector<double> margin(n);
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    const auto nc = kappa.data.empty() ? 1 : kappa.data[0].rows();
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix m =
            kappa.data[i] - std::abs(kappa.grid[i]) * Matrix::Identity(nc, nc);
        solver.compute(m, Eigen::EigenvaluesOnly);
        margin[i] = solver.eigenvalues().minCoeff();
    }
    std::vector<double> minus = margin;
    return margins_to_report(kappa.grid.values(), std::move(margin), std::move(minus), tol);
}

double IndependenceResult::spread_at(double omega) const {
    double best = 0.0;
    std::size_t idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double d = std::abs(omegas[i] - omega);
        if (!found || d < best) {
            best = d;
            idx = i;
            found = true;
        }
    }
    if (!found || best > broadening) {
        throw NoTransitionNearOmega("coupling_independence_test: no populated line within η of ω = " +
                                    std::to_string(omega));
    }
    return spread[idx];
}

double IndependenceResult::kappa_at(double omega) const {
    double best = 0.0;
    std::size_t idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double d = std::abs(omegas[i] - omega);
        if (!found || d < best) {
            best = d;
            idx = i;
            found = true;
        }
    }
    if (!found || best > broadening) {
        throw NoTransitionNearOmega("coupling_independence_test: no populated line near ω");
    }
    return kappa_mean[idx];
}

IndependenceResult coupling_independence_test(const std::vector<double>& levels,
                                              const std::vector<double>& probs,
                                              int n_couplings, std::uint64_t seed,
                                              const FrequencyGrid& grid,
                                              double broadening) {
    if (n_couplings < 2) {
        throw Error("coupling_independence_test: need at least two couplings");
    }
    const auto n_levels = static_cast<int>(levels.size());

    // Populated transition lines: distinct nonzero ε_i − ε_j. Gaussian random
    // couplings populate every pair, so a line is populated iff both its
    // probabilities contribute (p_i + p_j > 0).
    std::vector<double> lines;
    for (int i = 0; i < n_levels; ++i) {
        for (int j = 0; j < n_levels; ++j) {
            const double e = levels[i] - levels[j];
            if (e == 0.0 || probs[i] + probs[j] <= 0.0) continue;
            bool known = false;
            for (double l : lines) {
                if (std::abs(l - e) < 0.5 * broadening) known = true;
            }
            if (!known) lines.push_back(e);
        }
    }
    std::sort(lines.begin(), lines.end());

    // Probed grid indices: within η of a line and at least η away from ω = 0.
    std::vector<std::size_t> probe;
    std::vector<double> probe_line;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        if (std::abs(w) <= broadening) continue;
        for (double l : lines) {
            if (std::abs(w - l) <= broadening) {
                probe.push_back(k);
                probe_line.push_back(l);
                break;
            }
        }
    }

    std::vector<std::vector<double>> kappa(probe.size(),
                                           std::vector<double>(n_couplings));
    for (int c = 0; c < n_couplings; ++c) {
        DiscreteEnvironment env;
        env.levels = levels;
        env.probs = probs;
        env.broadening = broadening;
        env.couplings = {random_hermitian(n_levels, seed + 1000003ULL * c)};
        const MatrixFunction alpha = discrete_correlation(env, grid);
        for (std::size_t p = 0; p < probe.size(); ++p) {
            const std::size_t k = probe[p];
            // decomposition evaluated at the probe point: the scalar noise and
            // damping kernels only involve α̃ at ±ω (channel-traced)
            const double a_here = alpha[k].real().trace();
            const double a_mirror = alpha[grid.mirror_index(k)].real().trace();
            const double nu_tr = 0.5 * (a_here + a_mirror);
            const double ga_tr = (a_mirror - a_here) / (2.0 * grid[k]);
            kappa[p][c] = nu_tr / ga_tr;
        }
    }

    IndependenceResult result;
    result.broadening = broadening;
    for (std::size_t p = 0; p < probe.size(); ++p) {
        double lo = kappa[p][0], hi = kappa[p][0], mean = 0.0;
        for (double v : kappa[p]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v;
        }
        mean /= static_cast<double>(n_couplings);
        result.omegas.push_back(grid[probe[p]]);
        result.spread.push_back((hi - lo) / std::abs(mean));
        result.kappa_mean.push_back(mean);
        result.line_frequency.push_back(probe_line[p]);
    }
    return result;
}

} // namespace fdilab
