// acceptance.cpp — end-to-end acceptance checks, one summary line each
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fdilab/environments.hpp"
#include "fdilab/errors.hpp"
#include "fdilab/experiment.hpp"
#include "fdilab/fdr.hpp"
#include "fdilab/langevin.hpp"
#include "fdilab/qbm.hpp"
#include "oracles.hpp"

using namespace fdilab;
namespace fs = std::filesystem;

namespace {

// Collects checks for one criterion and prints a single summary line.
struct Criterion {
    const char* label;
    bool ok = true;

    explicit Criterion(const char* l) : label(l) {}
    void expect(bool condition) {
        ok = ok && condition;
        CHECK(condition);
    }
    ~Criterion() {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", label);
        std::fflush(stdout);
    }
};

KernelSet ohmic_drude_thermal(double gamma0, double temp, double lam,
                              const FrequencyGrid& grid) {
    return build_kernels(SpectralModel::ohmic(gamma0, SpectralModel::Cutoff::drude, lam),
                         EnvironmentState::thermal(temp), grid);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("1. thermal FDR recovery") {
    Criterion c("criterion 1: thermal FDR kernel equals omega*coth(omega/2T) to 1e-10");
    const double gamma0 = 0.25, lam = 5.0;
    const FrequencyGrid grid(4001, 10.0);
    for (double temp : {0.1, 1.0, 10.0}) {
        const KernelSet built = ohmic_drude_thermal(gamma0, temp, lam, grid);
        const KernelSet ks = decompose(built.alpha);
        const FdrKernel kappa = fdr_kernel_scalar(ks);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (std::abs(grid[k]) > 0.8 * grid.omega_max()) continue;
            const double expected = oracle::thermal_kappa(temp, grid[k]);
            worst = std::max(worst, std::abs(kappa.scalar(k) - expected) / expected);
        }
        c.expect(worst <= 1e-10);
    }
}

TEST_CASE("2. FDI saturation and violation") {
    Criterion c("criterion 2: zero-T saturates the inequality, classical vacuum breaks it");
    const double gamma0 = 0.4, lam = 5.0;
    const FrequencyGrid grid(4001, 10.0);

    const KernelSet cold =
        build_kernels(SpectralModel::ohmic(gamma0, SpectralModel::Cutoff::drude, lam),
                      EnvironmentState::zero_temperature(), grid);
    const FdiReport cold_report = fdi_check(cold, 1e-9);
    c.expect(cold_report.passed);
    c.expect(cold_report.worst_margin >= -1e-12);
    c.expect(cold_report.worst_margin <= 1e-6);

    const KernelSet vac =
        build_kernels(SpectralModel::ohmic(gamma0, SpectralModel::Cutoff::drude, lam),
                      EnvironmentState::classical(0.0), grid);
    const FdiReport vac_report = fdi_check(vac, 1e-9);
    c.expect(!vac_report.passed);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        if (w == 0.0) continue;
        const double analytic = -std::abs(w) * vac.gamma[k](0, 0).real();
        worst = std::max(worst,
                         std::abs(vac_report.margin(k) - analytic) / std::abs(analytic));
    }
    c.expect(worst <= 1e-10);
}

TEST_CASE("3. squeezed FDR") {
    Criterion c("criterion 3: squeezed FDR kernel carries cosh(2r) and obeys the bound");
    const double temp = 0.8, gamma0 = 0.3;
    const FrequencyGrid grid(4001, 10.0);
    for (double r : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        const KernelSet ks =
            build_kernels(SpectralModel::ohmic(gamma0, SpectralModel::Cutoff::drude, 5.0),
                          EnvironmentState::squeezed(temp, r), grid);
        const FdrKernel kappa = fdr_kernel_scalar(decompose(ks.alpha));
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (std::abs(grid[k]) > 0.8 * grid.omega_max()) continue;
            const double expected =
                std::cosh(2.0 * r) * oracle::thermal_kappa(temp, grid[k]);
            worst = std::max(worst, std::abs(kappa.scalar(k) - expected) / expected);
        }
        c.expect(worst <= 1e-10);
        c.expect(fdi_check_kappa(kappa, 1e-9).passed);
    }
}

TEST_CASE("4. matrix Lyapunov oracle") {
    Criterion c("criterion 4: symmetrized-product solve matches the Kronecker oracle");
    const FrequencyGrid grid(3, 1.0);
    double worst_residual = 0.0, worst_oracle = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix nu = oracle::random_hpd(3, 1000 + 2 * seed);
        const Matrix gamma = oracle::random_hpd(3, 1000 + 2 * seed + 1);
        const Matrix kappa = hermitian_lyapunov_solve(nu, gamma);
        const Matrix residual = nu - 0.5 * (kappa * gamma + gamma * kappa);
        worst_residual = std::max(worst_residual, residual.norm() / nu.norm());
        const Matrix brute = oracle::lyapunov_kron_solve(nu, gamma);
        worst_oracle = std::max(worst_oracle, (kappa - brute).cwiseAbs().maxCoeff());
    }
    c.expect(worst_residual <= 1e-10);
    c.expect(worst_oracle <= 1e-9);
    (void)grid;
}

TEST_CASE("5. coupling-independence dichotomy") {
    Criterion c("criterion 5: only the exponential population is coupling independent");
    // unit-spaced transition lines {1..5}, several of them degenerate; the
    // narrow broadening keeps inter-line Lorentzian leakage below the spread
    // tolerance even for extreme random coupling-weight ratios
    const std::vector<double> levels = {0.0, 1.0, 2.0, 3.0, 5.0};
    const double beta = 1.0, eta = 2.5e-5;
    const FrequencyGrid grid(960001, 6.0);

    std::vector<double> thermal_probs, lorentz_probs;
    double zt = 0.0, zl = 0.0;
    for (double e : levels) {
        zt += std::exp(-beta * e);
        zl += 1.0 / ((1.0 + e) * (1.0 + e));
    }
    for (double e : levels) {
        thermal_probs.push_back(std::exp(-beta * e) / zt);
        lorentz_probs.push_back(1.0 / ((1.0 + e) * (1.0 + e)) / zl);
    }

    const IndependenceResult thermal =
        coupling_independence_test(levels, thermal_probs, 20, 424242, grid, eta);
    c.expect(!thermal.spread.empty());
    double worst = 0.0;
    for (double s : thermal.spread) worst = std::max(worst, s);
    c.expect(worst < 1e-6);

    const IndependenceResult skewed =
        coupling_independence_test(levels, lorentz_probs, 20, 424242, grid, eta);
    double best = 0.0;
    for (double s : skewed.spread) best = std::max(best, s);
    c.expect(best > 1e-2);
}

TEST_CASE("6. steady state and uncertainty") {
    Criterion c("criterion 6: uncertainty products hit 1/4, coth^2/4, and fall below 1/4");
    const OscillatorBank bank{1, 1.3, 1.0};
    const FrequencyGrid grid(2001, 8.0);
    const SpectralModel model = SpectralModel::ohmic(0.02, SpectralModel::Cutoff::drude, 40.0);

    const KernelSet cold = build_kernels(model, EnvironmentState::zero_temperature(), grid);
    const std::vector<double> det_cold =
        uncertainty_product(steady_state_covariance(bank, cold), bank);
    c.expect(std::abs(det_cold[0] - 0.25) <= 1e-10 * 0.25);

    const double temp = 1.0;
    const KernelSet warm = build_kernels(model, EnvironmentState::thermal(temp), grid);
    const std::vector<double> det_warm =
        uncertainty_product(steady_state_covariance(bank, warm), bank);
    const double coth = oracle::thermal_kappa(temp, bank.frequency) / bank.frequency;
    const double expected = coth * coth / 4.0;
    c.expect(std::abs(det_warm[0] - expected) <= 1e-10 * expected);

    const KernelSet vac = build_kernels(model, EnvironmentState::classical(0.0), grid);
    const std::vector<double> det_vac =
        uncertainty_product(steady_state_covariance(bank, vac), bank);
    c.expect(det_vac[0] < 0.25);
}

TEST_CASE("7. master-equation coefficient asymptotics") {
    Criterion c("criterion 7: D_normal -> nu(w0)/2 and damping rate -> gamma(w0)/m at 1e-4");
    const double w0 = 1.0, lam = 50.0, gamma0 = 0.1, m = 1.0;
    const OscillatorBank bank{1, m, w0};
    const FrequencyGrid grid(12001, 1200.0);
    const KernelSet k = ohmic_drude_thermal(gamma0, 1.0, lam, grid);
    const double t = 200.0 / lam;
    const double dt = 0.5 * std::numbers::pi / grid.omega_max();

    const double nu_w0 = k.nu.value_at(w0)(0, 0).real();
    const double ga_w0 = k.gamma.value_at(w0)(0, 0).real();

    const MasterEquationCoefficients coarse = me_coefficients(bank, k, t, dt);
    const MasterEquationCoefficients fine = me_coefficients(bank, k, t, 0.5 * dt);
    for (const auto& coeff : {coarse, fine}) {
        c.expect(std::abs(coeff.d_normal - 0.5 * nu_w0) <= 1e-4 * 0.5 * nu_w0);
        c.expect(std::abs(coeff.damping_rate - ga_w0 / m) <= 1e-4 * ga_w0 / m);
    }
    // quadrature order: halving dt moves the result by less than the tolerance
    c.expect(std::abs(fine.d_normal - coarse.d_normal) <= 1e-4 * 0.5 * nu_w0);
    c.expect(std::abs(fine.damping_rate - coarse.damping_rate) <= 1e-4 * ga_w0 / m);
}

TEST_CASE("8. dissipated energy sign") {
    Criterion c("criterion 8: damping kernels only extract energy; amplifying ones inject");
    const OscillatorBank bank{1, 1.0, 1.0};
    const FrequencyGrid grid(1601, 40.0);
    const KernelSet k = ohmic_drude_thermal(0.3, 1.0, 5.0, grid);
    const TimeKernel gamma_time = to_time(k.gamma, 6.0, std::numbers::pi / 40.0);
    TimeKernel negated = gamma_time;
    for (std::size_t j = 0; j < negated.size(); ++j) negated[j] *= -1.0;

    std::mt19937_64 rng(321);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.05, 3.0);
    std::uniform_real_distribution<double> rho(-0.95, 0.95);
    bool all_dissipative = true, all_amplifying = true;
    for (int trial = 0; trial < 100; ++trial) {
        GaussianState s;
        s.mean_x = Eigen::VectorXd::Constant(1, normal(rng));
        s.mean_p = Eigen::VectorXd::Constant(1, normal(rng));
        const double sxx = uni(rng), spp = uni(rng);
        s.cov.sigma_xx = Eigen::MatrixXd::Constant(1, 1, sxx);
        s.cov.sigma_pp = Eigen::MatrixXd::Constant(1, 1, spp);
        s.cov.sigma_xp =
            Eigen::MatrixXd::Constant(1, 1, rho(rng) * std::sqrt(sxx * spp));
        const double de = dissipated_energy(bank, gamma_time, s, 5.5);
        all_dissipative = all_dissipative && de <= 1e-12;
        all_amplifying = all_amplifying && dissipated_energy(bank, negated, s, 5.5) >= -1e-12;
    }
    c.expect(all_dissipative);
    c.expect(all_amplifying);
}

TEST_CASE("9. Langevin end to end") {
    Criterion c("criterion 9: empirical covariances match the Lyapunov prediction in 3 SE");
    const double w0 = 1.0, m = 1.0, gamma0 = 0.01, lam = 20.0;
    const OscillatorBank bank{1, m, w0};
    const double dt = 2.0 * std::numbers::pi / 256.0;
    const FrequencyGrid grid(4001, std::numbers::pi / dt);
    const std::size_t n_steps = 65536, n_traj = 2000;

    {
        const KernelSet k = ohmic_drude_thermal(gamma0, 1.0, lam, grid);
        const NoiseEnsemble noise = generate_noise(k.nu, dt, n_steps, n_traj, 20250808);
        const TrajectoryStats st = simulate(bank, k, noise, DampingMode::local);
        const double target = 0.5 * m * w0 / std::tanh(0.5);
        c.expect(std::abs(st.sigma_pp(0, 0) - target) <= 3.0 * st.se_pp(0, 0));
        const double det_rel_se = st.det_sigma_se() / st.det_sigma();
        c.expect(st.det_sigma() >= 0.25 * (1.0 - 3.0 * det_rel_se));
    }
    {
        const KernelSet k =
            build_kernels(SpectralModel::ohmic(gamma0, SpectralModel::Cutoff::drude, lam),
                          EnvironmentState::zero_temperature(), grid);
        const NoiseEnsemble noise = generate_noise(k.nu, dt, n_steps, n_traj, 20250809);
        const TrajectoryStats st = simulate(bank, k, noise, DampingMode::local);
        c.expect(std::abs(st.sigma_pp(0, 0) - 0.5 * m * w0) <= 3.0 * st.se_pp(0, 0));
        const double det_rel_se = st.det_sigma_se() / st.det_sigma();
        c.expect(st.det_sigma() >= 0.25 * (1.0 - 3.0 * det_rel_se));
    }
}

TEST_CASE("10. CLI determinism") {
    Criterion c("criterion 10: identical spec and seed give byte-identical outputs");
    const std::string cli = FDILAB_CLI_PATH;
    const fs::path base = fs::temp_directory_path() / "fdilab_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path spec_path = base / "spec.ini";
    {
        std::ofstream out(spec_path);
        out << "[environment]\nstate = thermal\ntemperature = 1.0\n"
            << "[spectral]\nfamily = ohmic\ngamma0 = 0.05\ncutoff = drude\ncutoff_freq = 20\n"
            << "[grid]\nomega_max = 64\nn_points = 2001\n"
            << "[system]\nmass = 1.0\nfrequency = 1.0\n"
            << "[run]\nseed = 99\ndt = 0.049087385212340517\nn_steps = 8192\n"
            << "n_trajectories = 8\n";
    }
    const auto run_into = [&](const std::string& sub, const fs::path& dir) {
        fs::create_directories(dir);
        const std::string cmd = cli + " " + sub + " --spec " + spec_path.string() +
                                " --out " + dir.string() + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    const fs::path a = base / "a", b = base / "b";
    c.expect(run_into("kernel", a) == 0);
    c.expect(run_into("kernel", b) == 0);
    for (const char* f : {"nu.csv", "gamma.csv", "alpha.csv", "report.json"}) {
        c.expect(slurp(a / f) == slurp(b / f));
    }
    const fs::path sa = base / "sim_a", sb = base / "sim_b";
    c.expect(run_into("simulate", sa) == 0);
    c.expect(run_into("simulate", sb) == 0);
    c.expect(slurp(sa / "report.json") == slurp(sb / "report.json"));
    c.expect(!slurp(sa / "report.json").empty());
}
