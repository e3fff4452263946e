#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fdilab/errors.hpp"
#include "fdilab/kernels.hpp"
#include "oracles.hpp"

using namespace fdilab;

namespace {

// Smooth random Hermitian-per-ω matrix function with a real value at ω = 0
// (as stationarity requires) and positive definite everywhere.
MatrixFunction random_positive_profile(const FrequencyGrid& grid, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    Matrix b(n, n), c(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = normal(rng);
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = normal(rng); // real symmetric: α̃(0) must be real
            a(j, i) = a(i, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        b(i, i) = normal(rng);
        c(i, i) = normal(rng);
        for (int j = i + 1; j < n; ++j) {
            b(i, j) = Complex(normal(rng), normal(rng));
            b(j, i) = std::conj(b(i, j));
            c(i, j) = Complex(normal(rng), normal(rng));
            c(j, i) = std::conj(c(i, j));
        }
    }
    const double shift = 4.0 * (a.norm() + b.norm() + c.norm());
    MatrixFunction f(grid, n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        f[k] = a + std::sin(0.3 * w) * b + (1.0 - std::cos(0.2 * w)) * c +
               shift * Matrix::Identity(n, n);
    }
    return f;
}

double max_abs_diff(const MatrixFunction& x, const MatrixFunction& y) {
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        worst = std::max(worst, (x[k] - y[k]).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

TEST_CASE("frequency grid is exactly symmetric and contains zero") {
    const FrequencyGrid grid(101, 7.0);
    CHECK(grid.size() == 101);
    CHECK(grid[grid.zero_index()] == 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(grid[grid.mirror_index(k)] == -grid[k]); // bitwise pairs
    }
    CHECK(grid[0] == -7.0);
    CHECK(grid[100] == 7.0);
    CHECK(grid.spacing() == doctest::Approx(0.14).epsilon(1e-14));

    CHECK_THROWS_AS(FrequencyGrid(100, 7.0), GridAsymmetric);
    CHECK_THROWS_AS(FrequencyGrid(101, -1.0), GridAsymmetric);
}

TEST_CASE("decompose recovers noise and damping of zero-temperature ohmic input") {
    const double gamma0 = 0.8;
    const FrequencyGrid grid(201, 5.0);
    MatrixFunction alpha(grid, 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        alpha[k](0, 0) = w < 0.0 ? 2.0 * std::abs(w) * gamma0 : 0.0;
    }
    const KernelSet ks = decompose(alpha);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        CHECK(ks.nu[k](0, 0).real() ==
              doctest::Approx(std::abs(w) * gamma0).epsilon(1e-12));
        CHECK(ks.gamma[k](0, 0).real() == doctest::Approx(gamma0).epsilon(1e-12));
        CHECK(std::abs(ks.gamma[k](0, 0).imag()) < 1e-14);
    }
}

TEST_CASE("decompose of the zero kernel gives zero everywhere") {
    const FrequencyGrid grid(51, 3.0);
    const MatrixFunction alpha(grid, 2);
    const KernelSet ks = decompose(alpha);
    CHECK(ks.nu.max_norm() == 0.0);
    CHECK(ks.mu.max_norm() == 0.0);
    CHECK(ks.gamma.max_norm() == 0.0);
}

TEST_CASE("decompose then reconstruct is the identity on random positive input") {
    const FrequencyGrid grid(301, 6.0);
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        const MatrixFunction alpha = random_positive_profile(grid, 2, seed);
        const KernelSet ks = decompose(alpha);
        const MatrixFunction back = reconstruct(ks.nu, ks.gamma);
        CHECK(max_abs_diff(alpha, back) < 1e-12 * alpha.max_norm());
    }
}

TEST_CASE("decomposition output satisfies the double-Hermiticity invariants") {
    const FrequencyGrid grid(301, 6.0);
    const MatrixFunction alpha = random_positive_profile(grid, 3, 77);
    const KernelSet ks = decompose(alpha);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t mk = grid.mirror_index(k);
        CHECK((ks.nu[k] - ks.nu[k].adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((ks.nu[k] - ks.nu[mk].conjugate()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((ks.gamma[k] - ks.gamma[mk].conjugate()).cwiseAbs().maxCoeff() < 1e-10);
        if (grid[k] != 0.0) {
            const Matrix expected = Complex(0.0, 1.0) * grid[k] * ks.gamma[k];
            CHECK((ks.mu[k] - expected).cwiseAbs().maxCoeff() < 1e-12 * alpha.max_norm());
        }
    }
}

TEST_CASE("decompose rejects non-Hermitian input") {
    const FrequencyGrid grid(11, 2.0);
    MatrixFunction alpha(grid, 2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        alpha[k] << Complex(1.0, 0.0), Complex(0.5, 0.1), Complex(0.9, 0.3),
            Complex(2.0, 0.0);
    }
    CHECK_THROWS_AS(decompose(alpha), NonHermitianInput);
}

TEST_CASE("reconstruct matches the thermal closed form and flags grid mismatch") {
    const double gamma0 = 0.5, temp = 1.3;
    const FrequencyGrid grid(401, 8.0);
    const MatrixFunction nu = MatrixFunction::from_scalar(
        grid, [&](double w) { return oracle::thermal_kappa(temp, w) * gamma0; });
    const MatrixFunction gamma =
        MatrixFunction::from_scalar(grid, [&](double) { return gamma0; });
    const MatrixFunction alpha = reconstruct(nu, gamma);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        const double expected = gamma0 * (oracle::thermal_kappa(temp, w) - w);
        CHECK(alpha[k](0, 0).real() == doctest::Approx(expected).epsilon(1e-12));
    }
    // the positive-frequency correlation dies out in the cold limit
    CHECK(1.0 / std::tanh(1.0 / 2e-4) - 1.0 < 1e-300);

    const FrequencyGrid other(401, 9.0);
    const MatrixFunction gamma_other =
        MatrixFunction::from_scalar(other, [&](double) { return gamma0; });
    CHECK_THROWS_AS(reconstruct(nu, gamma_other), GridMismatch);
}

TEST_CASE("classical vacuum reconstruction is not positive") {
    const FrequencyGrid grid(201, 4.0);
    const MatrixFunction nu = MatrixFunction::from_scalar(grid, [](double) { return 0.0; });
    const MatrixFunction gamma = MatrixFunction::from_scalar(grid, [](double) { return 1.0; });
    const MatrixFunction alpha = reconstruct(nu, gamma);
    CHECK(posdef_spectral_check(alpha) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("to_time maps a Lorentzian spectrum to a two-sided exponential") {
    const double gamma0 = 0.7, lam = 1.0;
    Matrix h(2, 2);
    h << Complex(2.0, 0.0), Complex(0.5, 0.3), Complex(0.5, -0.3), Complex(1.0, 0.0);

    const auto run = [&](double w_max, std::size_t n) {
        const FrequencyGrid grid(n, w_max);
        MatrixFunction f(grid, 2);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double w = grid[k];
            f[k] = (2.0 * gamma0 * lam * lam / (lam * lam + w * w)) * h;
        }
        const TimeKernel kt = to_time(f, 8.0, 0.25 * std::numbers::pi / w_max);
        double worst = 0.0;
        for (std::size_t j = 0; j < kt.size(); ++j) {
            const Matrix expected =
                gamma0 * lam * std::exp(-lam * std::abs(kt.time(j))) * h;
            worst = std::max(worst, (kt[j] - expected).cwiseAbs().maxCoeff());
        }
        return worst / (gamma0 * lam * h.cwiseAbs().maxCoeff());
    };

    const double err_coarse = run(100.0, 4001);
    CHECK(err_coarse < 0.01);
    const double err_fine = run(200.0, 8001);
    CHECK(err_fine < 0.7 * err_coarse); // converges with bandwidth
}

TEST_CASE("to_time uses the e^{+iωt} inverse convention") {
    const FrequencyGrid grid(2001, 30.0);
    const double w_c = 4.0, s = 1.5;
    MatrixFunction f(grid, 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        f[k](0, 0) = std::exp(-0.5 * (w - w_c) * (w - w_c) / (s * s));
    }
    const TimeKernel kt = to_time(f, 4.0, 0.05);
    // (1/2π)∫ e^{iωt} e^{−(ω−ωc)²/2s²} dω = (s/√2π) e^{iω_c t − s²t²/2}
    for (double t : {0.3, 0.9}) {
        const auto j =
            static_cast<std::size_t>(kt.zero_index() + std::llround(t / kt.dt()));
        const Complex expected = s / std::sqrt(2.0 * std::numbers::pi) *
                                 std::exp(-0.5 * s * s * t * t) *
                                 std::polar(1.0, w_c * t);
        CHECK(std::abs(kt[j](0, 0) - expected) < 1e-8);
    }
}

TEST_CASE("flat spectrum concentrates at t = 0") {
    const FrequencyGrid grid(1001, 25.0);
    const MatrixFunction f = MatrixFunction::from_scalar(grid, [](double) { return 1.0; });
    const TimeKernel kt = to_time(f, 5.0, 0.1);
    const double peak = kt.at_lag(0)(0, 0).real();
    CHECK(peak == doctest::Approx(2.0 * 25.0 / (2.0 * std::numbers::pi)).epsilon(1e-3));
    for (std::size_t j = 0; j < kt.size(); ++j) {
        if (std::abs(kt.time(j)) >= 1.0) {
            CHECK(std::abs(kt[j](0, 0)) < 0.05 * peak);
        }
    }
}

TEST_CASE("frequency-time round trip is spectrally accurate for band-limited input") {
    const FrequencyGrid grid(2001, 50.0);
    MatrixFunction f(grid, 2);
    const Matrix h1 = oracle::random_hpd(2, 1);
    const Matrix h2 = oracle::random_hpd(2, 2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        f[k] = std::exp(-0.25 * (w - 3.0) * (w - 3.0)) * h1 +
               std::exp(-0.20 * (w + 5.0) * (w + 5.0)) * h2;
    }
    const TimeKernel kt = to_time(f, 14.0, 0.9 * std::numbers::pi / 50.0);
    const MatrixFunction back = to_frequency(kt, grid);
    CHECK(max_abs_diff(f, back) < 1e-10 * f.max_norm());
}

TEST_CASE("aliasing guard") {
    const FrequencyGrid grid(101, 10.0);
    const MatrixFunction f = MatrixFunction::from_scalar(grid, [](double) { return 1.0; });
    CHECK_THROWS_AS(to_time(f, 1.0, 0.5), AliasingRisk);
    const TimeKernel coarse(0.5, 10, 1);
    CHECK_THROWS_AS(to_frequency(coarse, grid), AliasingRisk);
}

TEST_CASE("quadratic positivity probe") {
    SUBCASE("thermal ohmic-Drude kernel stays nonnegative") {
        const double gamma0 = 0.5, temp = 1.0, lam = 5.0;
        const FrequencyGrid grid(1601, 40.0);
        const MatrixFunction nu = MatrixFunction::from_scalar(grid, [&](double w) {
            return oracle::thermal_kappa(temp, w) * gamma0 / (1.0 + w * w / (lam * lam));
        });
        const TimeKernel kt = to_time(nu, 6.0, std::numbers::pi / 40.0);
        const double worst = posdef_quadratic_check(kt, 200, 42);
        CHECK(worst >= -1e-8);
    }
    SUBCASE("negative kernel is detected") {
        TimeKernel kt(0.1, 60, 1);
        for (std::size_t j = 0; j < kt.size(); ++j) {
            kt[j](0, 0) = -std::exp(-std::abs(kt.time(j)));
        }
        CHECK(posdef_quadratic_check(kt, 50, 7) < 0.0);
    }
    SUBCASE("zero kernel gives exactly zero") {
        const TimeKernel kt(0.1, 40, 2);
        CHECK(posdef_quadratic_check(kt, 20, 3) == 0.0);
    }
}

TEST_CASE("spectral positivity check") {
    const FrequencyGrid grid(201, 6.0);
    SUBCASE("identity matrix function gives 1") {
        MatrixFunction f(grid, 3);
        for (std::size_t k = 0; k < grid.size(); ++k) f[k] = Matrix::Identity(3, 3);
        CHECK(posdef_spectral_check(f) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("thermal noise kernel is nonnegative") {
        const MatrixFunction nu = MatrixFunction::from_scalar(
            grid, [](double w) { return oracle::thermal_kappa(0.7, w) * 0.3; });
        CHECK(posdef_spectral_check(nu) >= 0.0);
    }
    SUBCASE("non-Hermitian input is rejected") {
        MatrixFunction f(grid, 2);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            f[k] << Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(0.0, 1.0),
                Complex(1.0, 0.0);
        }
        CHECK_THROWS_AS(posdef_spectral_check(f), NonHermitianInput);
    }
}

TEST_CASE("spectral positivity implies quadratic-form positivity on examples") {
    const FrequencyGrid grid(801, 30.0);
    const auto check_env = [&](const std::function<double(double)>& curve) {
        const MatrixFunction nu = MatrixFunction::from_scalar(grid, curve);
        REQUIRE(posdef_spectral_check(nu) >= -1e-12);
        const TimeKernel kt = to_time(nu, 5.0, std::numbers::pi / 30.0);
        CHECK(posdef_quadratic_check(kt, 60, 11) >= -1e-7);
    };
    check_env([](double w) { return oracle::thermal_kappa(1.0, w) / (1.0 + w * w / 36.0); });
    check_env([](double w) { return std::abs(w) * std::exp(-std::abs(w) / 8.0); });
    check_env([](double w) { return 2.0 * 1.5 * 0.4 / (1.0 + w * w / 25.0); });
}
