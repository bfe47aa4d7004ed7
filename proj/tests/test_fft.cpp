#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "uplab/fft.hpp"
#include "uplab/rng.hpp"

using namespace uplab;
using cplx = std::complex<double>;

TEST_CASE("impulse transforms to a flat spectrum") {
    std::vector<cplx> x = {1, 0, 0, 0};
    auto X = fft(x);
    for (const auto& z : X) {
        REQUIRE(z.real() == 1.0);
        REQUIRE(z.imag() == 0.0);
    }
}

TEST_CASE("constant input concentrates in the DC bin") {
    std::vector<cplx> x = {1, 1, 1, 1};
    auto X = fft(x);
    REQUIRE(X[0].real() == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(X[0].imag() == Catch::Approx(0.0).margin(1e-12));
    for (std::size_t k = 1; k < 4; ++k) REQUIRE(std::abs(X[k]) < 1e-12);
}

TEST_CASE("forward is unnormalized, inverse divides by N") {
    std::vector<cplx> x = {2, 0, 0, 0, 0, 0, 0, 0};
    auto X = fft(x);
    REQUIRE(X[3].real() == 2.0);
    auto back = fft(X, true);
    REQUIRE(back[0].real() == Catch::Approx(2.0).margin(1e-12));
    for (std::size_t k = 1; k < 8; ++k) REQUIRE(std::abs(back[k]) < 1e-12);
}

TEST_CASE("round trip recovers the input") {
    for (std::size_t n : {std::size_t(1024), std::size_t(65536)}) {
        Rng rng(n);
        std::vector<cplx> x(n);
        for (auto& z : x) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto back = fft(fft(x), true);
        double max_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_err = std::max(max_err, std::abs(back[i] - x[i]));
        REQUIRE(max_err < 1e-10);
    }
}

TEST_CASE("Parseval: time energy equals 1/N spectral energy") {
    Rng rng(31337);
    std::size_t n = 4096;
    std::vector<cplx> x(n);
    double time_energy = 0.0;
    for (auto& z : x) {
        z = {rng.uniform(-1.0, 1.0), 0.0};
        time_energy += std::norm(z);
    }
    auto X = fft(x);
    double spec_energy = 0.0;
    for (const auto& z : X) spec_energy += std::norm(z);
    spec_energy /= static_cast<double>(n);
    REQUIRE(spec_energy == Catch::Approx(time_energy).epsilon(1e-9));
}

TEST_CASE("cosine at an exact bin yields two half-amplitude lines") {
    std::size_t n = 512, k0 = 37;
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = {std::cos(2.0 * kPi * static_cast<double>(k0 * i) / static_cast<double>(n)), 0.0};
    auto X = fft(x);
    for (std::size_t k = 0; k < n; ++k) {
        double expect = (k == k0 || k == n - k0) ? static_cast<double>(n) / 2.0 : 0.0;
        REQUIRE(std::abs(X[k]) == Catch::Approx(expect).margin(1e-9));
    }
}

TEST_CASE("non-power-of-two lengths are rejected") {
    std::vector<cplx> x3 = {1, 2, 3};
    REQUIRE_THROWS_AS(fft(x3), Error);
    std::vector<cplx> x0;
    REQUIRE_THROWS_AS(fft(x0), Error);
    std::vector<cplx> x6 = {1, 2, 3, 4, 5, 6};
    REQUIRE_THROWS_AS(fft(x6), Error);
}

TEST_CASE("fft_real matches complex fft of the same data") {
    Rng rng(99);
    std::vector<double> x(256);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<cplx> xc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xc[i] = {x[i], 0.0};
    auto a = fft_real(x);
    auto b = fft(xc);
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(a[i] == b[i]);
}
