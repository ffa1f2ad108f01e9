#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grafluid/common.hpp"
#include "grafluid/special_functions.hpp"
#include "oracles.hpp"

using namespace grafluid;
namespace orc = grafluid::oracles;

TEST_CASE("fermi_phi closed forms at x = 0") {
    CHECK(sf::fermi_phi(1.0, 0.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(sf::fermi_phi(2.0, 0.0) == doctest::Approx(pi * pi / 12.0).epsilon(1e-15));
    CHECK(sf::fermi_phi(3.0, 0.0) ==
          doctest::Approx(0.90154267736969571).epsilon(1e-14));
}

TEST_CASE("fermi_phi agrees with the defining integral") {
    for (double s : {1.0, 2.0, 3.0}) {
        for (double x : {-10.0, -3.0, -1.0, -0.3, 0.0, 0.7, 1.0, 2.5, 8.0, 20.0}) {
            const double ref = orc::fermi_integral(s, x);
            CHECK(sf::fermi_phi(s, x) ==
                  doctest::Approx(ref).epsilon(1e-11).scale(std::max(1.0, std::abs(ref))));
        }
    }
}

TEST_CASE("fermi_phi production integral path matches closed forms") {
    for (double x : {-5.0, 0.0, 3.0, 15.0}) {
        CHECK(sf::fermi_phi_integral(2.0, x) ==
              doctest::Approx(sf::fermi_phi(2.0, x)).epsilon(1e-11));
    }
    // fractional order against the independent dense rule
    CHECK(sf::fermi_phi(1.5, 0.8) == doctest::Approx(orc::fermi_integral(1.5, 0.8)).epsilon(1e-10));
    CHECK(sf::fermi_phi(0.5, -1.0) ==
          doctest::Approx(orc::fermi_integral(0.5, -1.0)).epsilon(1e-10));
}

TEST_CASE("maxwell-boltzmann tail: phi_2(-20) ~ e^{-20}") {
    const double v = sf::fermi_phi(2.0, -20.0);
    CHECK(v == doctest::Approx(std::exp(-20.0)).epsilon(1e-8));
    CHECK(v == doctest::Approx(orc::fermi_integral(2.0, -20.0)).epsilon(1e-10));
}

TEST_CASE("negative integer orders") {
    const auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    for (double x : {-3.0, -0.5, 0.0, 1.2, 3.0}) {
        const double s = sigma(x);
        CHECK(sf::fermi_phi(0.0, x) == doctest::Approx(s).epsilon(1e-14));
        CHECK(sf::fermi_phi(-1.0, x) == doctest::Approx(s * (1 - s)).epsilon(1e-13));
        CHECK(sf::fermi_phi(-2.0, x) ==
              doctest::Approx(s * (1 - s) * (1 - 2 * s)).epsilon(2e-13).scale(1.0));
    }
    // parity phi_{-m}(x) = (-1)^{m+1} phi_{-m}(-x)
    for (int m : {3, 7, 20, 33}) {
        const double left = sf::fermi_phi(-m, 1.3);
        const double right = ((m % 2 == 0) ? -1.0 : 1.0) * sf::fermi_phi(-m, -1.3);
        CHECK(left == doctest::Approx(right).epsilon(1e-11));
    }
}

TEST_CASE("derivative identity phi_s' = phi_{s-1} with observed order >= 1.9") {
    for (double s : {1.0, 2.0, 3.0, -5.0, -14.0}) {
        for (double x : {-2.0, 0.4, 1.7}) {
            double err[2];
            const double h[2] = {1e-3, 1e-4};
            for (int i = 0; i < 2; ++i) {
                const double fd =
                    (sf::fermi_phi(s, x + h[i]) - sf::fermi_phi(s, x - h[i])) / (2 * h[i]);
                err[i] = std::abs(fd - sf::fermi_phi(s - 1.0, x));
            }
            const double scale = std::max(1.0, std::abs(sf::fermi_phi(s - 1.0, x)));
            if (err[0] > 1e-9 * scale) {  // order measurable above rounding noise
                const double order = std::log10(err[0] / err[1]);
                CHECK(order >= 1.9);
            }
            CHECK(err[1] <= 1e-6 * scale);
        }
    }
}

TEST_CASE("monotonicity and order bound") {
    for (double s : {1.0, 2.0, 3.0}) {
        double prev = sf::fermi_phi(s, -12.0);
        for (int i = 1; i <= 48; ++i) {
            const double x = -12.0 + 24.0 * i / 48.0;
            const double v = sf::fermi_phi(s, x);
            CHECK(v > prev);
            prev = v;
        }
    }
    for (int i = 0; i <= 40; ++i) {
        const double x = -10.0 + 20.0 * i / 40.0;
        CHECK(sf::fermi_phi(1.0, x) < sf::fermi_phi(2.0, x));
    }
}

TEST_CASE("degenerate asymptote phi_s(x) Gamma(s+1)/x^s -> 1") {
    for (double s : {1.0, 2.0, 3.0}) {
        const double r2 =
            sf::fermi_phi(s, 1e2) * std::tgamma(s + 1.0) / std::pow(1e2, s);
        const double r3 =
            sf::fermi_phi(s, 1e3) * std::tgamma(s + 1.0) / std::pow(1e3, s);
        CHECK(std::abs(r2 - 1.0) < 1e-2);
        CHECK(std::abs(r3 - 1.0) <= std::abs(r2 - 1.0) + 1e-15);
    }
}

TEST_CASE("fermi_phi_series") {
    CHECK(sf::fermi_phi_series(2.0, 0.0) == doctest::Approx(pi * pi / 12.0).epsilon(1e-15));
    CHECK(sf::fermi_phi_series(1.0, 0.5) ==
          doctest::Approx(std::log1p(std::exp(0.5))).epsilon(1e-13));
    CHECK_THROWS_AS((void)sf::fermi_phi_series(2.0, 3.2), std::domain_error);
    for (double s : {1.0, 2.0, 3.0}) {
        for (double x : {-3.0, -1.1, 0.2, 2.0, 3.0}) {
            CHECK(sf::fermi_phi_series(s, x) ==
                  doctest::Approx(sf::fermi_phi(s, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dirichlet eta") {
    CHECK(sf::dirichlet_eta(1.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(sf::dirichlet_eta(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sf::dirichlet_eta(-1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sf::dirichlet_eta(2.0) == doctest::Approx(pi * pi / 12.0).epsilon(1e-15));
    CHECK(sf::dirichlet_eta(-2.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(sf::dirichlet_eta(-4.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // continuity through the removable point of (1 - 2^{1-s}) zeta(s)
    CHECK(sf::dirichlet_eta(1.0 + 1e-6) == doctest::Approx(std::numbers::ln2).epsilon(1e-5));
    CHECK(sf::dirichlet_eta(1.0 - 1e-6) == doctest::Approx(std::numbers::ln2).epsilon(1e-5));
    // half-integer sample against the plain alternating series
    double direct = 0.0;
    for (int k = 200000; k >= 1; --k) direct += (k % 2 ? 1.0 : -1.0) / std::pow(k, 3.5);
    CHECK(sf::dirichlet_eta(3.5) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("fermi_phi_inverse") {
    CHECK(sf::fermi_phi_inverse(pi * pi / 12.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // small-density branch
    const double x = sf::fermi_phi_inverse(1e-8);
    CHECK(x == doctest::Approx(std::log(1e-8)).epsilon(1e-9));
    CHECK(std::abs(sf::fermi_phi(2.0, x) - 1e-8) <= 1e-12);
    // round trips
    for (double y : {0.01, 1.0, 100.0}) {
        CHECK(sf::fermi_phi(2.0, sf::fermi_phi_inverse(y)) ==
              doctest::Approx(y).epsilon(1e-10));
    }
    // monotone in y
    double prev = sf::fermi_phi_inverse(1e-4);
    for (double y : {1e-2, 1.0, 10.0, 1e3}) {
        const double v = sf::fermi_phi_inverse(y);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS((void)sf::fermi_phi_inverse(-1.0), std::domain_error);
}

TEST_CASE("bessel_i basics and quadrature oracle") {
    CHECK(sf::bessel_i(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sf::bessel_i(1, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    // (1/pi) int cos(2 th) cos^2 th dth = 1/4 = I_2''(0) from the series
    const double quad = orc::integrate(
                            [](double th) { return std::cos(2 * th) * std::cos(th) * std::cos(th); },
                            0.0, pi, 64) /
                        pi;
    CHECK(quad == doctest::Approx(0.25).epsilon(1e-13));
    const double h = 1e-4;
    const double i2pp = (sf::bessel_i(2, 2 * h) - 2 * sf::bessel_i(2, h)) / (h * h);
    CHECK(i2pp == doctest::Approx(0.25).epsilon(1e-5));

    for (int n : {0, 1, 2, 4}) {
        for (double x : {0.5, 2.0, 10.0, 14.9, 15.1, 40.0}) {
            const double ref = orc::integrate(
                                   [&](double th) {
                                       return std::cos(n * th) * std::exp(x * std::cos(th));
                                   },
                                   0.0, pi, 256) /
                               pi;
            CHECK(sf::bessel_i(n, x) == doctest::Approx(ref).epsilon(2e-11));
        }
    }
}

TEST_CASE("bessel ratio: monotone, limits, inverse") {
    double prev = -1.0;
    for (int i = 0; i <= 60; ++i) {
        const double b = 0.25 * i;
        const double r = sf::bessel_i_scaled(1, b) / sf::bessel_i_scaled(0, b);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
    CHECK(sf::bessel_i_scaled(1, 5e3) / sf::bessel_i_scaled(0, 5e3) ==
          doctest::Approx(1.0).epsilon(1e-3));
    for (double u : {0.0, 0.1, 0.5, 0.9, 0.99, 0.9999}) {
        const double b = sf::bessel_i_ratio_inverse(u);
        const double r = sf::bessel_i_scaled(1, b) / sf::bessel_i_scaled(0, b);
        CHECK(r == doctest::Approx(u).scale(1.0).epsilon(1e-12));
    }
    CHECK(sf::bessel_i_ratio_inverse(0.5) == doctest::Approx(1.1593199207501384).epsilon(1e-12));
}
