#include <cmath>
#include <complex>

#include "decum/market_model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace decum;

TEST_SUITE_BEGIN("market_model");

TEST_CASE("shipped calibration is internally valid") {
    const MarketParams mkt = MarketParams::default_calibration();
    CHECK_NOTHROW(mkt.validate());
    // spot values of the fit, frozen as a regression pin
    CHECK(mkt.stock.mu == doctest::Approx(0.088241).epsilon(1e-12));
    CHECK(mkt.stock.sigma == doctest::Approx(0.147361).epsilon(1e-12));
    CHECK(mkt.bond.sigma == doctest::Approx(0.0139).epsilon(1e-12));
    CHECK(mkt.rho_sb == doctest::Approx(0.096279).epsilon(1e-12));
    CHECK(mkt.mu_c_bond == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("parameter validation rejects out-of-range inputs") {
    MarketParams mkt = MarketParams::default_calibration();
    SUBCASE("eta1 must exceed 1 so the jump multiplier has a mean") {
        mkt.stock.eta1 = 1.0;
        CHECK_THROWS(mkt.validate());
    }
    SUBCASE("jump direction probability is a probability") {
        mkt.bond.u_up = 1.5;
        CHECK_THROWS(mkt.validate());
    }
    SUBCASE("correlation bounded") {
        mkt.rho_sb = -1.01;
        CHECK_THROWS(mkt.validate());
    }
    SUBCASE("volatility nonnegative") {
        mkt.stock.sigma = -0.1;
        CHECK_THROWS(mkt.validate());
    }
    SUBCASE("borrowing spread nonnegative") {
        mkt.mu_c_bond = -0.01;
        CHECK_THROWS(mkt.validate());
    }
}

TEST_CASE("jump density matches the closed form and integrates to one") {
    const MarketParams mkt = MarketParams::default_calibration();
    for (const KouAssetParams* a : {&mkt.stock, &mkt.bond}) {
        for (double y : {-0.8, -0.05, 0.0, 0.03, 0.5})
            CHECK(jump_density(*a, y) == doctest::Approx(oracle::kou_jump_density(*a, y))
                                             .epsilon(1e-14));
        const double mass = oracle::integrate([&](double y) { return jump_density(*a, y); },
                                              -80.0 / a->eta2, 0.0) +
                            oracle::integrate([&](double y) { return jump_density(*a, y); }, 0.0,
                                              80.0 / a->eta1);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mean jump excess agrees with quadrature of e^y against the density") {
    const MarketParams mkt = MarketParams::default_calibration();
    CHECK(mean_jump_excess(mkt.stock) ==
          doctest::Approx(oracle::mean_jump_excess_quadrature(mkt.stock)).epsilon(1e-10));
    CHECK(mean_jump_excess(mkt.bond) ==
          doctest::Approx(oracle::mean_jump_excess_quadrature(mkt.bond)).epsilon(1e-10));

    KouAssetParams odd;
    odd.u_up = 0.9;
    odd.eta1 = 1.3;
    odd.eta2 = 0.7;
    CHECK(mean_jump_excess(odd) ==
          doctest::Approx(oracle::mean_jump_excess_quadrature(odd)).epsilon(1e-9));

    // the calibrated markets drag returns down: both excesses are negative
    CHECK(mean_jump_excess(mkt.stock) < 0.0);
    CHECK(mean_jump_excess(mkt.bond) < 0.0);
}

TEST_CASE("mean log jump agrees with quadrature of y against the density") {
    const MarketParams mkt = MarketParams::default_calibration();
    for (const KouAssetParams* a : {&mkt.stock, &mkt.bond}) {
        const double by_quadrature =
            oracle::integrate([&](double y) { return y * oracle::kou_jump_density(*a, y); },
                              -80.0 / a->eta2, 0.0) +
            oracle::integrate([&](double y) { return y * oracle::kou_jump_density(*a, y); }, 0.0,
                              80.0 / a->eta1);
        CHECK(mean_log_jump(*a) == doctest::Approx(by_quadrature).epsilon(1e-10));
    }
}

TEST_CASE("jump density transform matches quadrature at sample frequencies") {
    const MarketParams mkt = MarketParams::default_calibration();
    for (double w : {0.0, 0.17, 1.0, -2.5}) {
        const std::complex<double> lib = density_fourier_conjugate(mkt.stock, w);
        const std::complex<double> ref = oracle::jump_transform_quadrature(mkt.stock, w);
        CHECK(lib.real() == doctest::Approx(ref.real()).epsilon(1e-9));
        CHECK(lib.imag() == doctest::Approx(ref.imag()).epsilon(1e-9));
    }
    // unit mass at zero frequency
    const std::complex<double> at0 = density_fourier_conjugate(mkt.bond, 0.0);
    CHECK(at0.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(at0.imag() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("characteristic exponent vanishes at zero frequency") {
    const MarketParams mkt = MarketParams::default_calibration();
    const std::complex<double> psi = characteristic_exponent(mkt, 0.0, 0.0);
    CHECK(std::abs(psi) == doctest::Approx(0.0).epsilon(1e-15));
    const std::complex<double> psi_spread = characteristic_exponent(mkt, 0.0, 0.0, true);
    CHECK(std::abs(psi_spread) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("no jumps, no correlation reduces to the Brownian exponent") {
    MarketParams mkt = MarketParams::default_calibration();
    mkt.stock.lambda = 0.0;
    mkt.bond.lambda = 0.0;
    mkt.rho_sb = 0.0;
    const double mu = mkt.stock.mu, sig = mkt.stock.sigma;
    for (double w1 : {0.3, -1.7, 4.0}) {
        const std::complex<double> psi = characteristic_exponent(mkt, w1, 0.0);
        const double tp = 2.0 * M_PI * w1;
        CHECK(psi.real() == doctest::Approx(-sig * sig * tp * tp / 2.0).epsilon(1e-13));
        CHECK(psi.imag() == doctest::Approx((mu - sig * sig / 2.0) * tp).epsilon(1e-13));
    }
}

TEST_CASE("borrowing spread shifts only the bond drift term") {
    const MarketParams mkt = MarketParams::default_calibration();
    for (double w2 : {0.4, -2.0}) {
        const std::complex<double> base = characteristic_exponent(mkt, 0.7, w2, false);
        const std::complex<double> spread = characteristic_exponent(mkt, 0.7, w2, true);
        CHECK(spread.real() == doctest::Approx(base.real()).epsilon(1e-13));
        CHECK(spread.imag() - base.imag() ==
              doctest::Approx(mkt.mu_c_bond * 2.0 * M_PI * w2).epsilon(1e-12));
    }
}

TEST_SUITE_END();
