#include "decum/market_model.hpp"

#include <cmath>
#include <stdexcept>

namespace decum {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

void KouAssetParams::validate() const {
    if (!(sigma >= 0.0)) throw std::invalid_argument("asset sigma must be >= 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("asset lambda must be >= 0");
    if (!(u_up >= 0.0 && u_up <= 1.0)) throw std::invalid_argument("asset u_up must lie in [0,1]");
    // eta1 > 1 keeps E[xi] finite, eta2 > 0 keeps the density normalizable.
    if (!(eta1 > 1.0)) throw std::invalid_argument("asset eta1 must exceed 1");
    if (!(eta2 > 0.0)) throw std::invalid_argument("asset eta2 must be > 0");
}

void MarketParams::validate() const {
    stock.validate();
    bond.validate();
    if (!(rho_sb >= -1.0 && rho_sb <= 1.0))
        throw std::invalid_argument("rho_sb must lie in [-1,1]");
    if (!(mu_c_bond >= 0.0)) throw std::invalid_argument("mu_c_bond must be >= 0");
}

MarketParams MarketParams::default_calibration() {
    MarketParams m;
    // CRSP cap-weighted index and 30-day T-bill, real, 1926-2024 monthly,
    // threshold-estimated jump parameters.
    m.stock = {0.088241, 0.147361, 0.31313, 0.22581, 4.3608, 5.5309};
    m.bond = {0.0034, 0.0139, 0.3838, 0.3947, 61.510, 53.356};
    m.rho_sb = 0.096279;
    m.mu_c_bond = 0.03;
    return m;
}

double mean_jump_excess(const KouAssetParams& a) {
    return a.u_up * a.eta1 / (a.eta1 - 1.0) + (1.0 - a.u_up) * a.eta2 / (a.eta2 + 1.0) - 1.0;
}

double mean_log_jump(const KouAssetParams& a) { return a.u_up / a.eta1 - (1.0 - a.u_up) / a.eta2; }

double jump_density(const KouAssetParams& a, double y) {
    if (y >= 0.0) return a.u_up * a.eta1 * std::exp(-a.eta1 * y);
    return (1.0 - a.u_up) * a.eta2 * std::exp(a.eta2 * y);
}

std::complex<double> density_fourier_conjugate(const KouAssetParams& a, double omega) {
    const std::complex<double> i2pw(0.0, two_pi * omega);
    return a.u_up / (1.0 - i2pw / a.eta1) + (1.0 - a.u_up) / (1.0 + i2pw / a.eta2);
}

std::complex<double> asset_characteristic_exponent(const KouAssetParams& a, double omega,
                                                   double drift_add) {
    const double w = two_pi * omega;
    const double drift = a.mu + drift_add - a.lambda * mean_jump_excess(a) -
                         0.5 * a.sigma * a.sigma;
    std::complex<double> psi(-0.5 * a.sigma * a.sigma * w * w, drift * w);
    if (a.lambda > 0.0) psi += a.lambda * (density_fourier_conjugate(a, omega) - 1.0);
    return psi;
}

std::complex<double> characteristic_exponent(const MarketParams& mkt, double omega1, double omega2,
                                             bool use_borrow_spread) {
    const double cross =
        -mkt.rho_sb * mkt.stock.sigma * mkt.bond.sigma * (two_pi * omega1) * (two_pi * omega2);
    return asset_characteristic_exponent(mkt.stock, omega1) +
           asset_characteristic_exponent(mkt.bond, omega2,
                                         use_borrow_spread ? mkt.mu_c_bond : 0.0) +
           cross;
}

}  // namespace decum
