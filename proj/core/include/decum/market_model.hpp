#pragma once

#include <complex>

namespace decum {

/// Double-exponential jump diffusion parameters for one asset.
/// Jumps multiply the price by xi = e^y with
///   f(y) = u_up * eta1 * exp(-eta1 * y)        for y >= 0,
///          (1 - u_up) * eta2 * exp( eta2 * y)  for y <  0.
struct KouAssetParams {
    double mu = 0.0;      ///< real drift of the price process
    double sigma = 0.0;   ///< diffusive volatility
    double lambda = 0.0;  ///< jump arrival intensity (per year)
    double u_up = 0.5;    ///< probability that a jump is upward
    double eta1 = 2.0;    ///< upward tail rate, must exceed 1 so E[xi] exists
    double eta2 = 2.0;    ///< downward tail rate

    void validate() const;
};

/// Joint market: stock and bond with correlated Brownian parts and
/// independent jump streams. mu_c_bond is the extra borrowing spread
/// applied to the bond drift while wealth in the bond account is negative.
struct MarketParams {
    KouAssetParams stock;
    KouAssetParams bond;
    double rho_sb = 0.0;
    double mu_c_bond = 0.03;

    void validate() const;

    /// Long-horizon US market fit (real, annualized) used by the shipped configs.
    static MarketParams default_calibration();
};

/// E[xi - 1] = u*eta1/(eta1-1) + (1-u)*eta2/(eta2+1) - 1, the drift
/// compensator for the jump part.
double mean_jump_excess(const KouAssetParams& a);

/// E[log xi] = u/eta1 - (1-u)/eta2.
double mean_log_jump(const KouAssetParams& a);

/// Density of the log jump size at y.
double jump_density(const KouAssetParams& a, double y);

/// Fourier transform of the jump density at frequency omega with the
/// e^{+2*pi*i*omega*y} convention:
///   u /(1 - 2*pi*i*omega/eta1) + (1-u)/(1 + 2*pi*i*omega/eta2).
std::complex<double> density_fourier_conjugate(const KouAssetParams& a, double omega);

/// Characteristic exponent of the log price of one asset at frequency
/// omega (cycles, not radians): the Green's function of the one-asset
/// PIDE is exp(psi * dt) in Fourier space. drift_add shifts the drift,
/// which is how the borrowing spread enters.
std::complex<double> asset_characteristic_exponent(const KouAssetParams& a, double omega,
                                                   double drift_add = 0.0);

/// Joint characteristic exponent at (omega1, omega2) = (stock, bond)
/// frequencies, including the Brownian cross term
///   -rho * sigma_s * sigma_b * (2*pi*omega1) * (2*pi*omega2).
/// With use_borrow_spread the bond drift picks up mu_c_bond; everything
/// else, including the cross term, is unchanged.
std::complex<double> characteristic_exponent(const MarketParams& mkt, double omega1, double omega2,
                                             bool use_borrow_spread = false);

}  // namespace decum
