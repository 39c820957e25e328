#pragma once

#include "decum/array2.hpp"
#include "decum/fourier_kernel.hpp"
#include "decum/market_model.hpp"

namespace decum {

/// Decumulation problem description. Wealth is in thousands of dollars;
/// times in years. Withdrawals happen at M+1 rebalancing dates t_0..t_M
/// spaced dt() apart, with the terminal date t_M = T forcing q = 0 and
/// full liquidation.
struct Scenario {
    double horizon_years = 30.0;
    int periods_m = 30;
    double w0 = 1000.0;
    double q_min = 30.0;
    double q_max = 60.0;
    double p_max = 1.5;
    double alpha = 0.05;
    double kappa = 1.0;
    double epsilon = -1e-4;

    double dt() const { return horizon_years / periods_m; }
    void validate() const;
};

/// Discretization knobs. n1 is the stock-direction grid size; everything
/// else scales off it by the documented defaults.
struct Numerics {
    int n1 = 512;
    int n2 = 0;  ///< 0 means "same as n1"
    double delta = 1e-6;
    double x_anchor = 4.60517018598809136804;  ///< log(100)
    double offset_min = -7.5;
    double offset_max = 10.0;
    int n_w_factor = 4;          ///< wealth grid size = factor * n1
    int n_control_divisor = 10;  ///< candidate counts = n1 / divisor
    double w_scale = 1.0;        ///< signed-log wealth transform scale
    /// Wealth-node span and count overrides. With w_grid_max <= w_grid_min
    /// (the default) the span derives from the log-domain edges, and with
    /// n_w_override = 0 the count is n_w_factor * n1; domain studies set
    /// them explicitly so the wealth nodes stay put while the log domain
    /// grows.
    double w_grid_min = 0.0;
    double w_grid_max = 0.0;
    int n_w_override = 0;
    int wstar_coarse_points = 65;
    double wstar_lo_mult = -1.0;  ///< coarse scan low bound, times w0
    double wstar_hi_mult = 3.0;
    double wstar_tol_mult = 1e-3;  ///< golden section tolerance, times w0
    /// Coarsest grid of the W* search ladder. 256 is the smallest size at
    /// which the calibrated bond kernel meets the delta budget; the bond
    /// density is nearly a point mass and needs dx fine enough to resolve it.
    int coarsest_n1 = 256;
    int green_max_oversample = 8;
    double clamp_fail_fraction = 0.01;

    int rows() const { return n1; }
    int cols() const { return n2 > 0 ? n2 : n1; }
    int n_w() const { return n_w_override > 0 ? n_w_override : n_w_factor * n1; }
    int n_p() const { return n1 / n_control_divisor; }
    int n_q() const { return n1 / n_control_divisor; }
    void validate() const;
};

/// The solver tracks two surfaces: one on the positive-bond grid
/// (x2 = log of bond wealth) and one on the debt grid (x2 = log of bond
/// debt, total wealth w = e^{x1} - e^{x2}). Both share the stock axis.
struct GridPair {
    GridSpec pos;
    GridSpec neg;
};

GridPair build_grids(const Numerics& num);

/// Terminal payoff of the scalarized objective at total wealth w:
///   epsilon * w + kappa * (w_star + min(w - w_star, 0) / alpha).
double terminal_value(double w, double w_star, const Scenario& scn);

/// Value surfaces at one instant, on both grids.
struct ValueSurfacePair {
    Array2<double> pos;
    Array2<double> neg;
};

/// Fill both surfaces with the terminal payoff.
ValueSurfacePair terminal_surfaces(const GridPair& grids, double w_star, const Scenario& scn);

/// Extend a surface from the n1 x n2 interior to the padded 2n1 x 2n2
/// lattice. Interior occupies padded index [n/2, 3n/2) in each dimension.
/// Left and bottom pads clamp to the nearest interior node; top (stock)
/// and right (bond) pads extrapolate linearly in the wealth that the
/// padded coordinate represents, so surfaces that are asymptotically
/// linear in w stay exact. debt_grid flips the sign of the bond leg's
/// wealth contribution.
Array2<double> make_padded(const Array2<double>& v, const GridSpec& grid, bool debt_grid);

/// Advance both surfaces by one period between rebalances.
ValueSurfacePair step_between_rebalances(const ValueSurfacePair& v, const GridPair& grids,
                                         const GreenWeights& w_pos, const GreenWeights& w_neg);

}  // namespace decum
