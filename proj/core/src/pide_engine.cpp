#include "decum/pide_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace decum {

void Scenario::validate() const {
    if (!(horizon_years > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (periods_m < 1) throw std::invalid_argument("need at least one rebalancing period");
    if (!(q_min >= 0.0 && q_max >= q_min))
        throw std::invalid_argument("withdrawal bounds must satisfy 0 <= q_min <= q_max");
    if (!(p_max >= 0.0)) throw std::invalid_argument("p_max must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
    if (!std::isfinite(w0) || !std::isfinite(epsilon))
        throw std::invalid_argument("w0 and epsilon must be finite");
}

void Numerics::validate() const {
    if (n1 < 20 || n1 % 2) throw std::invalid_argument("n1 must be even and at least 20");
    if (n2 < 0 || (n2 > 0 && n2 % 2)) throw std::invalid_argument("n2 must be even (or 0)");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(offset_max > offset_min)) throw std::invalid_argument("offsets must be increasing");
    if (n_w_factor < 1 || n_control_divisor < 1 || n1 / n_control_divisor < 2)
        throw std::invalid_argument("wealth/control grid factors are out of range");
    if (!(w_scale > 0.0)) throw std::invalid_argument("w_scale must be positive");
    if (wstar_coarse_points < 3) throw std::invalid_argument("coarse scan needs >= 3 points");
    if (!(wstar_hi_mult > wstar_lo_mult))
        throw std::invalid_argument("threshold scan bounds must be increasing");
    if (!(wstar_tol_mult > 0.0)) throw std::invalid_argument("threshold tolerance must be > 0");
    // capped at n1 where used, so a coarse default works with small grids
    if (coarsest_n1 < 16 || (coarsest_n1 & (coarsest_n1 - 1)))
        throw std::invalid_argument("coarsest_n1 must be a power of two >= 16");
    if (green_max_oversample < 1) throw std::invalid_argument("oversample ceiling must be >= 1");
}

GridPair build_grids(const Numerics& num) {
    num.validate();
    GridSpec g;
    g.n1 = num.rows();
    g.n2 = num.cols();
    g.x1_min = num.x_anchor + num.offset_min;
    g.x1_max = num.x_anchor + num.offset_max;
    g.x2_min = num.x_anchor + num.offset_min;
    g.x2_max = num.x_anchor + num.offset_max;
    g.x1_anchor = num.x_anchor;
    g.x2_anchor = num.x_anchor;
    g.validate();
    return GridPair{g, g};  // debt grid shares the extents; only the dynamics differ
}

double terminal_value(double w, double w_star, const Scenario& scn) {
    return scn.epsilon * w + scn.kappa * (w_star + std::min(w - w_star, 0.0) / scn.alpha);
}

ValueSurfacePair terminal_surfaces(const GridPair& grids, double w_star, const Scenario& scn) {
    ValueSurfacePair v;
    v.pos = Array2<double>(grids.pos.n1, grids.pos.n2);
    v.neg = Array2<double>(grids.neg.n1, grids.neg.n2);
    std::vector<double> e1(grids.pos.n1), e2(grids.pos.n2);
    for (int i = 0; i < grids.pos.n1; ++i) e1[i] = std::exp(grids.pos.x1(i));
    for (int j = 0; j < grids.pos.n2; ++j) e2[j] = std::exp(grids.pos.x2(j));
    for (int i = 0; i < grids.pos.n1; ++i)
        for (int j = 0; j < grids.pos.n2; ++j)
            v.pos(i, j) = terminal_value(e1[i] + e2[j], w_star, scn);
    for (int i = 0; i < grids.neg.n1; ++i)
        for (int j = 0; j < grids.neg.n2; ++j)
            v.neg(i, j) = terminal_value(std::exp(grids.neg.x1(i)) - std::exp(grids.neg.x2(j)),
                                         w_star, scn);
    return v;
}

namespace {
// The linear pad continuation stops growing 2 e-foldings past the edge.
constexpr double kPadGrowthCap = 7.38905609893065;  // e^2
}  // namespace

Array2<double> make_padded(const Array2<double>& v, const GridSpec& grid, bool debt_grid) {
    const int n1 = grid.n1, n2 = grid.n2;
    if (v.n1 != n1 || v.n2 != n2) throw std::invalid_argument("surface does not match the grid");
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("padding needs at least two nodes per dim");

    Array2<double> out(2 * n1, 2 * n2);
    // Padded coordinate: x(i_pad) = x_min + (i_pad - n/2) * dx.
    std::vector<double> e1(2 * n1), e2(2 * n2);
    for (int i = 0; i < 2 * n1; ++i) e1[i] = std::exp(grid.x1_min + (i - n1 / 2) * grid.dx1());
    for (int j = 0; j < 2 * n2; ++j) e2[j] = std::exp(grid.x2_min + (j - n2 / 2) * grid.dx2());
    const double bond_sign = debt_grid ? -1.0 : 1.0;

    // Interior block.
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) out(n1 / 2 + i, n2 / 2 + j) = v(i, j);

    // Toward s -> 0 and b -> 0 the value flattens; replicate the edge.
    for (int ip = 0; ip < n1 / 2; ++ip)
        for (int j = 0; j < n2; ++j) out(ip, n2 / 2 + j) = v(0, j);
    for (int jp = 0; jp < n2 / 2; ++jp)
        for (int i = 0; i < n1; ++i) out(n1 / 2 + i, jp) = v(i, 0);
    for (int ip = 0; ip < n1 / 2; ++ip)
        for (int jp = 0; jp < n2 / 2; ++jp) out(ip, jp) = v(0, 0);

    // Large holdings: the value is asymptotically linear in total wealth
    // w = e^{x1} + bond_sign * e^{x2}, so continue it with the slope taken
    // from the outermost two rows. Stock direction first, covering every
    // column filled so far; then the bond direction over all rows, which
    // also fills the top-right corner consistently.
    //
    // The continuation is frozen two e-foldings past the edge: kernel mass
    // out there decays like e^{-eta L} while the continued values grow
    // like e^{L}, so the freeze barely moves any expectation, but it
    // bounds the pad magnitudes. Left unbounded, a generous domain makes
    // the pads so large that transform roundoff (relative to the array
    // maximum) lands above solution scale and compounds across steps. The
    // cap also limits the lever arm that the one-cell slope difference
    // applies to node-level roundoff, keeping the per-step noise gain
    // below one. The slope stays a one-cell difference on purpose: the
    // solved surfaces carry a shortfall kink, and a wider secant baseline
    // straddles it for a band of rows, continuing them with a visibly
    // wrong slope.
    const int ia = 3 * n1 / 2 - 1;
    const double cap1 = e1[ia] * kPadGrowthCap;
    for (int j = 0; j < 3 * n2 / 2; ++j) {
        const double slope = (out(ia, j) - out(ia - 1, j)) / (e1[ia] - e1[ia - 1]);
        for (int ip = 3 * n1 / 2; ip < 2 * n1; ++ip)
            out(ip, j) = out(ia, j) + slope * (std::min(e1[ip], cap1) - e1[ia]);
    }
    const int jb = 3 * n2 / 2 - 1;
    const double cap2 = e2[jb] * kPadGrowthCap;
    for (int i = 0; i < 2 * n1; ++i) {
        const double slope = (out(i, jb) - out(i, jb - 1)) / (bond_sign * (e2[jb] - e2[jb - 1]));
        for (int jp = 3 * n2 / 2; jp < 2 * n2; ++jp)
            out(i, jp) = out(i, jb) + slope * bond_sign * (std::min(e2[jp], cap2) - e2[jb]);
    }
    return out;
}

namespace {
Array2<double> extract_interior(const Array2<double>& padded, int n1, int n2) {
    Array2<double> v(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) v(i, j) = padded(n1 / 2 + i, n2 / 2 + j);
    return v;
}
}  // namespace

ValueSurfacePair step_between_rebalances(const ValueSurfacePair& v, const GridPair& grids,
                                         const GreenWeights& w_pos, const GreenWeights& w_neg) {
    ValueSurfacePair out;
    out.pos = extract_interior(advance_time(w_pos, make_padded(v.pos, grids.pos, false)),
                               grids.pos.n1, grids.pos.n2);
    out.neg = extract_interior(advance_time(w_neg, make_padded(v.neg, grids.neg, true)),
                               grids.neg.n1, grids.neg.n2);
    return out;
}

}  // namespace decum
