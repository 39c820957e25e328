#include "decum/control_optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace decum {

double wealth_to_coord(double w, double scale) {
    return std::copysign(std::log1p(std::abs(w) / scale), w);
}

double coord_to_wealth(double z, double scale) {
    return std::copysign(scale * std::expm1(std::abs(z)), z);
}

WealthGrid WealthGrid::build(double w_min, double w_max, int n, double scale) {
    if (!(w_max > w_min) || n < 2 || !(scale > 0.0))
        throw std::invalid_argument("WealthGrid::build: need w_max > w_min, n >= 2, scale > 0");
    WealthGrid g;
    g.scale = scale;
    g.z_lo = wealth_to_coord(w_min, scale);
    const double z_hi = wealth_to_coord(w_max, scale);
    g.dz = (z_hi - g.z_lo) / (n - 1);
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i) g.nodes[i] = coord_to_wealth(g.z_lo + g.dz * i, scale);
    g.nodes.front() = w_min;
    g.nodes.back() = w_max;
    return g;
}

int WealthGrid::bracket(double w) const {
    const int n = size();
    const double z = wealth_to_coord(w, scale);
    int k = static_cast<int>(std::floor((z - z_lo) / dz));
    k = std::clamp(k, 0, n - 2);
    // the coordinate arithmetic can land one cell off near node boundaries;
    // cells are half-open so an exact node hit interpolates with weight zero
    while (k > 0 && w < nodes[k]) --k;
    while (k < n - 2 && w >= nodes[k + 1]) ++k;
    return k;
}

double WealthGrid::interp(const std::vector<double>& vals, double w, ClampStats& cs) const {
    assert(vals.size() == nodes.size());
    cs.total_lookups++;
    if (w <= nodes.front()) {
        if (w < nodes.front()) cs.below_min++;
        return vals.front();
    }
    if (w >= nodes.back()) {
        if (w > nodes.back()) cs.above_max++;
        return vals.back();
    }
    const int k = bracket(w);
    const double f = (w - nodes[k]) / (nodes[k + 1] - nodes[k]);
    return vals[k] + f * (vals[k + 1] - vals[k]);
}

std::vector<double> make_wealth_grid(double w_min, double w_max, int n, double scale) {
    return WealthGrid::build(w_min, w_max, n, scale).nodes;
}

namespace {

// ---- interpolation plumbing ------------------------------------------------

struct SortedHit {
    int k = 0;
    double f = 0.0;
};

// Bracket + weight for linear interpolation on a sorted abscissa vector,
// clamped to the end nodes.
SortedHit locate_clamped(const std::vector<double>& xs, double x, ClampStats* cs) {
    const int n = static_cast<int>(xs.size());
    if (cs) cs->total_lookups++;
    if (x <= xs.front()) {
        if (cs && x < xs.front()) cs->below_min++;
        return {0, 0.0};
    }
    if (x >= xs.back()) {
        if (cs && x > xs.back()) cs->above_max++;
        return {n - 2, 1.0};
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const int k = static_cast<int>(it - xs.begin()) - 1;
    return {k, (x - xs[k]) / (xs[k + 1] - xs[k])};
}

double lerp(const std::vector<double>& ys, SortedHit h) {
    return ys[h.k] + h.f * (ys[h.k + 1] - ys[h.k]);
}

double interp_sorted(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                     ClampStats* cs) {
    return lerp(ys, locate_clamped(xs, x, cs));
}

// ---- state lookup on the value surfaces -------------------------------------

struct AxisHit {
    int k = 0;
    double f = 0.0;
    bool below = false;
    bool above = false;
};

AxisHit locate_axis(double x, double leg, double x_min, double dx, int n) {
    AxisHit h;
    const double t = (x - x_min) / dx;
    if (!(t > 0.0)) {
        h.below = (t < 0.0);  // includes -inf from log(0)
        if (h.below) {
            // Continue the first cell's leg-linear secant below the edge,
            // reaching the zero-holding limit at leg = 0. Clamping here
            // instead would credit every sub-floor state with a phantom
            // e^{x_min} holding, which the floor's drift then compounds.
            const double lo = std::exp(x_min);
            const double hi = std::exp(x_min + dx);
            h.f = (leg - lo) / (hi - lo);
        }
    } else if (t >= n - 1) {
        h.k = n - 2;
        h.f = 1.0;
        h.above = (t > n - 1);
    } else {
        h.k = static_cast<int>(t);
        // Weight is linear in the dollar leg, not in its log, so surfaces
        // linear in wealth interpolate exactly.
        const double lo = std::exp(x_min + h.k * dx);
        const double hi = std::exp(x_min + (h.k + 1) * dx);
        h.f = std::clamp((leg - lo) / (hi - lo), 0.0, 1.0);
    }
    return h;
}

struct Stencil {
    bool on_neg = false;
    int i0 = 0, j0 = 0;
    double f1 = 0.0, f2 = 0.0;
};

// Bilinear stencil for the post-rebalance state (stock = w*p,
// bond = w*(1-p)). p in (0,1) and the p = 0 / p = 1 edges read the
// positive grid; p > 1 (levered, bond short) and w <= 0 (insolvent, all
// debt) read the debt grid. Emptied legs extrapolate past the x_min edge
// of their axis toward the zero-holding limit. p is ignored when w <= 0.
Stencil state_stencil(const GridPair& grids, double w, double p, ClampStats& cs) {
    const bool neg = (w <= 0.0) || (p > 1.0);
    const GridSpec& g = neg ? grids.neg : grids.pos;
    // log(0) = -inf lands each emptied leg in the below-edge branch, which
    // extrapolates it to its exact zero-holding limit.
    double leg1, leg2;
    if (w <= 0.0) {
        leg1 = 0.0;
        leg2 = -w;
    } else if (p <= 1.0) {
        leg1 = w * std::max(p, 0.0);
        leg2 = w * (1.0 - std::max(p, 0.0));
    } else {
        leg1 = w * p;
        leg2 = w * (p - 1.0);
    }
    const double x1 = std::log(leg1);
    const double x2 = std::log(leg2);
    const AxisHit a = locate_axis(x1, leg1, g.x1_min, g.dx1(), g.n1);
    const AxisHit b = locate_axis(x2, leg2, g.x2_min, g.dx2(), g.n2);
    cs.total_lookups++;
    if (a.below || b.below) cs.below_min++;
    if (a.above || b.above) cs.above_max++;
    return {neg, a.k, b.k, a.f, b.f};
}

double apply_stencil(const ValueSurfacePair& v, const Stencil& st) {
    const Array2<double>& a = st.on_neg ? v.neg : v.pos;
    // Difference form: exact on constant surfaces even for the
    // extrapolation weights outside [0, 1], so ties stay ties.
    const double r0 = a(st.i0, st.j0) + st.f1 * (a(st.i0 + 1, st.j0) - a(st.i0, st.j0));
    const double r1 = a(st.i0, st.j0 + 1) + st.f1 * (a(st.i0 + 1, st.j0 + 1) - a(st.i0, st.j0 + 1));
    return r0 + st.f2 * (r1 - r0);
}

}  // namespace

// ---- control stages ----------------------------------------------------------

std::vector<double> allocation_candidates(double p_max, int n_p) {
    if (!(p_max > 0.0) || n_p < 2) return {0.0};
    std::vector<double> p(n_p);
    for (int i = 0; i < n_p; ++i) p[i] = p_max * i / (n_p - 1);
    p.front() = 0.0;
    p.back() = p_max;
    return p;
}

AllocationResult optimize_allocation(const ValueSurfacePair& v, const GridPair& grids, double w,
                                     const Scenario& scn, const std::vector<double>& p_candidates,
                                     ClampStats& clamps) {
    (void)scn;
    if (w <= 0.0) {
        const Stencil st = state_stencil(grids, w, 0.0, clamps);
        return {0.0, apply_stencil(v, st)};
    }
    AllocationResult best{0.0, -std::numeric_limits<double>::infinity()};
    for (const double p : p_candidates) {
        const Stencil st = state_stencil(grids, w, p, clamps);
        const double val = apply_stencil(v, st);
        if (val > best.value) best = {p, val};
    }
    return best;
}

WithdrawalResult optimize_withdrawal(const WealthGrid& wg, const std::vector<double>& h, double w,
                                     const Scenario& scn, int n_q, ClampStats& clamps) {
    const double lo = scn.q_min;
    const double hi = (w >= scn.q_max) ? scn.q_max : std::max(scn.q_min, w);
    if (!(hi > lo)) return {lo, lo + wg.interp(h, w - lo, clamps)};
    const int n = std::max(2, n_q);
    WithdrawalResult best{lo, -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < n; ++i) {
        const double q = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
        const double val = q + wg.interp(h, w - q, clamps);
        if (val > best.value) best = {q, val};
    }
    return best;
}

// ---- workspace ----------------------------------------------------------------

namespace {
const Scenario& checked(const Scenario& scn, const MarketParams& mkt) {
    scn.validate();
    mkt.validate();
    return scn;
}
}  // namespace

SolverWorkspace::SolverWorkspace(const Scenario& scn, const MarketParams& mkt, const Numerics& num)
    : scn_(checked(scn, mkt)),
      num_(num),
      grids_(build_grids(num)),
      w_pos_(build_green_weights(mkt, grids_.pos, scn.dt(), num.delta, scn.horizon_years, false,
                                 num.green_max_oversample)),
      w_neg_(build_green_weights(mkt, grids_.neg, scn.dt(), num.delta, scn.horizon_years, true,
                                 num.green_max_oversample)) {
    const GridSpec& g = grids_.pos;
    e1_.resize(g.n1);
    for (int i = 0; i < g.n1; ++i) e1_[i] = std::exp(g.x1(i));
    e2_.resize(g.n2);
    for (int j = 0; j < g.n2; ++j) e2_[j] = std::exp(g.x2(j));
    // The table must cover every node wealth above and the deepest debt the
    // forced minimum withdrawal can dig below the debt grid's own floor.
    double w_max = e1_.back() + e2_.back();
    double w_min = -(e2_.back() + 2.0 * scn_.q_max);
    if (num_.w_grid_max > num_.w_grid_min) {
        w_min = num_.w_grid_min;
        w_max = num_.w_grid_max;
    }
    wgrid_ = WealthGrid::build(w_min, w_max, num_.n_w(), num_.w_scale);
}

// ---- backward induction ---------------------------------------------------------

namespace {

// Rewrite both surfaces at a rebalancing date from the tabulated stage
// values: v(w) = q*(w) + h(w - q*(w)), both controls interpolated.
void refill_from_stages(ValueSurfacePair& v, const std::vector<double>& e1,
                        const std::vector<double>& e2, const WealthGrid& wg,
                        const std::vector<double>& qstar, const std::vector<double>& h,
                        ClampStats& cs) {
    const int n1 = static_cast<int>(e1.size());
    const int n2 = static_cast<int>(e2.size());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double w = e1[i] + e2[j];
            const double q = wg.interp(qstar, w, cs);
            v.pos(i, j) = q + wg.interp(h, w - q, cs);
        }
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double w = e1[i] - e2[j];
            const double q = wg.interp(qstar, w, cs);
            v.neg(i, j) = q + wg.interp(h, w - q, cs);
        }
}

}  // namespace

FixedWstarSolution solve_fixed_wstar(SolverWorkspace& ws, double w_star) {
    const Scenario& scn = ws.scenario();
    const Numerics& num = ws.numerics();
    const GridPair& grids = ws.grids();
    const WealthGrid& wg = ws.wealth_grid();
    const int M = scn.periods_m;
    const int nw = wg.size();
    const std::vector<double> p_cands = allocation_candidates(scn.p_max, num.n_p());

    FixedWstarSolution sol;
    sol.controls.periods_m = M;
    sol.controls.w_min = wg.nodes.front();
    sol.controls.w_max = wg.nodes.back();
    sol.controls.w_scale = wg.scale;
    sol.controls.rows.resize(M + 1);
    sol.controls.rows[M] = {wg.nodes, std::vector<double>(nw, 0.0), std::vector<double>(nw, 0.0)};

    ValueSurfacePair v = terminal_surfaces(grids, w_star, scn);
    std::vector<double> h(nw), pstar(nw), qstar(nw);

    for (int n = M - 1; n >= 0; --n) {
        v = step_between_rebalances(v, grids, ws.weights_pos(), ws.weights_neg());
        for (int k = 0; k < nw; ++k) {
            const AllocationResult ar =
                optimize_allocation(v, grids, wg.nodes[k], scn, p_cands, sol.stats.clamps);
            h[k] = ar.value;
            pstar[k] = ar.p_star;
        }
        for (int k = 0; k < nw; ++k) {
            const WithdrawalResult wr =
                optimize_withdrawal(wg, h, wg.nodes[k], scn, num.n_q(), sol.stats.clamps);
            qstar[k] = wr.q_star;
            if (qstar[k] > scn.q_min && qstar[k] < scn.q_max) sol.stats.interior_q_nodes++;
        }
        sol.stats.total_q_nodes += nw;
        sol.controls.rows[n] = {wg.nodes, qstar, pstar, h};
        if (n == 0) break;  // only the start state is needed at t_0
        refill_from_stages(v, ws.stock_leg(), ws.bond_leg(), wg, qstar, h, sol.stats.clamps);
    }

    const double q0 = wg.interp(qstar, scn.w0, sol.stats.clamps);
    sol.value = q0 + wg.interp(h, scn.w0 - q0, sol.stats.clamps);
    return sol;
}

// ---- frozen-control evaluation ---------------------------------------------------

PideStats evaluate_controls_pide(SolverWorkspace& ws, const ControlTables& ct, double w_star) {
    const Scenario& scn = ws.scenario();
    if (ct.periods_m != scn.periods_m)
        throw std::invalid_argument("evaluate_controls_pide: table horizon does not match scenario");
    if (ct.rows.size() != static_cast<std::size_t>(ct.periods_m) + 1)
        throw std::invalid_argument("evaluate_controls_pide: malformed control tables");
    const GridPair& grids = ws.grids();
    const std::vector<double>& e1 = ws.stock_leg();
    const std::vector<double>& e2 = ws.bond_leg();
    const int n1 = grids.pos.n1, n2 = grids.pos.n2;
    const int M = scn.periods_m;
    ClampStats cs;

    // Three linear functionals of terminal wealth, advanced by the same
    // discrete operators the solver used: total withdrawals collected,
    // shortfall below w_star, and terminal wealth itself.
    ValueSurfacePair aq{Array2<double>(n1, n2), Array2<double>(n1, n2)};
    ValueSurfacePair asf{Array2<double>(n1, n2), Array2<double>(n1, n2)};
    ValueSurfacePair aw{Array2<double>(n1, n2), Array2<double>(n1, n2)};
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double wp = e1[i] + e2[j];
            const double wn = e1[i] - e2[j];
            aq.pos(i, j) = 0.0;
            aq.neg(i, j) = 0.0;
            asf.pos(i, j) = std::min(wp - w_star, 0.0);
            asf.neg(i, j) = std::min(wn - w_star, 0.0);
            aw.pos(i, j) = wp;
            aw.neg(i, j) = wn;
        }

    for (int n = M - 1; n >= 0; --n) {
        aq = step_between_rebalances(aq, grids, ws.weights_pos(), ws.weights_neg());
        asf = step_between_rebalances(asf, grids, ws.weights_pos(), ws.weights_neg());
        aw = step_between_rebalances(aw, grids, ws.weights_pos(), ws.weights_neg());

        const ControlRow& row = ct.rows[n];
        const int nr = static_cast<int>(row.wealth.size());
        if (nr < 2 || row.q_star.size() != row.wealth.size() ||
            row.p_star.size() != row.wealth.size())
            throw std::invalid_argument("evaluate_controls_pide: malformed control row");

        // Stage tables at the row's own wealth nodes, using its frozen p*.
        std::vector<double> hq(nr), hsf(nr), hw(nr);
        for (int k = 0; k < nr; ++k) {
            const double wk = row.wealth[k];
            const double pk = wk <= 0.0 ? 0.0 : row.p_star[k];
            const Stencil st = state_stencil(grids, wk, pk, cs);
            hq[k] = apply_stencil(aq, st);
            hsf[k] = apply_stencil(asf, st);
            hw[k] = apply_stencil(aw, st);
        }

        if (n == 0) {
            const double q0 = interp_sorted(row.wealth, row.q_star, scn.w0, &cs);
            const SortedHit hit = locate_clamped(row.wealth, scn.w0 - q0, &cs);
            const double a_q = q0 + lerp(hq, hit);
            const double a_sf = lerp(hsf, hit);
            const double a_w = lerp(hw, hit);
            PideStats r;
            r.ew_per_year = a_q / scn.horizon_years;
            r.es_alpha = w_star + a_sf / scn.alpha;
            r.e_wt = a_w;
            r.value_reconstructed =
                a_q + scn.kappa * w_star + (scn.kappa / scn.alpha) * a_sf + scn.epsilon * a_w;
            return r;
        }

        ValueSurfacePair naq{Array2<double>(n1, n2), Array2<double>(n1, n2)};
        ValueSurfacePair nasf{Array2<double>(n1, n2), Array2<double>(n1, n2)};
        ValueSurfacePair naw{Array2<double>(n1, n2), Array2<double>(n1, n2)};
        for (int sign = 0; sign < 2; ++sign)
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) {
                    const double w = sign ? e1[i] - e2[j] : e1[i] + e2[j];
                    const double q = interp_sorted(row.wealth, row.q_star, w, &cs);
                    const SortedHit hit = locate_clamped(row.wealth, w - q, &cs);
                    if (sign) {
                        naq.neg(i, j) = q + lerp(hq, hit);
                        nasf.neg(i, j) = lerp(hsf, hit);
                        naw.neg(i, j) = lerp(hw, hit);
                    } else {
                        naq.pos(i, j) = q + lerp(hq, hit);
                        nasf.pos(i, j) = lerp(hsf, hit);
                        naw.pos(i, j) = lerp(hw, hit);
                    }
                }
        aq = std::move(naq);
        asf = std::move(nasf);
        aw = std::move(naw);
    }
    throw std::logic_error("evaluate_controls_pide: unreachable");
}

// ---- threshold search -------------------------------------------------------------

ScalarMax golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                  double tol) {
    if (!(hi >= lo) || !(tol > 0.0))
        throw std::invalid_argument("golden_section_maximize: need hi >= lo and tol > 0");
    const double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    ScalarMax best = f1 >= f2 ? ScalarMax{x1, f1} : ScalarMax{x2, f2};
    for (int iter = 0; iter < 200 && b - a > tol; ++iter) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
            if (f1 > best.value) best = {x1, f1};
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
            if (f2 > best.value) best = {x2, f2};
        }
    }
    best.unimodal = (best.x >= a && best.x <= b);
    return best;
}

namespace {

// Same numerics shrunk to one level of the grid ladder. Control and
// wealth grid sizes follow n1 through the factor/divisor knobs.
Numerics scaled_numerics(const Numerics& num, int level_n1) {
    Numerics n = num;
    if (num.n2 > 0 && num.n2 != num.n1)
        n.n2 = static_cast<int>(static_cast<std::int64_t>(num.n2) * level_n1 / num.n1);
    else
        n.n2 = 0;
    n.n1 = level_n1;
    n.coarsest_n1 = std::min(num.coarsest_n1, level_n1);
    return n;
}

}  // namespace

OptimizeResult optimize_wstar(const Scenario& scn, const MarketParams& mkt, const Numerics& num) {
    scn.validate();
    mkt.validate();
    num.validate();
    OptimizeResult out;

    if (scn.kappa == 0.0) {
        // Shortfall has no weight; the threshold is irrelevant, pin it at 0.
        SolverWorkspace ws(scn, mkt, num);
        FixedWstarSolution s = solve_fixed_wstar(ws, 0.0);
        out.w_star = 0.0;
        out.value = s.value;
        out.stats = s.stats;
        out.solves = 1;
        out.pide = evaluate_controls_pide(ws, s.controls, 0.0);
        out.controls = std::move(s.controls);
        return out;
    }

    std::vector<int> ladder;
    for (int n = std::min(num.coarsest_n1, num.n1); n < num.n1; n *= 2) ladder.push_back(n);
    ladder.push_back(num.n1);

    const double lo = num.wstar_lo_mult * scn.w0;
    const double hi = num.wstar_hi_mult * scn.w0;
    const double tol = num.wstar_tol_mult * scn.w0;
    const int pts = num.wstar_coarse_points;
    const double step = (hi - lo) / (pts - 1);

    double best_x = lo;
    double best_v = -std::numeric_limits<double>::infinity();
    int solves = 0;
    FixedWstarSolution best_sol;
    std::unique_ptr<SolverWorkspace> final_ws;

    for (std::size_t level = 0; level < ladder.size(); ++level) {
        auto ws = std::make_unique<SolverWorkspace>(scn, mkt, scaled_numerics(num, ladder[level]));

        const auto full_scan = [&] {
            best_v = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < pts; ++i) {
                const double x = i == pts - 1 ? hi : lo + step * i;
                FixedWstarSolution s = solve_fixed_wstar(*ws, x);
                ++solves;
                if (s.value > best_v) {
                    best_v = s.value;
                    best_x = x;
                    best_sol = std::move(s);
                }
            }
        };

        if (level == 0) {
            full_scan();
        } else {
            // carry the candidate over, but score it on this level's grid
            best_sol = solve_fixed_wstar(*ws, best_x);
            best_v = best_sol.value;
            ++solves;
        }

        if (level > 0 || ladder.size() == 1) {
            double track_v = -std::numeric_limits<double>::infinity();
            FixedWstarSolution track_sol;
            const ScalarMax m = golden_section_maximize(
                [&](double x) {
                    FixedWstarSolution s = solve_fixed_wstar(*ws, x);
                    ++solves;
                    const double val = s.value;
                    if (val > track_v) {
                        track_v = val;
                        track_sol = std::move(s);
                    }
                    return val;
                },
                std::max(lo, best_x - step), std::min(hi, best_x + step), tol);
            if (m.value > best_v) {
                best_x = m.x;
                best_v = m.value;
                best_sol = std::move(track_sol);
            }
            if (!m.unimodal) {
                std::cerr << "optimize_wstar: threshold profile is not unimodal near "
                          << best_x << " at grid " << ladder[level]
                          << "; falling back to a full scan\n";
                full_scan();
            }
        }
        if (level + 1 == ladder.size()) final_ws = std::move(ws);
    }

    out.w_star = best_x;
    out.value = best_sol.value;
    out.stats = best_sol.stats;
    out.solves = solves;
    out.pide = evaluate_controls_pide(*final_ws, best_sol.controls, best_x);
    out.controls = std::move(best_sol.controls);
    return out;
}

std::vector<FrontierPoint> sweep_frontier(const Scenario& scn, const MarketParams& mkt,
                                          const Numerics& num, const std::vector<double>& kappas) {
    std::vector<FrontierPoint> pts;
    pts.reserve(kappas.size());
    for (const double k : kappas) {
        Scenario s = scn;
        s.kappa = k;
        const OptimizeResult r = optimize_wstar(s, mkt, num);
        pts.push_back({k, r.w_star, r.value, r.pide.ew_per_year, r.pide.es_alpha});
    }
    std::sort(pts.begin(), pts.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) { return a.es_alpha < b.es_alpha; });
    return pts;
}

// ---- table interpolation and persistence ---------------------------------------------

double ControlTables::interp_q(int time_index, double w) const {
    const ControlRow& r = rows.at(time_index);
    return interp_sorted(r.wealth, r.q_star, w, nullptr);
}

double ControlTables::interp_p(int time_index, double w) const {
    const ControlRow& r = rows.at(time_index);
    return interp_sorted(r.wealth, r.p_star, w, nullptr);
}

namespace {

template <class T>
void put_pod(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_pod(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void put_doubles(std::ofstream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::ifstream& is, std::int64_t n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return v;
}

constexpr char kTableMagic[8] = {'D', 'E', 'C', 'U', 'M', 'C', 'T', 'L'};

}  // namespace

void ControlTables::save(const std::string& path) const {
    if (rows.size() != static_cast<std::size_t>(periods_m) + 1)
        throw std::invalid_argument("ControlTables::save: rows do not match periods_m");
    const std::int64_t nw = rows.empty() ? 0 : static_cast<std::int64_t>(rows.front().wealth.size());
    for (const ControlRow& r : rows)
        if (static_cast<std::int64_t>(r.wealth.size()) != nw || r.q_star.size() != r.wealth.size() ||
            r.p_star.size() != r.wealth.size())
            throw std::invalid_argument("ControlTables::save: ragged rows");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ControlTables::save: cannot open " + path);
    os.write(kTableMagic, sizeof kTableMagic);
    put_pod<std::uint32_t>(os, 1u);
    put_pod<std::uint32_t>(os, fixed_rule ? 1u : 0u);
    put_pod<std::int64_t>(os, periods_m);
    put_pod<std::int64_t>(os, nw);
    put_pod<double>(os, w_min);
    put_pod<double>(os, w_max);
    put_pod<double>(os, w_scale);
    for (const ControlRow& r : rows) {
        put_doubles(os, r.wealth);
        put_doubles(os, r.q_star);
        put_doubles(os, r.p_star);
    }
    os.flush();
    if (!os) throw std::runtime_error("ControlTables::save: write failed: " + path);
}

ControlTables ControlTables::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("ControlTables::load: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kTableMagic, sizeof magic) != 0)
        throw std::runtime_error("ControlTables::load: not a control-tables file: " + path);
    const auto version = get_pod<std::uint32_t>(is);
    if (version != 1u)
        throw std::runtime_error("ControlTables::load: unsupported version in " + path);
    const auto flags = get_pod<std::uint32_t>(is);
    const auto m = get_pod<std::int64_t>(is);
    const auto nw = get_pod<std::int64_t>(is);
    ControlTables ct;
    ct.fixed_rule = (flags & 1u) != 0;
    ct.w_min = get_pod<double>(is);
    ct.w_max = get_pod<double>(is);
    ct.w_scale = get_pod<double>(is);
    if (!is || m < 1 || m > 1000000 || nw < 2 || nw > (std::int64_t{1} << 26))
        throw std::runtime_error("ControlTables::load: corrupt header in " + path);
    ct.periods_m = static_cast<int>(m);
    ct.rows.resize(static_cast<std::size_t>(m) + 1);
    for (ControlRow& r : ct.rows) {
        r.wealth = get_doubles(is, nw);
        r.q_star = get_doubles(is, nw);
        r.p_star = get_doubles(is, nw);
        if (!is) throw std::runtime_error("ControlTables::load: truncated file: " + path);
        if (!std::is_sorted(r.wealth.begin(), r.wealth.end()) ||
            std::adjacent_find(r.wealth.begin(), r.wealth.end()) != r.wealth.end())
            throw std::runtime_error("ControlTables::load: wealth grid not increasing in " + path);
    }
    return ct;
}

void ControlTables::export_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("ControlTables::export_csv: cannot open " + path);
    os << "time_index,wealth,q_star,p_star\n" << std::setprecision(17);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t k = 0; k < rows[t].wealth.size(); ++k)
            os << t << ',' << rows[t].wealth[k] << ',' << rows[t].q_star[k] << ','
               << rows[t].p_star[k] << '\n';
    if (!os) throw std::runtime_error("ControlTables::export_csv: write failed: " + path);
}

}  // namespace decum
