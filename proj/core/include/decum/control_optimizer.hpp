#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "decum/pide_engine.hpp"

namespace decum {

/// Signed-log wealth coordinate: z = sign(w) * log(1 + |w|/scale).
/// Monotone, symmetric, dense near zero where the controls bend.
double wealth_to_coord(double w, double scale);
double coord_to_wealth(double z, double scale);

/// Counts of interpolation lookups that fell outside a grid and were
/// clamped to its edge. Above-max clamps signal a domain that is too
/// small; below-min clamps are the s -> 0 / b -> 0 boundary and are
/// expected there.
struct ClampStats {
    std::int64_t below_min = 0;
    std::int64_t above_max = 0;
    std::int64_t total_lookups = 0;

    void operator+=(const ClampStats& o) {
        below_min += o.below_min;
        above_max += o.above_max;
        total_lookups += o.total_lookups;
    }
    double above_max_fraction() const {
        return total_lookups ? static_cast<double>(above_max) / total_lookups : 0.0;
    }
};

/// Wealth grid with nodes equally spaced in the signed-log coordinate,
/// so a bracket lookup is O(1) instead of a binary search.
struct WealthGrid {
    std::vector<double> nodes;
    double scale = 1.0;
    double z_lo = 0.0;
    double dz = 0.0;

    static WealthGrid build(double w_min, double w_max, int n, double scale);
    int size() const { return static_cast<int>(nodes.size()); }

    /// Lower bracket index in [0, size-2] for linear interpolation.
    int bracket(double w) const;

    /// Linear-in-wealth interpolation of vals (tabulated on nodes) at w,
    /// clamped to the end nodes outside the range.
    double interp(const std::vector<double>& vals, double w, ClampStats& cs) const;
};

/// n points equally spaced in coordinate space between w_min and w_max.
std::vector<double> make_wealth_grid(double w_min, double w_max, int n, double scale);

/// Optimal controls tabulated on the wealth grid at one rebalancing date.
/// q_star is indexed by pre-withdrawal wealth, p_star by post-withdrawal
/// wealth; both live on the same node set.
struct ControlRow {
    std::vector<double> wealth;
    std::vector<double> q_star;
    std::vector<double> p_star;
    /// Allocation-stage value h(w) at the wealth nodes; kept for inspection
    /// and debugging, not persisted. Empty on the terminal row.
    std::vector<double> h_vals;
};

/// Controls for every date t_0..t_M plus the transform needed to
/// interpolate them. fixed_rule marks tables whose q column must be
/// applied verbatim (no feasibility projection) by the simulator.
struct ControlTables {
    int periods_m = 0;
    double w_min = 0.0;
    double w_max = 0.0;
    double w_scale = 1.0;
    bool fixed_rule = false;
    std::vector<ControlRow> rows;  ///< size periods_m + 1, index = time index

    double interp_q(int time_index, double w) const;
    double interp_p(int time_index, double w) const;

    /// Binary round trip: magic, version, flags, sizes, transform params,
    /// then per-date wealth/q/p arrays as 64-bit little-endian floats.
    void save(const std::string& path) const;
    static ControlTables load(const std::string& path);

    /// One CSV with columns time_index, wealth, q_star, p_star.
    void export_csv(const std::string& path) const;
};

/// Candidate fractions 0 = p_0 < ... < p_{n-1} = p_max, equally spaced.
std::vector<double> allocation_candidates(double p_max, int n_p);

struct AllocationResult {
    double p_star = 0.0;
    double value = 0.0;  ///< post-rebalance value at the chosen allocation
};

/// Inner stage: given post-withdrawal wealth w, pick the stock fraction
/// maximizing the bilinearly interpolated post-rebalance value. The state
/// (w*p, w*(1-p)) reads the positive grid for p <= 1 and the debt grid
/// for p > 1; p = 0 and p = 1 sit on the x_min edge of the emptied axis.
/// w <= 0 forces p = 0 on the debt grid. Ties break to the smallest
/// candidate.
AllocationResult optimize_allocation(const ValueSurfacePair& v, const GridPair& grids, double w,
                                     const Scenario& scn, const std::vector<double>& p_candidates,
                                     ClampStats& clamps);

struct WithdrawalResult {
    double q_star = 0.0;
    double value = 0.0;  ///< q_star + h(w - q_star)
};

/// Outer stage: given pre-withdrawal wealth w and the inner-stage value h
/// tabulated on wg, pick q maximizing q + h(w - q) over n_q equally
/// spaced candidates in the admissible interval: [q_min, q_max] when
/// w >= q_max, else [q_min, max(q_min, w)]. Ties break to the smallest
/// candidate.
WithdrawalResult optimize_withdrawal(const WealthGrid& wg, const std::vector<double>& h, double w,
                                     const Scenario& scn, int n_q, ClampStats& clamps);

/// Diagnostics accumulated over one backward induction.
struct SolveStats {
    ClampStats clamps;
    std::int64_t interior_q_nodes = 0;  ///< q* strictly inside (q_min, q_max)
    std::int64_t total_q_nodes = 0;
    double interior_q_fraction() const {
        return total_q_nodes ? static_cast<double>(interior_q_nodes) / total_q_nodes : 0.0;
    }
};

/// Result of one fixed-threshold backward induction.
struct FixedWstarSolution {
    double value = 0.0;  ///< scalarized objective at (t_0, w0)
    ControlTables controls;
    SolveStats stats;
};

/// Reusable grids and Green's weights for one (scenario, numerics) pair.
/// Building the weights dominates setup cost, so the threshold search
/// shares one workspace across candidates.
class SolverWorkspace {
public:
    SolverWorkspace(const Scenario& scn, const MarketParams& mkt, const Numerics& num);

    const GridPair& grids() const { return grids_; }
    const GreenWeights& weights_pos() const { return w_pos_; }
    const GreenWeights& weights_neg() const { return w_neg_; }
    const Scenario& scenario() const { return scn_; }
    const Numerics& numerics() const { return num_; }
    const WealthGrid& wealth_grid() const { return wgrid_; }
    const std::vector<double>& stock_leg() const { return e1_; }  ///< e^{x1} per row
    const std::vector<double>& bond_leg() const { return e2_; }   ///< e^{x2} per column

private:
    Scenario scn_;
    Numerics num_;
    GridPair grids_;
    GreenWeights w_pos_;
    GreenWeights w_neg_;
    WealthGrid wgrid_;
    std::vector<double> e1_;
    std::vector<double> e2_;
};

/// Backward induction at a frozen disaster threshold w_star. Returns the
/// scalarized value at (t_0, w0), evaluated by applying the t_0 controls
/// to the initial wealth, and the induced control tables.
FixedWstarSolution solve_fixed_wstar(SolverWorkspace& ws, double w_star);

/// Statistics of a control law evaluated by three linear sweeps of the
/// solver's own discrete operators with the controls frozen: expected
/// total withdrawals, the expected-shortfall leg E[min(W_T - w_star, 0)],
/// and expected terminal wealth. value_reconstructed recombines them with
/// the scalarization weights and equals the solver's value up to
/// floating-point associativity.
struct PideStats {
    double ew_per_year = 0.0;
    double es_alpha = 0.0;
    double e_wt = 0.0;
    double value_reconstructed = 0.0;
};

PideStats evaluate_controls_pide(SolverWorkspace& ws, const ControlTables& controls,
                                 double w_star);

/// One point on the reward-risk frontier.
struct FrontierPoint {
    double kappa = 0.0;
    double w_star = 0.0;
    double value = 0.0;
    double ew_per_year = 0.0;
    double es_alpha = 0.0;
};

struct ScalarMax {
    double x = 0.0;
    double value = 0.0;
    /// False when the best evaluation ended up outside the final interval,
    /// which cannot happen for a strictly unimodal function: the search
    /// discarded a better point than anything it kept.
    bool unimodal = true;
};

/// Golden-section maximization of a unimodal function on [lo, hi] to the
/// given interval tolerance. Returns the best evaluated point.
ScalarMax golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                  double tol);

struct OptimizeResult {
    double w_star = 0.0;
    double value = 0.0;
    ControlTables controls;
    SolveStats stats;
    PideStats pide;  ///< frozen-control evaluation at the optimum
    int solves = 0;  ///< fixed-threshold inductions spent on the search
};

/// Outer optimization over the disaster threshold: a uniform scan of
/// wstar_coarse_points candidates over [lo_mult, hi_mult]*w0 on the
/// coarsest grid, then golden-section refinement (bracket = previous best
/// +- one scan step) at each level of the grid ladder coarsest_n1,
/// 2*coarsest_n1, ..., n1. kappa = 0 short-circuits to w_star = 0, which
/// the objective then ignores.
OptimizeResult optimize_wstar(const Scenario& scn, const MarketParams& mkt, const Numerics& num);

/// One optimize_wstar per kappa; points sorted by es_alpha.
std::vector<FrontierPoint> sweep_frontier(const Scenario& scn, const MarketParams& mkt,
                                          const Numerics& num, const std::vector<double>& kappas);

}  // namespace decum
