#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "decum/control_optimizer.hpp"
#include "decum/market_model.hpp"
#include "decum/rng.hpp"

namespace decum {

/// 5/50/95 percentile band of one statistic at one rebalancing date
/// (year = date index; dates are annual in the shipped scenarios).
struct FanRow {
    int year = 0;
    double p5 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

/// Occupancy cell of the control heat map: paths visiting the wealth
/// bucket [bucket_lo, bucket_lo + width) at one date, with the mean
/// applied stock fraction and mean normalized withdrawal
/// (q - q_min)/(q_max - q_min) among them.
struct HeatCell {
    int year = 0;
    double bucket_lo = 0.0;
    double mean_p = 0.0;
    double mean_q_norm = 0.0;
    std::int64_t count = 0;
};

/// One recorded decision, kept for the first few paths so tests can
/// replay the accounting identity W_T = chained growth minus withdrawals.
struct AuditStep {
    double w_minus = 0.0;   ///< wealth before the withdrawal
    double q = 0.0;         ///< applied withdrawal
    double p = 0.0;         ///< applied stock fraction
    double gross_s = 1.0;   ///< stock gross return over the period
    double gross_b = 1.0;   ///< bond gross return over the period
};

struct SimStats {
    double ew_per_year = 0.0;  ///< expected total withdrawals / horizon years
    double es_alpha = 0.0;     ///< mean of the worst alpha-fraction of terminal wealths
    double var_alpha = 0.0;    ///< the alpha-quantile itself
    double mean_wt = 0.0;
    double insolvent_fraction = 0.0;   ///< paths ending with W_T < 0
    double interior_q_fraction = 0.0;  ///< withdrawals strictly inside (q_min, q_max)
    std::int64_t feasibility_violations = 0;  ///< decisions outside their admissible set
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<FanRow> wealth_fan;  ///< pre-withdrawal wealth; final row is W_T
    std::vector<FanRow> q_fan;
    std::vector<FanRow> p_fan;
    std::vector<HeatCell> heat;  ///< bucketed on pre-withdrawal wealth
    std::vector<std::vector<AuditStep>> audit_log;  ///< first few paths, in path order

    /// fans.csv (year, statistic, p5, p50, p95), heatmap.csv, summary.csv.
    void write_csvs(const std::string& dir) const;
};

/// One period's gross return of a single asset, sampled exactly in
/// distribution: Brownian part plus a Poisson number of double
/// exponential jumps. drift_add shifts the drift (borrowing spread).
double sample_period_return(const KouAssetParams& a, double dt, Rng& rng, double drift_add = 0.0);

/// Correlated stock/bond gross returns over one period. borrow_on_bond
/// applies the spread to the bond leg.
struct PeriodReturn {
    double stock_gross = 1.0;
    double bond_gross = 1.0;
};
PeriodReturn sample_period_pair(const MarketParams& mkt, double dt, Rng& rng, bool borrow_on_bond);

/// Expected shortfall at level alpha (wealth convention, larger is
/// better): es = mean of the k = ceil(alpha*n) smallest values, var = the
/// k-th smallest. Requires n >= 1/alpha.
struct EsResult {
    double es = 0.0;
    double var = 0.0;
};
EsResult compute_es(std::vector<double> samples, double alpha);

/// Controls for the fixed 4% rule: withdraw 0.04 * w0 at every date and
/// rebalance to 50% stock. Marked fixed_rule so the simulator applies the
/// withdrawal verbatim instead of projecting it into the solvency region;
/// the p rule (forced 0 when insolvent) still applies.
ControlTables bengen_controls(const Scenario& scn);

/// Per-period market return source: (date index, bond leg currently in
/// debt, per-path rng) -> gross pair. Lets the bootstrap reuse the exact
/// decision code path of the synthetic simulator.
using ReturnProvider = std::function<PeriodReturn(int, bool, Rng&)>;

/// Monte Carlo rollout of a control law. Paths use substreams keyed
/// (seed, path index): results do not depend on path-count extension and
/// replay bitwise. Fans and heat maps are estimated from the first
/// min(n_paths, 100000) paths; ES and means use every path.
SimStats simulate_paths(const ControlTables& controls, const Scenario& scn,
                        const MarketParams& mkt, std::int64_t n_paths, std::uint64_t seed);

/// Same rollout with returns supplied by the caller (per-path provider).
SimStats simulate_paths_with(const ControlTables& controls, const Scenario& scn,
                             const ReturnProvider& returns, std::int64_t n_paths,
                             std::uint64_t seed);

}  // namespace decum
