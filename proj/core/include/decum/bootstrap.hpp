#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decum/control_optimizer.hpp"
#include "decum/rng.hpp"
#include "decum/simulator.hpp"

namespace decum {

/// Paired monthly real return history. Returns are net (0.01 = +1%);
/// every gross return 1 + r must be positive.
struct ReturnSeries {
    std::vector<std::string> date;
    std::vector<double> stock;
    std::vector<double> bond;

    std::size_t size() const { return stock.size(); }
};

/// Parse a return history CSV with header
///   date, stock_real_return, bond_real_return
/// Throws std::runtime_error naming the offending line on malformed rows,
/// non-positive gross returns, or fewer than 120 data rows.
ReturnSeries load_returns(const std::string& path);

struct BootstrapSpec {
    double expected_blocksize_months = 24.0;
    std::int64_t n_resamples = 10000;
    std::uint64_t seed = 0;
};

/// One stationary-block resample of n_months paired monthly gross
/// returns: block lengths are geometric with mean expected_blocksize_months,
/// start indices uniform, indices wrap circularly, and the stock and bond
/// columns always come from the same historical month.
struct ResampledPath {
    std::vector<int> index;           ///< source month of each draw, for pairing audits
    std::vector<double> stock_gross;  ///< monthly
    std::vector<double> bond_gross;
};
ResampledPath resample_path(const ReturnSeries& hist, const BootstrapSpec& spec, int n_months,
                            Rng& rng);

/// Roll the control law over bootstrap resamples of the historical record.
/// Monthly gross returns compound to one gross return per rebalancing
/// period; the borrowing spread multiplies the bond gross by
/// exp(mu_c_bond * dt) while the bond account is in debt, matching the
/// model simulator. Fans subsample like simulate_paths.
SimStats run_historical_test(const ControlTables& controls, const Scenario& scn,
                             const MarketParams& mkt, const ReturnSeries& hist,
                             const BootstrapSpec& spec);

}  // namespace decum
