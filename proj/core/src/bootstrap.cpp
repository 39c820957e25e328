#include "decum/bootstrap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace decum {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(const std::string& path, int lineno, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

double parse_number(const std::string& field, const std::string& path, int lineno) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        fail_line(path, lineno, "not a number: '" + field + "'");
    }
    if (pos != field.size()) fail_line(path, lineno, "trailing junk in number: '" + field + "'");
    return v;
}

}  // namespace

ReturnSeries load_returns(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_returns: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("load_returns: empty file: " + path);

    // Normalize the header before comparing: spaces around commas are fine.
    std::string header;
    for (const char c : line)
        if (c != ' ' && c != '\t' && c != '\r') header += c;
    if (header != "date,stock_real_return,bond_real_return")
        throw std::runtime_error(
            "load_returns: expected header 'date, stock_real_return, bond_real_return' in " + path);

    ReturnSeries rs;
    long long prev_month_key = -1;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;

        std::string field[3];
        int nfields = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (nfields >= 3) fail_line(path, lineno, "expected 3 comma-separated fields");
                field[nfields++] = trim(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (nfields != 3) fail_line(path, lineno, "expected 3 comma-separated fields");

        int year = 0, month = 0;
        if (std::sscanf(field[0].c_str(), "%d-%d", &year, &month) != 2 || month < 1 || month > 12)
            fail_line(path, lineno, "date must be YYYY-MM: '" + field[0] + "'");
        const long long key = 12LL * year + (month - 1);
        if (prev_month_key >= 0 && key != prev_month_key + 1)
            fail_line(path, lineno, "months must be contiguous: '" + field[0] + "'");
        prev_month_key = key;

        const double s = parse_number(field[1], path, lineno);
        const double b = parse_number(field[2], path, lineno);
        if (!(1.0 + s > 0.0) || !(1.0 + b > 0.0))
            fail_line(path, lineno, "gross return must be positive");

        rs.date.push_back(field[0]);
        rs.stock.push_back(s);
        rs.bond.push_back(b);
    }
    if (rs.size() < 120)
        throw std::runtime_error("load_returns: need at least 120 months, got " +
                                 std::to_string(rs.size()) + " in " + path);
    return rs;
}

ResampledPath resample_path(const ReturnSeries& hist, const BootstrapSpec& spec, int n_months,
                            Rng& rng) {
    if (hist.size() == 0) throw std::invalid_argument("resample_path: empty history");
    if (!(spec.expected_blocksize_months >= 1.0))
        throw std::invalid_argument("resample_path: expected block size must be >= 1 month");
    if (n_months < 1) throw std::invalid_argument("resample_path: need n_months >= 1");

    const std::uint64_t n_hist = hist.size();
    const double end_prob = 1.0 / spec.expected_blocksize_months;

    ResampledPath rp;
    rp.index.reserve(n_months);
    rp.stock_gross.reserve(n_months);
    rp.bond_gross.reserve(n_months);

    int filled = 0;
    while (filled < n_months) {
        // geometric block length (P(len = k) = (1-v)^{k-1} v), circular wrap
        const std::uint64_t start = rng.uniform_below(n_hist);
        std::uint64_t off = 0;
        do {
            const int idx = static_cast<int>((start + off) % n_hist);
            rp.index.push_back(idx);
            rp.stock_gross.push_back(1.0 + hist.stock[idx]);
            rp.bond_gross.push_back(1.0 + hist.bond[idx]);
            ++filled;
            ++off;
        } while (filled < n_months && rng.uniform01() >= end_prob);
    }
    return rp;
}

SimStats run_historical_test(const ControlTables& controls, const Scenario& scn,
                             const MarketParams& mkt, const ReturnSeries& hist,
                             const BootstrapSpec& spec) {
    scn.validate();
    mkt.validate();
    if (spec.n_resamples < 1)
        throw std::invalid_argument("run_historical_test: need n_resamples >= 1");
    const double dt = scn.dt();
    const double months_exact = 12.0 * dt;
    const int months_per_period = static_cast<int>(std::lround(months_exact));
    if (months_per_period < 1 || std::abs(months_exact - months_per_period) > 1e-9)
        throw std::invalid_argument(
            "run_historical_test: rebalancing period is not a whole number of months");
    const int n_months = months_per_period * scn.periods_m;
    const double spread_factor = std::exp(mkt.mu_c_bond * dt);

    // One resample per path, drawn in full from the path's substream at its
    // first step; monthly gross returns compound to one period return.
    ResampledPath cache;
    const ReturnProvider provider = [&](int step, bool borrow, Rng& rng) {
        if (step == 0) cache = resample_path(hist, spec, n_months, rng);
        double gs = 1.0, gb = 1.0;
        for (int k = step * months_per_period; k < (step + 1) * months_per_period; ++k) {
            gs *= cache.stock_gross[static_cast<std::size_t>(k)];
            gb *= cache.bond_gross[static_cast<std::size_t>(k)];
        }
        if (borrow) gb *= spread_factor;
        return PeriodReturn{gs, gb};
    };
    return simulate_paths_with(controls, scn, provider, spec.n_resamples, spec.seed);
}

}  // namespace decum
