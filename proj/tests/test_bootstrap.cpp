#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decum/bootstrap.hpp"
#include "decum/market_model.hpp"
#include "decum/rng.hpp"
#include "doctest.h"

using namespace decum;

namespace {

std::filesystem::path write_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream os(path);
    os << body;
    return path;
}

/// n contiguous months from 1990-01 with small deterministic returns.
std::string history_csv(int n) {
    std::string s = "date, stock_real_return, bond_real_return\n";
    for (int i = 0; i < n; ++i) {
        const int year = 1990 + i / 12;
        const int month = 1 + i % 12;
        s += std::to_string(year) + "-" + (month < 10 ? "0" : "") + std::to_string(month) + "," +
             std::to_string(0.001 * (i % 7)) + "," + std::to_string(-0.001 * (i % 5)) + "\n";
    }
    return s;
}

ReturnSeries in_memory_history(int n) {
    ReturnSeries rs;
    for (int i = 0; i < n; ++i) {
        rs.date.push_back("x");
        rs.stock.push_back(0.001 * (i % 7));
        rs.bond.push_back(-0.001 * (i % 5));
    }
    return rs;
}

ControlTables const_controls(int m, double q, double p) {
    ControlTables ct;
    ct.periods_m = m;
    ct.w_min = -1e6;
    ct.w_max = 1e6;
    ct.w_scale = 1.0;
    const std::vector<double> nodes{ct.w_min, ct.w_max};
    ct.rows.resize(m + 1);
    for (int n = 0; n < m; ++n)
        ct.rows[n] = {nodes, std::vector<double>(2, q), std::vector<double>(2, p)};
    ct.rows[m] = {nodes, std::vector<double>(2, 0.0), std::vector<double>(2, 0.0)};
    return ct;
}

MarketParams flat_market() {
    MarketParams mkt;
    mkt.stock.mu = 0.0;
    mkt.stock.sigma = 0.0;
    mkt.stock.lambda = 0.0;
    mkt.bond.mu = 0.0;
    mkt.bond.sigma = 0.0;
    mkt.bond.lambda = 0.0;
    mkt.rho_sb = 0.0;
    return mkt;
}

}  // namespace

TEST_SUITE_BEGIN("bootstrap");

TEST_CASE("return history parses and keeps the columns paired") {
    const auto path = write_csv("decum_hist_ok.csv", history_csv(150));
    const ReturnSeries rs = load_returns(path.string());
    REQUIRE(rs.size() == 150);
    CHECK(rs.date.front() == "1990-01");
    CHECK(rs.date.back() == "2002-06");
    CHECK(rs.stock[8] == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(rs.bond[6] == doctest::Approx(-0.001).epsilon(1e-12));
    std::filesystem::remove(path);
}

TEST_CASE("malformed histories are rejected with the offending line") {
    using doctest::Contains;

    CHECK_THROWS_WITH_AS(load_returns("/nonexistent/decum_returns.csv"), Contains("cannot open"),
                         std::runtime_error);

    const auto empty = write_csv("decum_hist_empty.csv", "");
    CHECK_THROWS_WITH_AS(load_returns(empty.string()), Contains("empty file"), std::runtime_error);

    const auto badhdr = write_csv("decum_hist_hdr.csv", "month,stock,bond\n1990-01,0,0\n");
    CHECK_THROWS_WITH_AS(load_returns(badhdr.string()), Contains("expected header"),
                         std::runtime_error);

    std::string body = history_csv(130);
    body += "2000-11,0.01\n";  // line 132: only two fields
    const auto fields = write_csv("decum_hist_fields.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(fields.string()),
                         Contains(":132: expected 3 comma-separated fields"), std::runtime_error);

    body = history_csv(130);
    body += "2000-11,zero,0.0\n";
    const auto notnum = write_csv("decum_hist_notnum.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(notnum.string()), Contains(":132: not a number"),
                         std::runtime_error);

    body = history_csv(130);
    body += "2000-11,0.01x,0.0\n";
    const auto junk = write_csv("decum_hist_junk.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(junk.string()), Contains(":132: trailing junk"),
                         std::runtime_error);

    body = history_csv(130);
    body += "200011,0.01,0.0\n";
    const auto baddate = write_csv("decum_hist_date.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(baddate.string()), Contains(":132: date must be YYYY-MM"),
                         std::runtime_error);

    body = history_csv(130);
    body += "2000-13,0.01,0.0\n";
    const auto badmonth = write_csv("decum_hist_month.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(badmonth.string()), Contains(":132: date must be YYYY-MM"),
                         std::runtime_error);

    body = history_csv(130);
    body += "2001-01,0.01,0.0\n";  // skips 2000-11 and 2000-12
    const auto gap = write_csv("decum_hist_gap.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(gap.string()), Contains(":132: months must be contiguous"),
                         std::runtime_error);

    body = history_csv(130);
    body += "2000-11,-1.0,0.0\n";
    const auto wipe = write_csv("decum_hist_wipe.csv", body);
    CHECK_THROWS_WITH_AS(load_returns(wipe.string()), Contains(":132: gross return must be positive"),
                         std::runtime_error);

    const auto tiny = write_csv("decum_hist_tiny.csv", history_csv(119));
    CHECK_THROWS_WITH_AS(load_returns(tiny.string()), Contains("at least 120 months"),
                         std::runtime_error);

    for (const auto& p : {empty, badhdr, fields, notnum, junk, baddate, badmonth, gap, wipe, tiny})
        std::filesystem::remove(p);
}

TEST_CASE("resampled paths wrap blocks over paired history months") {
    const ReturnSeries hist = in_memory_history(120);
    BootstrapSpec spec;
    spec.expected_blocksize_months = 24.0;
    Rng rng(31, 0);

    for (int n_months : {1, 7, 360}) {
        const ResampledPath rp = resample_path(hist, spec, n_months, rng);
        REQUIRE(rp.index.size() == static_cast<std::size_t>(n_months));
        REQUIRE(rp.stock_gross.size() == rp.index.size());
        REQUIRE(rp.bond_gross.size() == rp.index.size());
        for (std::size_t k = 0; k < rp.index.size(); ++k) {
            const int i = rp.index[k];
            REQUIRE(i >= 0);
            REQUIRE(i < 120);
            // the two columns always come from the same source month
            CHECK(rp.stock_gross[k] == 1.0 + hist.stock[i]);
            CHECK(rp.bond_gross[k] == 1.0 + hist.bond[i]);
        }
    }

    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(resample_path(ReturnSeries{}, spec, 12, rng), std::invalid_argument);
        BootstrapSpec tiny = spec;
        tiny.expected_blocksize_months = 0.5;
        CHECK_THROWS_AS(resample_path(hist, tiny, 12, rng), std::invalid_argument);
        CHECK_THROWS_AS(resample_path(hist, spec, 0, rng), std::invalid_argument);
    }
}

TEST_CASE("unit blocks sample months independently and uniformly") {
    const ReturnSeries hist = in_memory_history(120);
    BootstrapSpec spec;
    spec.expected_blocksize_months = 1.0;
    Rng rng(8, 1);
    const int draws = 120000;
    const ResampledPath rp = resample_path(hist, spec, draws, rng);

    std::vector<int> freq(120, 0);
    int contiguous = 0;
    for (int k = 0; k < draws; ++k) {
        freq[rp.index[k]]++;
        if (k > 0 && rp.index[k] == (rp.index[k - 1] + 1) % 120) contiguous++;
    }
    for (int f : freq) {
        CHECK(f > 800);  // expectation 1000, 4 sigma is about 126
        CHECK(f < 1200);
    }
    // successive draws line up only by coincidence, about once in 120
    CHECK(contiguous < draws / 20);
}

TEST_CASE("a huge expected block yields one contiguous wrapped block") {
    const ReturnSeries hist = in_memory_history(120);
    BootstrapSpec spec;
    spec.expected_blocksize_months = 1e9;
    Rng rng(4, 2);
    const ResampledPath rp = resample_path(hist, spec, 360, rng);
    for (std::size_t k = 1; k < rp.index.size(); ++k)
        CHECK(rp.index[k] == (rp.index[k - 1] + 1) % 120);
}

TEST_CASE("block lengths are geometric with the configured mean") {
    const ReturnSeries hist = in_memory_history(120);
    BootstrapSpec spec;
    spec.expected_blocksize_months = 6.0;
    Rng rng(99, 5);
    const int draws = 60000;
    const ResampledPath rp = resample_path(hist, spec, draws, rng);
    int breaks = 0;
    for (int k = 1; k < draws; ++k)
        if (rp.index[k] != (rp.index[k - 1] + 1) % 120) breaks++;
    // block ends arrive at rate 1/6 per draw; a new block hides a break
    // once in 120, so the visible rate is (1/6)(119/120)
    const double expect = draws / 6.0 * (119.0 / 120.0);
    const double sd = std::sqrt(draws * (1.0 / 6.0) * (5.0 / 6.0));
    CHECK(std::abs(breaks - expect) < 4.0 * sd);
}

TEST_CASE("historical rollout compounds months into periods exactly") {
    // A constant history removes all sampling noise: every resample gives
    // the same gross returns, so the rollout must match a hand-compounded
    // ledger bitwise.
    ReturnSeries hist;
    for (int i = 0; i < 240; ++i) {
        hist.date.push_back("x");
        hist.stock.push_back(0.005);
        hist.bond.push_back(0.005);
    }
    BootstrapSpec spec;
    spec.n_resamples = 25;
    spec.seed = 12;

    SUBCASE("annual periods, solvent throughout") {
        Scenario scn;
        scn.horizon_years = 2.0;
        scn.periods_m = 2;
        scn.w0 = 1000.0;
        const ControlTables ct = const_controls(2, 40.0, 0.0);
        const SimStats st = run_historical_test(ct, scn, flat_market(), hist, spec);

        double g = 1.0;
        for (int k = 0; k < 12; ++k) g *= 1.0 + 0.005;
        const double w1 = 0.0 * g + (1000.0 - 40.0) * g;
        const double wt = 0.0 * g + (w1 - 40.0) * g;
        CHECK(st.mean_wt == wt);
        CHECK(st.es_alpha == wt);
        CHECK(st.ew_per_year == 40.0);
        CHECK(st.feasibility_violations == 0);
    }

    SUBCASE("quarterly periods apply the borrowing spread per quarter") {
        Scenario scn;
        scn.horizon_years = 1.0;
        scn.periods_m = 4;
        scn.w0 = 50.0;
        scn.q_min = scn.q_max = 40.0;  // forced overdraft after the first date
        scn.alpha = 1.0;
        MarketParams mkt = flat_market();  // mu_c_bond stays at its default
        const ControlTables ct = const_controls(4, 40.0, 0.0);
        const SimStats st = run_historical_test(ct, scn, mkt, hist, spec);

        const double dt = 0.25;
        double g = 1.0;
        for (int k = 0; k < 3; ++k) g *= 1.0 + 0.005;
        const double spread = std::exp(mkt.mu_c_bond * dt);
        double w = 50.0;
        for (int n = 0; n < 4; ++n) {
            const double after = w - 40.0;
            const double gb = after < 0.0 ? g * spread : g;
            w = 0.0 * g + after * gb;
        }
        CHECK(w < 0.0);
        CHECK(st.mean_wt == w);
        CHECK(st.insolvent_fraction == 1.0);
    }

    SUBCASE("identical runs replay bitwise") {
        Scenario scn;
        scn.horizon_years = 2.0;
        scn.periods_m = 2;
        scn.w0 = 1000.0;
        const ControlTables ct = const_controls(2, 40.0, 0.5);
        const SimStats a = run_historical_test(ct, scn, flat_market(), hist, spec);
        const SimStats b = run_historical_test(ct, scn, flat_market(), hist, spec);
        CHECK(a.mean_wt == b.mean_wt);
        CHECK(a.es_alpha == b.es_alpha);
    }
}

TEST_CASE("historical rollout rejects periods that split months") {
    ReturnSeries hist = in_memory_history(240);
    Scenario scn;
    scn.horizon_years = 1.0;
    scn.periods_m = 5;  // 2.4 months per period
    scn.w0 = 100.0;
    const ControlTables ct = const_controls(5, 30.0, 0.0);
    BootstrapSpec spec;
    CHECK_THROWS_AS(run_historical_test(ct, scn, flat_market(), hist, spec),
                    std::invalid_argument);

    Scenario ok = scn;
    ok.periods_m = 4;  // 3 months per period
    BootstrapSpec none = spec;
    none.n_resamples = 0;
    const ControlTables ct4 = const_controls(4, 30.0, 0.0);
    CHECK_THROWS_AS(run_historical_test(ct4, ok, flat_market(), hist, none),
                    std::invalid_argument);
}

TEST_SUITE_END();
