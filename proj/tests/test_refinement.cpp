#include <cmath>

#include "decum/control_optimizer.hpp"
#include "decum/market_model.hpp"
#include "decum/pide_engine.hpp"
#include "doctest.h"

using namespace decum;

// Slow checks that re-solve the full 30-year problem on production grids.

TEST_SUITE_BEGIN("refinement");

TEST_CASE("the solved value is insensitive to the log-domain extent") {
    // Doubling both domain offsets at fixed dx (so 2x the nodes) moves the
    // truncation boundaries far out; the value at the start state must not
    // care. Control-candidate counts and the wealth grid normally scale
    // with n1 and the domain edges, so pin them to the base resolution:
    // otherwise the wide run also optimizes on finer control grids and
    // stretches the same wealth nodes over a larger span, and the
    // comparison measures those discretizations instead of boundary
    // effects.
    Scenario scn;
    scn.kappa = 0.8660;
    scn.p_max = 1.0;
    const MarketParams mkt = MarketParams::default_calibration();
    const double w_star = 50.0;

    Numerics base;  // 512^2, offsets -7.5 / +10
    SolverWorkspace ws_base(scn, mkt, base);
    const double v_base = solve_fixed_wstar(ws_base, w_star).value;

    Numerics wide;
    wide.n1 = 1024;
    wide.offset_min = -15.0;
    wide.offset_max = 20.0;
    wide.n_control_divisor = 2 * base.n_control_divisor;
    wide.n_w_factor = base.n_w_factor / 2;
    wide.w_grid_min = ws_base.wealth_grid().nodes.front();
    wide.w_grid_max = ws_base.wealth_grid().nodes.back();
    SolverWorkspace ws_wide(scn, mkt, wide);
    const double v_wide = solve_fixed_wstar(ws_wide, w_star).value;

    CHECK(std::abs(v_wide - v_base) / std::abs(v_base) < 1e-6);
}

TEST_SUITE_END();
