#include "decum/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace decum {

namespace {

// Sum of N ~ Poisson(lambda*dt) double exponential log jump sizes.
double jump_log_sum(const KouAssetParams& a, double dt, Rng& rng) {
    if (a.lambda <= 0.0) return 0.0;
    const int n = rng.poisson(a.lambda * dt);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (rng.uniform01() < a.u_up)
            s += rng.exponential(a.eta1);
        else
            s -= rng.exponential(a.eta2);
    }
    return s;
}

double gross_from_parts(const KouAssetParams& a, double dt, double z, double jumps,
                        double drift_add) {
    const double drift = a.mu + drift_add - a.lambda * mean_jump_excess(a) -
                         0.5 * a.sigma * a.sigma;
    return std::exp(drift * dt + a.sigma * std::sqrt(dt) * z + jumps);
}

}  // namespace

double sample_period_return(const KouAssetParams& a, double dt, Rng& rng, double drift_add) {
    const double z = rng.normal();
    return gross_from_parts(a, dt, z, jump_log_sum(a, dt, rng), drift_add);
}

PeriodReturn sample_period_pair(const MarketParams& mkt, double dt, Rng& rng, bool borrow_on_bond) {
    // Fixed draw order: one normal pair, then stock jumps, then bond jumps.
    double z1, z2;
    rng.normal_pair(z1, z2);
    const double zb = mkt.rho_sb * z1 + std::sqrt(1.0 - mkt.rho_sb * mkt.rho_sb) * z2;
    const double js = jump_log_sum(mkt.stock, dt, rng);
    const double jb = jump_log_sum(mkt.bond, dt, rng);
    PeriodReturn r;
    r.stock_gross = gross_from_parts(mkt.stock, dt, z1, js, 0.0);
    r.bond_gross = gross_from_parts(mkt.bond, dt, zb, jb, borrow_on_bond ? mkt.mu_c_bond : 0.0);
    return r;
}

EsResult compute_es(std::vector<double> samples, double alpha) {
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    if (n == 0 || !(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("compute_es: need samples and alpha in (0, 1]");
    if (static_cast<double>(n) * alpha < 1.0 - 1e-9)
        throw std::invalid_argument("compute_es: need at least 1/alpha samples");
    // ceil with a nudge so alpha*n that is an exact integer stays put
    const std::int64_t k =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(alpha * n - 1e-9)));
    std::sort(samples.begin(), samples.end());
    long double acc = 0.0;
    for (std::int64_t i = 0; i < k; ++i) acc += samples[i];
    return {static_cast<double>(acc / k), samples[k - 1]};
}

ControlTables bengen_controls(const Scenario& scn) {
    scn.validate();
    ControlTables ct;
    ct.periods_m = scn.periods_m;
    ct.fixed_rule = true;
    ct.w_min = -100.0 * scn.w0;
    ct.w_max = 100.0 * scn.w0;
    ct.w_scale = 1.0;
    const std::vector<double> nodes{ct.w_min, ct.w_max};
    const double q_rule = 0.04 * scn.w0;
    ct.rows.resize(scn.periods_m + 1);
    for (int n = 0; n < scn.periods_m; ++n)
        ct.rows[n] = {nodes, std::vector<double>(2, q_rule), std::vector<double>(2, 0.5)};
    ct.rows[scn.periods_m] = {nodes, std::vector<double>(2, 0.0), std::vector<double>(2, 0.0)};
    return ct;
}

namespace {

// Admissible withdrawal interval at pre-withdrawal wealth w: the cap
// relaxes to available wealth when w < q_max but never below the forced
// minimum.
struct QBounds {
    double lo = 0.0;
    double hi = 0.0;
};

QBounds admissible_q(double w, const Scenario& scn) {
    return {scn.q_min, std::max(scn.q_min, std::min(scn.q_max, w))};
}

double percentile(const std::vector<float>& sorted, double pct) {
    if (sorted.empty()) return 0.0;
    const double pos = pct * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t k = static_cast<std::size_t>(pos);
    if (k + 1 >= sorted.size()) return sorted.back();
    const double f = pos - static_cast<double>(k);
    return sorted[k] + f * (sorted[k + 1] - sorted[k]);
}

FanRow fan_row(int year, std::vector<float>& samples) {
    std::sort(samples.begin(), samples.end());
    return {year, percentile(samples, 0.05), percentile(samples, 0.50),
            percentile(samples, 0.95)};
}

constexpr int kHeatBuckets = 40;
constexpr std::int64_t kTrackCap = 100000;
constexpr std::int64_t kAuditCap = 64;

}  // namespace

SimStats simulate_paths_with(const ControlTables& controls, const Scenario& scn,
                             const ReturnProvider& returns, std::int64_t n_paths,
                             std::uint64_t seed) {
    scn.validate();
    if (n_paths < 1) throw std::invalid_argument("simulate_paths: need n_paths >= 1");
    if (controls.periods_m != scn.periods_m)
        throw std::invalid_argument("simulate_paths: table horizon does not match scenario");
    if (controls.rows.size() != static_cast<std::size_t>(scn.periods_m) + 1)
        throw std::invalid_argument("simulate_paths: malformed control tables");

    const int m = scn.periods_m;
    const std::int64_t n_track = std::min(n_paths, kTrackCap);
    const std::int64_t n_audit = std::min(n_paths, kAuditCap);
    const double q_span = scn.q_max - scn.q_min;
    const double q_tol = 1e-9 * (1.0 + scn.q_max);
    const double p_tol = 1e-9 * (1.0 + scn.p_max);

    // heat-map buckets on pre-withdrawal wealth, clamped to the edges
    const double heat_lo = -scn.w0;
    const double heat_width = 5.0 * scn.w0 / kHeatBuckets;

    std::vector<std::vector<float>> w_track(m + 1), q_track(m), p_track(m);
    for (auto& v : w_track) v.reserve(static_cast<std::size_t>(n_track));
    for (auto& v : q_track) v.reserve(static_cast<std::size_t>(n_track));
    for (auto& v : p_track) v.reserve(static_cast<std::size_t>(n_track));
    std::vector<double> heat_sum_p(static_cast<std::size_t>(m) * kHeatBuckets, 0.0);
    std::vector<double> heat_sum_qn(static_cast<std::size_t>(m) * kHeatBuckets, 0.0);
    std::vector<std::int64_t> heat_count(static_cast<std::size_t>(m) * kHeatBuckets, 0);

    SimStats st;
    st.n_paths = n_paths;
    st.seed = seed;
    st.audit_log.reserve(static_cast<std::size_t>(n_audit));

    std::vector<double> terminal(static_cast<std::size_t>(n_paths));
    long double sum_withdrawn = 0.0;
    long double sum_wt = 0.0;
    std::int64_t interior = 0;
    std::int64_t insolvent = 0;

    for (std::int64_t path = 0; path < n_paths; ++path) {
        Rng rng(seed, static_cast<std::uint64_t>(path));
        const bool track = path < n_track;
        const bool audit = path < n_audit;
        std::vector<AuditStep> steps;
        if (audit) steps.reserve(m);

        double w = scn.w0;
        for (int n = 0; n < m; ++n) {
            const double w_minus = w;
            double q = controls.interp_q(n, w_minus);
            const QBounds zq = admissible_q(w_minus, scn);
            if (!controls.fixed_rule) q = std::clamp(q, zq.lo, zq.hi);
            if (q < zq.lo - q_tol || q > zq.hi + q_tol) st.feasibility_violations++;
            if (q > scn.q_min && q < scn.q_max) interior++;
            sum_withdrawn += q;

            const double w_after = w_minus - q;
            double p = 0.0;
            if (w_after > 0.0) {
                p = controls.interp_p(n, w_after);
                if (!controls.fixed_rule) p = std::clamp(p, 0.0, scn.p_max);
                if (p < -p_tol || p > scn.p_max + p_tol) st.feasibility_violations++;
            }
            const double stock = p * w_after;
            const double bond = (1.0 - p) * w_after;
            const PeriodReturn r = returns(n, bond < 0.0, rng);
            w = stock * r.stock_gross + bond * r.bond_gross;

            if (track) {
                w_track[n].push_back(static_cast<float>(w_minus));
                q_track[n].push_back(static_cast<float>(q));
                p_track[n].push_back(static_cast<float>(p));
                int b = static_cast<int>(std::floor((w_minus - heat_lo) / heat_width));
                b = std::clamp(b, 0, kHeatBuckets - 1);
                const std::size_t cell = static_cast<std::size_t>(n) * kHeatBuckets + b;
                heat_sum_p[cell] += p;
                heat_sum_qn[cell] += q_span > 0.0 ? (q - scn.q_min) / q_span : 0.0;
                heat_count[cell]++;
            }
            if (audit) steps.push_back({w_minus, q, p, r.stock_gross, r.bond_gross});
        }
        terminal[static_cast<std::size_t>(path)] = w;
        sum_wt += w;
        if (w < 0.0) insolvent++;
        if (track) w_track[m].push_back(static_cast<float>(w));
        if (audit) st.audit_log.push_back(std::move(steps));
    }

    const EsResult es = compute_es(terminal, scn.alpha);
    st.ew_per_year = static_cast<double>(sum_withdrawn / n_paths) / scn.horizon_years;
    st.es_alpha = es.es;
    st.var_alpha = es.var;
    st.mean_wt = static_cast<double>(sum_wt / n_paths);
    st.insolvent_fraction = static_cast<double>(insolvent) / static_cast<double>(n_paths);
    st.interior_q_fraction =
        static_cast<double>(interior) / (static_cast<double>(n_paths) * static_cast<double>(m));

    st.wealth_fan.reserve(m + 1);
    st.q_fan.reserve(m);
    st.p_fan.reserve(m);
    for (int n = 0; n <= m; ++n) st.wealth_fan.push_back(fan_row(n, w_track[n]));
    for (int n = 0; n < m; ++n) st.q_fan.push_back(fan_row(n, q_track[n]));
    for (int n = 0; n < m; ++n) st.p_fan.push_back(fan_row(n, p_track[n]));
    for (int n = 0; n < m; ++n)
        for (int b = 0; b < kHeatBuckets; ++b) {
            const std::size_t cell = static_cast<std::size_t>(n) * kHeatBuckets + b;
            if (!heat_count[cell]) continue;
            const double c = static_cast<double>(heat_count[cell]);
            st.heat.push_back({n, heat_lo + b * heat_width, heat_sum_p[cell] / c,
                               heat_sum_qn[cell] / c, heat_count[cell]});
        }
    return st;
}

SimStats simulate_paths(const ControlTables& controls, const Scenario& scn,
                        const MarketParams& mkt, std::int64_t n_paths, std::uint64_t seed) {
    mkt.validate();
    const double dt = scn.dt();
    const ReturnProvider provider = [&mkt, dt](int, bool borrow, Rng& rng) {
        return sample_period_pair(mkt, dt, rng, borrow);
    };
    return simulate_paths_with(controls, scn, provider, n_paths, seed);
}

void SimStats::write_csvs(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const auto open = [](const std::string& path) {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path);
        os << std::setprecision(17);
        return os;
    };

    {
        auto os = open(dir + "/fans.csv");
        os << "year,statistic,p5,p50,p95\n";
        const auto emit = [&os](const char* name, const std::vector<FanRow>& fan) {
            for (const FanRow& r : fan)
                os << r.year << ',' << name << ',' << r.p5 << ',' << r.p50 << ',' << r.p95 << '\n';
        };
        emit("wealth", wealth_fan);
        emit("q", q_fan);
        emit("p", p_fan);
        if (!os) throw std::runtime_error("write failed: " + dir + "/fans.csv");
    }
    {
        auto os = open(dir + "/heatmap.csv");
        os << "year,bucket_lo,mean_p,mean_q_norm,count\n";
        for (const HeatCell& c : heat)
            os << c.year << ',' << c.bucket_lo << ',' << c.mean_p << ',' << c.mean_q_norm << ','
               << c.count << '\n';
        if (!os) throw std::runtime_error("write failed: " + dir + "/heatmap.csv");
    }
    {
        auto os = open(dir + "/summary.csv");
        os << "ew_per_year,es_alpha,var_alpha,mean_wt,insolvent_fraction,interior_q_fraction,"
              "feasibility_violations,n_paths,seed\n";
        os << ew_per_year << ',' << es_alpha << ',' << var_alpha << ',' << mean_wt << ','
           << insolvent_fraction << ',' << interior_q_fraction << ',' << feasibility_violations
           << ',' << n_paths << ',' << seed << '\n';
        if (!os) throw std::runtime_error("write failed: " + dir + "/summary.csv");
    }
}

}  // namespace decum
