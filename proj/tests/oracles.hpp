#pragma once

// Independent reference implementations the tests check the library
// against. Everything here is written the slow, obvious way on purpose;
// none of it shares code with the library beyond the public data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "decum/array2.hpp"
#include "decum/fourier_kernel.hpp"
#include "decum/market_model.hpp"
#include "decum/pide_engine.hpp"

namespace oracle {

// ---- quadrature -------------------------------------------------------------

inline double simpson(const std::function<double(double)>& f, double a, double m, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson integral of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_step(f, a, m, b, fa, fm, fb, simpson(f, a, m, b, fa, fm, fb), tol, depth);
}

// ---- jump size density ------------------------------------------------------

/// Double exponential log-jump density, written out directly.
inline double kou_jump_density(const decum::KouAssetParams& a, double y) {
    return y >= 0.0 ? a.u_up * a.eta1 * std::exp(-a.eta1 * y)
                    : (1.0 - a.u_up) * a.eta2 * std::exp(a.eta2 * y);
}

/// E[e^y] - 1 under the jump density, by quadrature on each half line.
inline double mean_jump_excess_quadrature(const decum::KouAssetParams& a) {
    // e^y tail needs eta1 > 1; integrate far enough that the remainder is
    // below the quadrature tolerance.
    const double up = 60.0 / (a.eta1 - 1.0) + 60.0 / a.eta1;
    const double dn = 60.0 / (a.eta2 + 1.0) + 60.0 / a.eta2;
    const auto f = [&](double y) { return std::exp(y) * kou_jump_density(a, y); };
    return integrate(f, -dn, 0.0) + integrate(f, 0.0, up) - 1.0;
}

/// Conjugate Fourier transform of the jump density at frequency w (cycles),
/// by quadrature of e^{2 pi i w y} against the density.
inline std::complex<double> jump_transform_quadrature(const decum::KouAssetParams& a, double w) {
    const double up = 80.0 / a.eta1, dn = 80.0 / a.eta2;
    const auto re = [&](double y) {
        return std::cos(2.0 * M_PI * w * y) * kou_jump_density(a, y);
    };
    const auto im = [&](double y) {
        return std::sin(2.0 * M_PI * w * y) * kou_jump_density(a, y);
    };
    return {integrate(re, -dn, 0.0) + integrate(re, 0.0, up),
            integrate(im, -dn, 0.0) + integrate(im, 0.0, up)};
}

// ---- Gaussian transition kernel --------------------------------------------

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

/// One-dimensional Brownian transition density smoothed against the grid
/// hat function and normalized by dx: the exact target of one kernel
/// dimension when jumps are off.
inline double tent_smoothed_normal(double z, double mean, double sd, double dx) {
    const auto f = [&](double x) {
        const double t = 1.0 - std::abs(x - z) / dx;
        return t > 0.0 ? normal_pdf(x, mean, sd) * t / dx : 0.0;
    };
    return integrate(f, z - dx, z + dx, 1e-13);
}

// ---- brute-force circular convolution ----------------------------------------

/// Direct O(N^4) circular convolution of slot-layout weights with a padded
/// surface: out(i,j) = sum over displacement slots (d1,d2) of
/// w(d1,d2) * v((i-d1) mod n1, (j-d2) mod n2) * cell_area.
inline decum::Array2<double> circular_convolve(const decum::Array2<double>& w,
                                               const decum::Array2<double>& v, double cell_area) {
    if (!w.same_shape(v)) throw std::invalid_argument("shape mismatch");
    decum::Array2<double> out(w.n1, w.n2);
    for (int i = 0; i < w.n1; ++i)
        for (int j = 0; j < w.n2; ++j) {
            double acc = 0.0;
            for (int d1 = 0; d1 < w.n1; ++d1)
                for (int d2 = 0; d2 < w.n2; ++d2)
                    acc += w(d1, d2) * v(((i - d1) % w.n1 + w.n1) % w.n1,
                                         ((j - d2) % w.n2 + w.n2) % w.n2);
            out(i, j) = acc * cell_area;
        }
    return out;
}

/// Textbook O(N^2) discrete Fourier transform for cross-checking dft2.
inline decum::Array2<std::complex<double>> dft2_direct(
    const decum::Array2<std::complex<double>>& in, int sign) {
    decum::Array2<std::complex<double>> out(in.n1, in.n2);
    for (int k1 = 0; k1 < in.n1; ++k1)
        for (int k2 = 0; k2 < in.n2; ++k2) {
            std::complex<double> acc = 0.0;
            for (int i = 0; i < in.n1; ++i)
                for (int j = 0; j < in.n2; ++j) {
                    const double ang = 2.0 * M_PI *
                                       (static_cast<double>(k1) * i / in.n1 +
                                        static_cast<double>(k2) * j / in.n2);
                    acc += in(i, j) * std::polar(1.0, sign * ang);
                }
            out(k1, k2) = acc;
        }
    return out;
}

// ---- independent state interpolation -----------------------------------------

/// Reference bilinear read of a value surface at the post-rebalance state
/// (stock = w*p, bond leg per the sign cases). Brackets on the log lattice,
/// weights linear in the dollar legs, clamped at the top edges and
/// continued leg-linearly to the zero-holding limit below the bottom ones.
inline double eval_state(const decum::ValueSurfacePair& v, const decum::GridPair& grids, double w,
                         double p) {
    const bool neg = (w <= 0.0) || (p > 1.0);
    const decum::GridSpec& g = neg ? grids.neg : grids.pos;
    const decum::Array2<double>& a = neg ? v.neg : v.pos;

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

    const auto locate = [](double leg, double x_min, double dx, int n, int& k, double& f) {
        const double t = (std::log(leg) - x_min) / dx;
        if (!(t > 0.0)) {
            k = 0;
            if (t < 0.0) {
                const double lo = std::exp(x_min);
                const double hi = std::exp(x_min + dx);
                f = (leg - lo) / (hi - lo);
            } else {
                f = 0.0;
            }
        } else if (t >= n - 1) {
            k = n - 2;
            f = 1.0;
        } else {
            k = static_cast<int>(t);
            const double lo = std::exp(x_min + k * dx);
            const double hi = std::exp(x_min + (k + 1) * dx);
            f = std::clamp((leg - lo) / (hi - lo), 0.0, 1.0);
        }
    };

    int i, j;
    double f1, f2;
    locate(leg1, g.x1_min, g.dx1(), g.n1, i, f1);
    locate(leg2, g.x2_min, g.dx2(), g.n2, j, f2);
    return (1.0 - f1) * ((1.0 - f2) * a(i, j) + f2 * a(i, j + 1)) +
           f1 * ((1.0 - f2) * a(i + 1, j) + f2 * a(i + 1, j + 1));
}

// ---- expected shortfall by threshold scan -------------------------------------

struct EsScan {
    double es = 0.0;
    double var = 0.0;
};

/// Maximizes f(t) = t + mean(min(x - t, 0))/alpha over a dense candidate
/// set (all sample values plus midpoints). The maximum is the expected
/// shortfall and the smallest maximizer is the alpha-quantile.
inline EsScan rockafellar_scan(std::vector<double> samples, double alpha) {
    std::sort(samples.begin(), samples.end());
    std::vector<double> cands = samples;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        cands.push_back(0.5 * (samples[i] + samples[i + 1]));
    EsScan best;
    bool seeded = false;
    for (const double t : cands) {
        long double acc = 0.0L;
        for (const double x : samples) acc += std::min(x - t, 0.0);
        const double val = t + static_cast<double>(acc / samples.size()) / alpha;
        if (!seeded) {
            seeded = true;
            best.es = val;
            best.var = t;
        } else if (val > best.es + 1e-12 * (1.0 + std::abs(best.es))) {
            best.es = val;
            best.var = t;
        }
    }
    return best;
}

}  // namespace oracle
