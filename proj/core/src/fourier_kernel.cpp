#include "decum/fourier_kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace decum {

namespace {

constexpr double pi = 3.14159265358979323846264338328;
constexpr double two_pi = 2.0 * pi;

int mod(int a, int m) {
    const int r = a % m;
    return r < 0 ? r + m : r;
}

/// FFTW plans are cached per (shape, direction). Plan creation is not
/// thread safe; execution on distinct buffers is. All buffers come from
/// fftw_malloc, so the alignment recorded in the plan always matches.
class PlanCache {
public:
    fftw_plan get(int n1, int n2, int sign, fftw_complex* in, fftw_complex* out) {
        std::lock_guard<std::mutex> lock(mu_);
        const auto key = std::make_tuple(n1, n2, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_plan p = fftw_plan_dft_2d(n1, n2, in, out, sign, FFTW_ESTIMATE);
        if (!p) throw std::runtime_error("fftw_plan_dft_2d failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

Array2<std::complex<double>> transform(const Array2<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    if (!in || !out) {
        fftw_free(in);
        fftw_free(out);
        throw std::bad_alloc();
    }
    std::memcpy(in, a.data.data(), n * sizeof(fftw_complex));
    fftw_plan p = plan_cache().get(a.n1, a.n2, sign, in, out);
    fftw_execute_dft(p, in, out);
    Array2<std::complex<double>> r(a.n1, a.n2);
    std::memcpy(r.data.data(), out, n * sizeof(fftw_complex));
    fftw_free(in);
    fftw_free(out);
    return r;
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

/// Log-magnitude and phase of one dimension's series factor
///   exp(psi(u/P) * dt) * sinc^2(pi*u/n_pad) * endpoint_weight.
struct DimFactor {
    double log_mag = 0.0;
    double phase = 0.0;
    bool dead = false;  ///< sinc zero: u a nonzero multiple of the lattice size
};

std::vector<DimFactor> dim_factors(const KouAssetParams& asset, double drift_add, int series_len,
                                   int n_pad, double period, double dt) {
    std::vector<DimFactor> f(series_len + 1);
    for (int iu = 0; iu <= series_len; ++iu) {
        const int u = iu - series_len / 2;
        if (u != 0 && u % n_pad == 0) {
            f[iu].dead = true;  // aliases the lattice exactly; sinc^2 vanishes
            continue;
        }
        const double s = sinc(pi * u / n_pad);
        // Endpoints carry half weight so term (u,p) always has its exact
        // conjugate partner (-u,-p) in the sum and the weights come out real.
        const double w = (iu == 0 || iu == series_len) ? 0.5 : 1.0;
        const std::complex<double> psi =
            asset_characteristic_exponent(asset, u / period, drift_add) * dt;
        f[iu].log_mag = psi.real() + std::log(s * s * w);
        f[iu].phase = psi.imag();
    }
    return f;
}

bool deterministic(const KouAssetParams& a) { return a.sigma == 0.0 && a.lambda == 0.0; }

/// One dimension's folded slot coefficients from the truncated series.
std::vector<std::complex<double>> fold_dim(const KouAssetParams& asset, double drift_add,
                                           int series_len, int n_pad, double period, double dt) {
    const auto f = dim_factors(asset, drift_add, series_len, n_pad, period, dt);
    std::vector<std::complex<double>> c(n_pad);
    for (int iu = 0; iu <= series_len; ++iu) {
        if (f[iu].dead || f[iu].log_mag < -745.0) continue;
        c[mod(iu - series_len / 2, n_pad)] += std::polar(std::exp(f[iu].log_mag), f[iu].phase);
    }
    return c;
}

/// A deterministic asset moves by exactly drift*dt, so its hat-smoothed
/// transition density is a triangle: at most two adjacent lattice weights,
/// nonnegative, total mass one. The truncated series cannot represent
/// that point mass, but its slot DFT is available in closed form.
/// Slots hold the density mirrored, w(d) = (hat * f)(-d*dx), matching the
/// e^{+2 pi i u d / N} series fold; the convolution in advance_time then
/// reads v at x + shift rather than x - shift.
std::vector<std::complex<double>> exact_shift_coeffs(int n_pad, double dx, double shift) {
    const double t = -shift / dx;
    const double fl = std::floor(t);
    const double f = t - fl;
    const int s0 = mod(static_cast<int>(fl), n_pad);
    const int s1 = mod(s0 + 1, n_pad);
    std::vector<std::complex<double>> c(n_pad);
    for (int k = 0; k < n_pad; ++k) {
        const double ang = -two_pi * k / n_pad;
        c[k] = (1.0 - f) * std::polar(1.0, ang * s0) + f * std::polar(1.0, ang * s1);
    }
    return c;
}

}  // namespace

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_pow2_dims(const Array2<std::complex<double>>& a) {
    if (!power_of_two(a.n1) || !power_of_two(a.n2))
        throw std::invalid_argument("transform dimensions must be powers of two");
}

}  // namespace

void GridSpec::validate() const {
    if (!power_of_two(n1) || !power_of_two(n2))
        throw std::invalid_argument("grid sizes must be powers of two");
    if (!(x1_max > x1_min) || !(x2_max > x2_min))
        throw std::invalid_argument("grid extents must be increasing");
}

Array2<std::complex<double>> dft2(const Array2<std::complex<double>>& in) {
    require_pow2_dims(in);
    return transform(in, FFTW_FORWARD);
}

Array2<std::complex<double>> idft2(const Array2<std::complex<double>>& in) {
    require_pow2_dims(in);
    return transform(in, FFTW_BACKWARD);
}

double wrap_diagnostic(const Array2<double>& weights, int n1, int n2, double dx1, double dx2) {
    // Displacements with |d| >= n/2 occupy slots [n/2, 3n/2) of the 2n-slot
    // circle; one step can carry that much mass past the padding.
    long double acc = 0.0L;
    for (int s1 = 0; s1 < weights.n1; ++s1) {
        const bool wrap1 = s1 >= n1 / 2 && s1 < 3 * n1 / 2;
        for (int s2 = 0; s2 < weights.n2; ++s2) {
            const bool wrap2 = s2 >= n2 / 2 && s2 < 3 * n2 / 2;
            if (wrap1 || wrap2) acc += std::abs(weights(s1, s2));
        }
    }
    return static_cast<double>(acc) * dx1 * dx2;
}

GreenWeights build_green_weights(const MarketParams& mkt, const GridSpec& grid, double dt,
                                 double delta, double horizon_T, bool use_borrow_spread,
                                 int max_oversample) {
    mkt.validate();
    grid.validate();
    if (!(dt > 0.0) || !(delta > 0.0) || !(horizon_T > 0.0))
        throw std::invalid_argument("dt, delta, horizon_T must be positive");
    if (max_oversample < 1) throw std::invalid_argument("max_oversample must be >= 1");

    const int n1p = 2 * grid.n1;
    const int n2p = 2 * grid.n2;
    const double dx1 = grid.dx1();
    const double dx2 = grid.dx2();
    const double period1 = n1p * dx1;
    const double period2 = n2p * dx2;
    const double budget = delta * dt / horizon_T;
    const double drift_add = use_borrow_spread ? mkt.mu_c_bond : 0.0;
    // Brownian cross term exp(-rho*sigma_s*sigma_b*(2pi u/P1)(2pi p/P2)*dt),
    // a real factor exp(-cross_up * u * p).
    const double cross_up =
        mkt.rho_sb * mkt.stock.sigma * mkt.bond.sigma * two_pi * two_pi / (period1 * period2) * dt;

    GreenWeights gw;
    gw.dt = dt;
    gw.dx1 = dx1;
    gw.dx2 = dx2;

    const bool det1 = deterministic(mkt.stock);
    const bool det2 = deterministic(mkt.bond);

    for (int k = 1; k <= max_oversample; k *= 2) {
        const int len1 = k * n1p;
        const int len2 = k * n2p;

        Array2<std::complex<double>> folded(n1p, n2p);
        if (det1 || det2) {
            // At least one leg has no volatility, so the Brownian cross term
            // is identically one and the kernel factorizes across dimensions.
            const auto ca = det1 ? exact_shift_coeffs(n1p, dx1, mkt.stock.mu * dt)
                                 : fold_dim(mkt.stock, 0.0, len1, n1p, period1, dt);
            const auto cb = det2 ? exact_shift_coeffs(n2p, dx2, (mkt.bond.mu + drift_add) * dt)
                                 : fold_dim(mkt.bond, drift_add, len2, n2p, period2, dt);
            for (int i = 0; i < n1p; ++i)
                for (int j = 0; j < n2p; ++j) folded(i, j) = ca[i] * cb[j];
        } else {
            const auto fa = dim_factors(mkt.stock, 0.0, len1, n1p, period1, dt);
            const auto fb = dim_factors(mkt.bond, drift_add, len2, n2p, period2, dt);

            // Fold every series term into its slot on the padded lattice; the
            // single backward transform below then evaluates the whole sum.
            for (int iu = 0; iu <= len1; ++iu) {
                if (fa[iu].dead) continue;
                const int u = iu - len1 / 2;
                const int s1 = mod(u, n1p);
                for (int ip = 0; ip <= len2; ++ip) {
                    if (fb[ip].dead) continue;
                    const int p = ip - len2 / 2;
                    const double log_mag = fa[iu].log_mag + fb[ip].log_mag - cross_up * u * p;
                    if (log_mag < -745.0) continue;  // underflows to zero anyway
                    folded(s1, mod(p, n2p)) +=
                        std::polar(std::exp(log_mag), fa[iu].phase + fb[ip].phase);
                }
            }
        }

        const auto g = idft2(folded);
        const double scale = 1.0 / (period1 * period2);
        gw.weights = Array2<double>(n1p, n2p);
        double max_abs = 0.0;
        double max_im = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double re = g.data[i].real() * scale;
            gw.weights.data[i] = re;
            max_abs = std::max(max_abs, std::abs(re));
            max_im = std::max(max_im, std::abs(g.data[i].imag()) * scale);
        }
        if (max_im > 1e-10 * std::max(max_abs, 1.0))
            throw std::runtime_error("green weights came out complex; conjugate pairing is broken");

        long double neg = 0.0L, total = 0.0L;
        for (double v : gw.weights.data) {
            total += v;
            if (v < 0.0) neg -= v;
        }
        gw.neg_mass = static_cast<double>(neg) * dx1 * dx2;
        gw.total_mass = static_cast<double>(total) * dx1 * dx2;
        gw.wrap_mass = wrap_diagnostic(gw.weights, grid.n1, grid.n2, dx1, dx2);
        gw.n1_series = len1;
        gw.n2_series = len2;

        if (gw.neg_mass < budget) {
            Array2<std::complex<double>> wc(n1p, n2p);
            for (std::size_t i = 0; i < wc.size(); ++i) wc.data[i] = gw.weights.data[i];
            gw.weights_dft = dft2(wc);
            for (auto& c : gw.weights_dft.data) c *= dx1 * dx2;
            return gw;
        }
    }
    throw MonotonicityError("negative weight mass " + std::to_string(gw.neg_mass) +
                            " still exceeds budget " + std::to_string(budget) + " at " +
                            std::to_string(gw.n1_series) + "x" + std::to_string(gw.n2_series) +
                            " series terms; refine the grid or loosen delta");
}

Array2<double> advance_time(const GreenWeights& gw, const Array2<double>& v_padded) {
    if (!v_padded.same_shape(gw.weights))
        throw std::invalid_argument("padded surface shape does not match the weights");

    Array2<std::complex<double>> vc(v_padded.n1, v_padded.n2);
    double max_abs_v = 0.0;
    for (std::size_t i = 0; i < vc.size(); ++i) {
        vc.data[i] = v_padded.data[i];
        max_abs_v = std::max(max_abs_v, std::abs(v_padded.data[i]));
    }
    auto vhat = dft2(vc);
    for (std::size_t i = 0; i < vhat.size(); ++i) vhat.data[i] *= gw.weights_dft.data[i];
    const auto out = idft2(vhat);

    const double norm = 1.0 / (static_cast<double>(v_padded.n1) * v_padded.n2);
    Array2<double> result(v_padded.n1, v_padded.n2);
    double max_im = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        result.data[i] = out.data[i].real() * norm;
        max_im = std::max(max_im, std::abs(out.data[i].imag()) * norm);
    }
    if (max_im > 1e-10 * max_abs_v)
        throw std::runtime_error("time advance produced an imaginary residue above tolerance");
    return result;
}

void GreenWeights::dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const std::int64_t dims[2] = {weights.n1, weights.n2};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    const double header[4] = {dt, neg_mass, wrap_mass, total_mass};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(weights.data.data()),
              static_cast<std::streamsize>(weights.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace decum
