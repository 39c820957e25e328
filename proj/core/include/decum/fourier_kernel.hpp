#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "decum/array2.hpp"
#include "decum/market_model.hpp"

namespace decum {

/// Uniform log-price grid in two dimensions. Node i carries
/// x1 = x1_min + i * dx1 (row), node j likewise for x2 (column).
/// Anchors record where the grid was centered; they do not enter the
/// kernel, which depends only on (dx, n).
struct GridSpec {
    int n1 = 0;
    int n2 = 0;
    double x1_min = 0.0, x1_max = 0.0;
    double x2_min = 0.0, x2_max = 0.0;
    double x1_anchor = 0.0;
    double x2_anchor = 0.0;

    double dx1() const { return (x1_max - x1_min) / n1; }
    double dx2() const { return (x2_max - x2_min) / n2; }
    double x1(int i) const { return x1_min + i * dx1(); }
    double x2(int j) const { return x2_min + j * dx2(); }

    void validate() const;
};

/// Raised when the kernel cannot satisfy the negative-mass budget even at
/// the maximum series refinement.
struct MonotonicityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete Green's function weights on the padded 2n1 x 2n2 lattice,
/// stored in displacement-slot layout: the weight for displacement
/// (d1, d2) with d in [-n, n-1] lives at (d1 mod 2n1, d2 mod 2n2).
struct GreenWeights {
    Array2<double> weights;                      ///< 2n1 x 2n2, slot layout
    Array2<std::complex<double>> weights_dft;    ///< forward DFT of weights, scaled by dx1*dx2
    double dt = 0.0;
    double dx1 = 0.0, dx2 = 0.0;
    double neg_mass = 0.0;    ///< sum dx1*dx2*|min(w,0)|
    double wrap_mass = 0.0;   ///< mass in displacement slots beyond +-n/2
    double total_mass = 0.0;  ///< sum dx1*dx2*w
    int n1_series = 0;        ///< frequency series length actually used (row dim)
    int n2_series = 0;

    /// Binary dump: header (n1, n2, dt, neg_mass, wrap_mass, total_mass),
    /// then the row-major weight array. Little-endian 64-bit fields.
    void dump(const std::string& path) const;
};

/// Unnormalized forward DFT of a 2-d array (sign -1 exponent).
Array2<std::complex<double>> dft2(const Array2<std::complex<double>>& in);

/// Unnormalized backward DFT (sign +1 exponent). dft2 then idft2 scales by n1*n2.
Array2<std::complex<double>> idft2(const Array2<std::complex<double>>& in);

/// Build the time-step weights for the padded lattice belonging to `grid`.
///
/// The target density is the exact transition kernel smoothed against the
/// grid hat function, evaluated by a frequency series with sinc^2 damping:
///   g(d1*dx1, d2*dx2) = sum over (u, p) of
///       exp(Psi(u/P1, p/P2) * dt) * sinc^2(u dx1 / P1) * sinc^2(p dx2 / P2)
///       * e^{2 pi i (u d1 / N1 + p d2 / N2)} / (P1 * P2)
/// where P = N * dx on the padded lattice. The series length starts at the
/// lattice size and doubles (denser frequency sampling, same lattice, terms
/// folded by index modulo the lattice) until the negative mass satisfies
///   neg_mass < delta * dt / horizon_T
/// or the length reaches max_oversample times the lattice size, in which
/// case MonotonicityError is thrown.
GreenWeights build_green_weights(const MarketParams& mkt, const GridSpec& grid, double dt,
                                 double delta, double horizon_T, bool use_borrow_spread = false,
                                 int max_oversample = 8);

/// Mass located in displacement slots whose row or column displacement
/// exceeds half the unpadded grid, i.e. the weight that the padding exists
/// to absorb. Computed over the slot-layout array.
double wrap_diagnostic(const Array2<double>& weights, int n1, int n2, double dx1, double dx2);

/// One PIDE time step on the padded array: v <- IDFT(weights_dft .* DFT(v)).
/// Input and output are real 2n1 x 2n2 padded surfaces; the imaginary
/// residue of the inverse transform must stay below 1e-10 * max|v| or the
/// step throws.
Array2<double> advance_time(const GreenWeights& gw, const Array2<double>& v_padded);

}  // namespace decum
