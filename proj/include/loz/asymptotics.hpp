// Bulk asymptotics: critical points of the action's logarithmic derivative,
// complex slopes, incomplete Beta / discrete sine kernels, exponential
// Stieltjes and R-transforms, limit-shape fields, and the finite-N
// asymptotic kernel.
//
// The central object is the critical equation G'(tau) = 0.  For a top row t
// and a bulk location (x, n) the discrete G' is a rational function with
// simple poles; it has either no non-real roots (frozen local behavior) or
// exactly one conjugate pair (liquid).  The upper root tau maps to the
// complex slope xi = (tau - x)/(tau - x + N - n), which drives every local
// prediction: lozenge densities are triangle angles of xi, and multi-point
// correlations are determinants of the incomplete Beta kernel at xi.
#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "loz/core.hpp"

namespace loz {

using Complex = std::complex<double>;

// ============================================================
// Critical equation
// ============================================================

// Atoms of mass 1/N at d/N: positive where the top row has a particle
// outside the window interval [x-N+n, x-1], negative on the holes of the
// interval.  Shared locations cancel, which is what keeps interval densities
// within +-(length + 1/N).
struct SignedCountingMeasure {
    int N = 0;
    std::vector<long long> positive;  // t entries outside [x-N+n, x-1]
    std::vector<long long> negative;  // integers of [x-N+n, x-1] not in t
};

SignedCountingMeasure signed_counting_measure(const Signature& t, long long x,
                                              int n);

// sum_{a=1}^{N-n} 1/(z - x + a) - sum_r 1/(z - t_r).
// Throws PoleHit when z sits exactly on one of the real poles.
Complex g_prime_discrete(const Signature& t, long long x, int n, Complex z);

// Continuum analogue at scaled location (xhat, eta):
// ln(z - xhat - eta + 1) - ln(z - xhat) - sum_i q_i [ln(z-a_i) - ln(z-b_i)]
// with principal logarithms.  Throws PoleHit on the real singular set.
Complex g_prime_continuous(const PiecewiseDensityMeasure& nu, double xhat,
                           double eta, Complex z);

// Upper-half-plane root search certified by an argument-principle winding
// count over a rectangular box.  winding 0 means certified absence inside
// the box; winding 1 comes with a polished root and its residual |G'(root)|.
// A count of 2 or more would contradict the pair structure of the critical
// equation and throws CertificationFailed.
struct SolverCertificate {
    bool has_root = false;
    Complex root{0.0, 0.0};
    double residual = 0.0;
    int winding = 0;
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

SolverCertificate critical_point_discrete(const Signature& t, long long x,
                                          int n);
SolverCertificate critical_point_continuous(const PiecewiseDensityMeasure& nu,
                                            double xhat, double eta);

// ============================================================
// Complex slope and local densities
// ============================================================

struct ComplexSlope {
    Complex xi;  // strictly upper half-plane
};

// xi = (tau - xhat)/(tau - xhat + 1 - eta) when the critical point exists,
// empty otherwise (frozen).
std::optional<ComplexSlope> complex_slope(const PiecewiseDensityMeasure& nu,
                                          double xhat, double eta);

struct SlopeTriple {
    double p_down = 0.0, p_up = 0.0, p_hor = 0.0;
};

// Triangle angles of xi: p_hor = arg(xi)/pi, p_down = -arg(1-xi)/pi,
// p_up the complement; each lies in (0,1) for upper-half-plane xi.
SlopeTriple densities_from_slope(const ComplexSlope& slope);

// Incomplete Beta kernel at slope xi and offsets dx = x2-x1, dn = n2-n1,
// normalized so that one-level values reproduce the discrete sine kernel
// sin(arg(xi) dx)/(pi dx).  Correlation determinants are unchanged by the
// normalization, which cancels in products over cycles.
double incomplete_beta(const ComplexSlope& slope, long long dx, long long dn);

// det over the incomplete-Beta kernel matrix of the given distinct offsets;
// the probability of seeing horizontal lozenges at all of them.  Empty list
// gives 1.
double predicted_correlation(const ComplexSlope& slope,
                             const std::vector<std::pair<long long, int>>& offsets);

// ============================================================
// Exponential Stieltjes and R-transforms
// ============================================================

// prod_i ((z-a_i)/(z-b_i))^{q_i}, principal branch per piece.  Throws
// OnSupport for real z inside the support.
Complex exp_stieltjes(const PiecewiseDensityMeasure& mu, Complex z);

// E^{(-1)}(v) - v/(v-1) with the functional inverse certified by Newton
// residual and an off-support check; throws InversionFailed outside the
// certified neighborhood of 1.
Complex r_transform(const PiecewiseDensityMeasure& mu, Complex v);

// ============================================================
// Limit shape
// ============================================================

enum class PointStatus { kLiquid, kFrozen0, kFrozen1, kDegenerate };

struct SlopePoint {
    PointStatus status = PointStatus::kDegenerate;
    SlopeTriple densities{};   // liquid: triangle angles; frozen: 0/1 pattern
    Complex xi{0.0, 0.0};      // meaningful only when liquid
};

// Classification of a single scaled point: liquid with densities, frozen
// with the horizontal density pinned to 0 or 1 by the real-root layout of
// G' inside [xhat+eta-1, xhat], or degenerate when neither certification
// succeeds (double real root at the frozen boundary, or an identically
// vanishing G').
SlopePoint classify_point(const PiecewiseDensityMeasure& mu, double xhat,
                          double eta);

struct SlopeField {
    std::vector<double> xs;
    std::vector<double> etas;
    std::vector<std::vector<SlopePoint>> points;  // [eta index][x index]
};

// Per-point classification over the product grid; individual point failures
// are recorded as degenerate entries, never aborting the grid.
SlopeField limit_shape(const PiecewiseDensityMeasure& mu,
                       const std::vector<double>& xs,
                       const std::vector<double>& etas);

// ============================================================
// Finite-N asymptotic kernel
// ============================================================

// Validity thresholds for the bulk asymptotic expansion; the certificate
// root tau_1 must stay macroscopically inside the liquid region and the
// offsets bounded.
struct AsymptoticThresholds {
    double min_im_ratio = 0.02;  // Im(tau_1)/N at least this
    double max_abs_ratio = 50.0; // |tau_1|/N at most this
    long long max_offset = 32;   // |x1-x2| + |n1-n2| at most this
};

// Leading bulk term of the exact kernel at nearby points: the raw
// incomplete-Beta contour integral evaluated at the finite-N slope
// xi_N = (tau_1 - x1)/(tau_1 - x1 + N - n1).  Throws TooCloseToEdge when
// the certificate fails the thresholds.
double kernel_finite_N_asymptotic(const Signature& t, long long x1, int n1,
                                  long long x2, int n2,
                                  const AsymptoticThresholds& thresholds = {});

// ============================================================
// Consistency residuals
// ============================================================

// |((xi-1)/xi) d_eta xi - d_z xi| by central differences of step h, with
// the slope continued to complex z off the real liquid point.  Throws
// NotLiquid when the slope is not well-defined nearby.
double burgers_residual(const PiecewiseDensityMeasure& mu, Complex z,
                        double eta, double h = 1e-4);

// Reconstructs the level-eta swept measure from limit-shape densities on a
// fine grid and returns max_v |R_swept(v) - (1/eta) R_shifted(v)| over the
// given v grid, where the shifted measure is mu translated by +1.  cells
// controls the reconstruction resolution.
double projection_residual(const PiecewiseDensityMeasure& mu, double eta,
                           const std::vector<Complex>& vgrid, int cells = 4000);

namespace detail {

// Raw contour integral (1/2pi i) int_{conj xi}^{xi} w^{dx-1} (1-w)^{dn} dw
// along the canonical two-segment path, by closed-form antiderivative and
// by adaptive quadrature; the pair cross-checks branch handling.
double raw_beta_closed_form(Complex xi, long long dx, long long dn);
double raw_beta_quadrature(Complex xi, long long dx, long long dn);

// Complex slope continued to complex z (analytic continuation of the
// critical root in the first argument of G').
Complex xi_continued(const PiecewiseDensityMeasure& mu, Complex z, double eta);

// Closed-form derivative of log exp_stieltjes.
Complex stieltjes_derivative(const PiecewiseDensityMeasure& mu, Complex z);

}  // namespace detail

}  // namespace loz
