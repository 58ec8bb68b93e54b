#include "loz/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <utility>

#include "loz/errors.hpp"
#include "loz/poly.hpp"

namespace loz {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Complex ipow(Complex w, long long k) {
    if (k < 0) return 1.0 / ipow(w, -k);
    Complex acc(1.0, 0.0);
    Complex base = w;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

double binom(long long n, long long k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (long long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// ------------------------------------------------------------
// Certified upper-half-plane root search, shared by the discrete and
// continuous critical equations.
// ------------------------------------------------------------

using Fn = std::function<Complex(Complex)>;

// Accumulated argument change of f along the segment z1 -> z2, subdividing
// until each step turns the phase by less than ~0.8 rad.
double arg_change(const Fn& f, Complex z1, Complex z2, Complex f1, Complex f2,
                  int depth) {
    Complex ratio = f2 / f1;
    double d = std::arg(ratio);
    if (std::abs(d) < 0.8 && depth >= 2) return d;
    if (depth > 48)
        throw LozError(ErrCode::CertificationFailed,
                       "winding integrand oscillates beyond subdivision cap");
    Complex zm = 0.5 * (z1 + z2);
    Complex fm = f(zm);
    if (std::abs(fm) < 1e-300)
        throw LozError(ErrCode::CertificationFailed,
                       "function vanishes on certification contour");
    return arg_change(f, z1, zm, f1, fm, depth + 1) +
           arg_change(f, zm, z2, fm, f2, depth + 1);
}

int winding_count(const Fn& f, double re_lo, double re_hi, double im_lo,
                  double im_hi) {
    const Complex corners[5] = {
        {re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi}, {re_lo, im_hi},
        {re_lo, im_lo}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        // seed each edge with a fixed partition; the recursion refines it
        const int kSeed = 32;
        Complex prev = corners[e];
        Complex fprev = f(prev);
        for (int k = 1; k <= kSeed; ++k) {
            Complex cur = corners[e] + (corners[e + 1] - corners[e]) *
                                           (static_cast<double>(k) / kSeed);
            Complex fcur = f(cur);
            if (std::abs(fprev) < 1e-300 || std::abs(fcur) < 1e-300)
                throw LozError(ErrCode::CertificationFailed,
                               "function vanishes on certification contour");
            total += arg_change(f, prev, cur, fprev, fcur, 0);
            prev = cur;
            fprev = fcur;
        }
    }
    double w = total / (2.0 * kPi);
    long long rounded = std::llround(w);
    if (std::abs(w - static_cast<double>(rounded)) > 0.25)
        throw LozError(ErrCode::CertificationFailed,
                       "winding count far from an integer");
    return static_cast<int>(rounded);
}

// Newton iteration polished to relative tolerance 1e-12 in the root.
std::optional<Complex> newton_root(const Fn& f, const Fn& df, Complex z0,
                                   double im_floor) {
    Complex z = z0;
    for (int it = 0; it < 80; ++it) {
        Complex fv = f(z);
        Complex dv = df(z);
        if (std::abs(dv) < 1e-300) return std::nullopt;
        Complex step = fv / dv;
        z -= step;
        if (!(std::isfinite(z.real()) && std::isfinite(z.imag())))
            return std::nullopt;
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) {
            if (z.imag() <= im_floor) return std::nullopt;
            return z;
        }
    }
    return std::nullopt;
}

SolverCertificate certified_upper_root(const Fn& f, const Fn& df,
                                       double re_lo, double re_hi,
                                       double im_lo, double im_hi) {
    SolverCertificate cert;
    cert.re_lo = re_lo;
    cert.re_hi = re_hi;
    cert.im_lo = im_lo;
    cert.im_hi = im_hi;
    cert.winding = winding_count(f, re_lo, re_hi, im_lo, im_hi);
    if (cert.winding == 0) return cert;
    if (cert.winding >= 2 || cert.winding < 0)
        throw LozError(ErrCode::CertificationFailed,
                       "more than one root certified in the upper box",
                       cert.winding);

    // Newton from a seed grid over the box
    for (int iy = 0; iy < 8 && !cert.has_root; ++iy) {
        double im = im_hi * std::pow(0.35, iy);
        if (im <= im_lo) break;
        for (int ix = 0; ix < 16 && !cert.has_root; ++ix) {
            double re =
                re_lo + (re_hi - re_lo) * (ix + 0.5) / 16.0;
            auto r = newton_root(f, df, Complex(re, im), im_lo);
            if (r && r->real() > re_lo - 1e-9 && r->real() < re_hi + 1e-9 &&
                r->imag() < im_hi + 1e-9) {
                cert.has_root = true;
                cert.root = *r;
            }
        }
    }

    // winding-guided bisection when the seeds all miss
    if (!cert.has_root) {
        double a = re_lo, b = re_hi, lo = im_lo, hi = im_hi;
        for (int split = 0; split < 60 && !cert.has_root; ++split) {
            if (b - a > hi - lo) {
                double mid = 0.5 * (a + b);
                int wl = winding_count(f, a, mid, lo, hi);
                if (wl == 1)
                    b = mid;
                else
                    a = mid;
            } else {
                double mid = 0.5 * (lo + hi);
                int wl = winding_count(f, a, b, lo, mid);
                if (wl == 1)
                    hi = mid;
                else
                    lo = mid;
            }
            if (b - a < 1e-8 && hi - lo < 1e-8) {
                auto r = newton_root(f, df, Complex(0.5 * (a + b), 0.5 * (lo + hi)),
                                     im_lo);
                if (r) {
                    cert.has_root = true;
                    cert.root = *r;
                }
            }
        }
        if (!cert.has_root)
            throw LozError(ErrCode::CertificationFailed,
                           "winding certifies a root the refinement cannot reach");
    }
    cert.residual = std::abs(f(cert.root));
    return cert;
}

// ------------------------------------------------------------
// Signed density layout of the continuous critical equation
// ------------------------------------------------------------

// Elementary intervals of 1_[xhat+eta-1, xhat] - nu with constant sign.
struct SignedLayout {
    std::vector<double> cuts;    // sorted breakpoints
    std::vector<double> signed_q;  // value on (cuts[i], cuts[i+1])
    double ilo = 0.0, ihi = 0.0;   // the window interval
};

SignedLayout signed_layout(const PiecewiseDensityMeasure& nu, double xhat,
                           double eta) {
    SignedLayout lay;
    lay.ilo = xhat + eta - 1.0;
    lay.ihi = xhat;
    std::vector<double> cuts{lay.ilo, lay.ihi};
    for (const auto& p : nu.pieces) {
        cuts.push_back(p.a);
        cuts.push_back(p.b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    lay.cuts = cuts;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double s = (mid > lay.ilo && mid < lay.ihi ? 1.0 : 0.0) -
                   nu.density_at(mid);
        lay.signed_q.push_back(s);
    }
    return lay;
}

bool layout_identically_zero(const SignedLayout& lay) {
    for (double s : lay.signed_q)
        if (std::abs(s) > 1e-9) return false;
    return true;
}

// Real value of G' on a zero-signed-density stretch, via logs of absolute
// values (imaginary parts cancel exactly there).
double g_prime_real(const PiecewiseDensityMeasure& nu, double xhat, double eta,
                    double u) {
    double v = std::log(std::abs(u - xhat + 1.0 - eta)) -
               std::log(std::abs(u - xhat));
    for (const auto& p : nu.pieces) {
        if (p.q == 0.0) continue;
        v -= p.q * (std::log(std::abs(u - p.a)) - std::log(std::abs(u - p.b)));
    }
    return v;
}

Complex g_prime_cont_complex(const PiecewiseDensityMeasure& nu, double xhat,
                             double eta, Complex z) {
    Complex v = std::log(z - (xhat + eta - 1.0)) - std::log(z - xhat);
    for (const auto& p : nu.pieces)
        v -= p.q * (std::log(z - p.a) - std::log(z - p.b));
    return v;
}

Complex g_second_cont_complex(const PiecewiseDensityMeasure& nu, double xhat,
                              double eta, Complex z) {
    Complex v = 1.0 / (z - (xhat + eta - 1.0)) - 1.0 / (z - xhat);
    for (const auto& p : nu.pieces)
        v -= p.q * (1.0 / (z - p.a) - 1.0 / (z - p.b));
    return v;
}

void check_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw LozError(ErrCode::LevelOutOfRange,
                       "level fraction must lie strictly inside (0,1)");
}

// ------------------------------------------------------------
// Incomplete Beta antiderivative
// ------------------------------------------------------------

struct Antiderivative {
    std::vector<std::pair<long long, double>> wpow;  // c * w^k
    std::vector<std::pair<long long, double>> upow;  // c * (1-w)^k
    double alpha = 0.0;  // * log w
    double beta = 0.0;   // * log(1-w)
};

Antiderivative build_antiderivative(long long dx, long long dn) {
    Antiderivative f;
    const long long p = dx - 1, q = dn;
    auto add_w = [&](long long e, double c) {
        // integral of c w^e
        if (e == -1)
            f.alpha += c;
        else
            f.wpow.emplace_back(e + 1, c / static_cast<double>(e + 1));
    };
    auto add_u = [&](long long m, double c) {
        // integral of c (1-w)^m
        if (m == -1)
            f.beta -= c;
        else
            f.upow.emplace_back(m + 1, -c / static_cast<double>(m + 1));
    };
    if (q >= 0) {
        for (long long k = 0; k <= q; ++k)
            add_w(p + k, binom(q, k) * (k % 2 ? -1.0 : 1.0));
    } else if (p >= 0) {
        for (long long j = 0; j <= p; ++j)
            add_u(j + q, binom(p, j) * (j % 2 ? -1.0 : 1.0));
    } else {
        // 1/(w^a (1-w)^b) = sum A_i w^{-i} + sum B_j (1-w)^{-j}
        const long long a = -p, b = -q;
        for (long long i = 1; i <= a; ++i) add_w(-i, binom(a + b - i - 1, b - 1));
        for (long long j = 1; j <= b; ++j) add_u(-j, binom(a + b - j - 1, a - 1));
    }
    return f;
}

Complex eval_antiderivative(const Antiderivative& f, Complex w) {
    Complex s(0.0, 0.0);
    for (const auto& [k, c] : f.wpow) s += c * ipow(w, k);
    for (const auto& [k, c] : f.upow) s += c * ipow(1.0 - w, k);
    if (f.alpha != 0.0) s += f.alpha * std::log(w);
    if (f.beta != 0.0) s += f.beta * std::log(1.0 - w);
    return s;
}

double beta_mid_anchor(long long dn) { return dn >= 0 ? 0.5 : -1.0; }

Complex beta_integrand(Complex w, long long dx, long long dn) {
    return ipow(w, dx - 1) * ipow(1.0 - w, dn);
}

Complex adaptive_simpson(const std::function<Complex(Complex)>& f, Complex a,
                         Complex b, Complex fa, Complex fb, Complex fm,
                         double tol, int depth) {
    Complex m = 0.5 * (a + b);
    Complex lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Complex flm = f(lm), frm = f(rm);
    Complex whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    Complex left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    Complex right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    Complex delta = left + right - whole;
    if (depth > 2 && (std::abs(delta) < 15.0 * tol || depth > 28))
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, tol / 2, depth + 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, tol / 2, depth + 1);
}

Complex integrate_segment(const std::function<Complex(Complex)>& f, Complex a,
                          Complex b) {
    Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double scale = std::max({std::abs(fa), std::abs(fb), std::abs(fm), 1.0}) *
                   std::abs(b - a);
    return adaptive_simpson(f, a, b, fa, fb, fm, 1e-14 * scale, 0);
}

// ------------------------------------------------------------
// Frozen classification by real-root counting
// ------------------------------------------------------------

// Counts sign changes of G' on the zero-density stretches strictly inside
// the window interval, with geometric refinement toward the singular ends.
// Contiguous zero cells form one analytic stretch, so the running sign
// carries across their shared breakpoints.
int count_window_roots(const PiecewiseDensityMeasure& nu, double xhat,
                       double eta, const SignedLayout& lay) {
    int count = 0;
    int prev = 0;
    for (size_t i = 0; i + 1 < lay.cuts.size(); ++i) {
        double a = std::max(lay.cuts[i], lay.ilo);
        double b = std::min(lay.cuts[i + 1], lay.ihi);
        if (b - a < 1e-12 || std::abs(lay.signed_q[i]) > 1e-9) {
            prev = 0;
            continue;
        }
        std::vector<double> pts;
        const int kUniform = 128;
        for (int k = 0; k < kUniform; ++k)
            pts.push_back(a + (b - a) * (k + 0.5) / kUniform);
        for (int j = 2; j < 40; ++j) {
            double off = (b - a) * std::pow(0.5, j);
            pts.push_back(a + off);
            pts.push_back(b - off);
        }
        std::sort(pts.begin(), pts.end());
        for (double u : pts) {
            double v = g_prime_real(nu, xhat, eta, u);
            if (!std::isfinite(v)) continue;
            int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
            if (s == 0) continue;
            if (prev != 0 && s != prev) ++count;
            prev = s;
        }
    }
    return count;
}

int positive_runs_in_window(const SignedLayout& lay) {
    int runs = 0;
    bool in_run = false;
    for (size_t i = 0; i + 1 < lay.cuts.size(); ++i) {
        double a = std::max(lay.cuts[i], lay.ilo);
        double b = std::min(lay.cuts[i + 1], lay.ihi);
        bool pos = b - a > 1e-12 && lay.signed_q[i] > 1e-9;
        if (pos && !in_run) ++runs;
        in_run = pos;
    }
    return runs;
}

// ------------------------------------------------------------
// Stieltjes helpers
// ------------------------------------------------------------

Complex cauchy_transform(const PiecewiseDensityMeasure& mu, Complex z) {
    Complex s(0.0, 0.0);
    for (const auto& p : mu.pieces)
        s += p.q * (std::log(z - p.a) - std::log(z - p.b));
    return s;
}

double measure_mean(const PiecewiseDensityMeasure& mu) {
    double m = 0.0;
    for (const auto& p : mu.pieces) m += p.q * 0.5 * (p.b * p.b - p.a * p.a);
    return m;
}

PiecewiseDensityMeasure translate_measure(const PiecewiseDensityMeasure& mu,
                                          double s) {
    std::vector<PiecewiseDensityMeasure::Piece> pieces;
    pieces.reserve(mu.pieces.size());
    for (const auto& p : mu.pieces) pieces.push_back({p.a + s, p.b + s, p.q});
    return PiecewiseDensityMeasure::unchecked(std::move(pieces));
}

}  // namespace

// ============================================================
// Critical equation
// ============================================================

SignedCountingMeasure signed_counting_measure(const Signature& t, long long x,
                                              int n) {
    PoleClasses pc = critical_poles(t, x, n);
    SignedCountingMeasure m;
    m.N = t.n();
    m.negative = pc.plus;  // holes of the window interval
    m.positive = pc.minus_left;
    m.positive.insert(m.positive.end(), pc.minus_right.begin(),
                      pc.minus_right.end());
    std::sort(m.positive.begin(), m.positive.end());
    return m;
}

Complex g_prime_discrete(const Signature& t, long long x, int n, Complex z) {
    const int N = t.n();
    if (n < 1 || n > N)
        throw LozError(ErrCode::LevelOutOfRange, "level outside 1..N", n);
    if (z.imag() == 0.0) {
        double r = z.real();
        for (long long a = 1; a <= N - n; ++a)
            if (r == static_cast<double>(x - a))
                throw LozError(ErrCode::PoleHit, "z on an interval pole", x - a);
        for (long long tv : t.entries)
            if (r == static_cast<double>(tv))
                throw LozError(ErrCode::PoleHit, "z on a top-row pole", tv);
    }
    Complex s(0.0, 0.0);
    for (long long a = 1; a <= N - n; ++a) s += 1.0 / (z - static_cast<double>(x - a));
    for (long long tv : t.entries) s -= 1.0 / (z - static_cast<double>(tv));
    return s;
}

Complex g_prime_continuous(const PiecewiseDensityMeasure& nu, double xhat,
                           double eta, Complex z) {
    check_eta(eta);
    if (z.imag() == 0.0) {
        SignedLayout lay = signed_layout(nu, xhat, eta);
        double u = z.real();
        for (double c : lay.cuts)
            if (u == c)
                throw LozError(ErrCode::PoleHit, "real z on a breakpoint");
        for (size_t i = 0; i + 1 < lay.cuts.size(); ++i) {
            if (u >= lay.cuts[i] && u <= lay.cuts[i + 1] &&
                std::abs(lay.signed_q[i]) > 1e-9)
                throw LozError(ErrCode::PoleHit,
                               "real z inside the signed singular set");
        }
        return g_prime_real(nu, xhat, eta, u);
    }
    return g_prime_cont_complex(nu, xhat, eta, z);
}

SolverCertificate critical_point_discrete(const Signature& t, long long x,
                                          int n) {
    const int N = t.n();
    if (n < 1 || n >= N)
        throw LozError(ErrCode::LevelOutOfRange,
                       "critical point needs a level in 1..N-1", n);
    PoleClasses pc = critical_poles(t, x, n);
    auto f = [pc](Complex z) {
        Complex s(0.0, 0.0);
        for (long long p : pc.plus) s += 1.0 / (z - static_cast<double>(p));
        for (long long p : pc.minus_left) s -= 1.0 / (z - static_cast<double>(p));
        for (long long p : pc.minus_right) s -= 1.0 / (z - static_cast<double>(p));
        return s;
    };
    auto df = [pc](Complex z) {
        Complex s(0.0, 0.0);
        for (long long p : pc.plus) {
            Complex d = z - static_cast<double>(p);
            s -= 1.0 / (d * d);
        }
        for (long long p : pc.minus_left) {
            Complex d = z - static_cast<double>(p);
            s += 1.0 / (d * d);
        }
        for (long long p : pc.minus_right) {
            Complex d = z - static_cast<double>(p);
            s += 1.0 / (d * d);
        }
        return s;
    };
    double tn = static_cast<double>(N);
    double lo_pole = static_cast<double>(std::min(t.entries.back(), x - (N - n)));
    double hi_pole = static_cast<double>(std::max(t.entries.front(), x));
    return certified_upper_root(f, df, lo_pole - tn, hi_pole + tn, 1e-6 * tn,
                                2.0 * tn);
}

SolverCertificate critical_point_continuous(const PiecewiseDensityMeasure& nu,
                                            double xhat, double eta) {
    check_eta(eta);
    SignedLayout lay = signed_layout(nu, xhat, eta);
    if (layout_identically_zero(lay))
        throw LozError(ErrCode::DegenerateIdentical,
                       "window density is identically one; G' vanishes");
    auto f = [&nu, xhat, eta](Complex z) {
        return g_prime_cont_complex(nu, xhat, eta, z);
    };
    auto df = [&nu, xhat, eta](Complex z) {
        return g_second_cont_complex(nu, xhat, eta, z);
    };
    double lo = std::min(nu.support_min(), xhat + eta - 1.0) - 1.0;
    double hi = std::max(nu.support_max(), xhat) + 1.0;
    return certified_upper_root(f, df, lo, hi, 1e-6, 2.0);
}

// ============================================================
// Complex slope and local densities
// ============================================================

std::optional<ComplexSlope> complex_slope(const PiecewiseDensityMeasure& nu,
                                          double xhat, double eta) {
    SolverCertificate cert = critical_point_continuous(nu, xhat, eta);
    if (!cert.has_root) return std::nullopt;
    Complex xi = (cert.root - xhat) / (cert.root - xhat + 1.0 - eta);
    if (!(xi.imag() > 0.0))
        throw LozError(ErrCode::CertificationFailed,
                       "certified root maps to a non-upper slope");
    return ComplexSlope{xi};
}

SlopeTriple densities_from_slope(const ComplexSlope& slope) {
    SlopeTriple d;
    d.p_hor = std::arg(slope.xi) / kPi;
    d.p_down = -std::arg(1.0 - slope.xi) / kPi;
    d.p_up = 1.0 - d.p_hor - d.p_down;
    return d;
}

double incomplete_beta(const ComplexSlope& slope, long long dx, long long dn) {
    double raw = detail::raw_beta_closed_form(slope.xi, dx, dn);
    double gauge = std::pow(std::abs(slope.xi), static_cast<double>(-dx)) *
                   std::pow(std::abs(1.0 - slope.xi), static_cast<double>(-dn));
    return gauge * raw;
}

double predicted_correlation(const ComplexSlope& slope,
                             const std::vector<std::pair<long long, int>>& offsets) {
    const size_t m = offsets.size();
    if (m == 0) return 1.0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            if (offsets[i] == offsets[j])
                throw LozError(ErrCode::ShapeMismatch,
                               "correlation offsets must be distinct",
                               static_cast<long long>(j));
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            a[i][j] = incomplete_beta(slope, offsets[j].first - offsets[i].first,
                                      offsets[j].second - offsets[i].second);
    // LU with partial pivoting
    double det = 1.0;
    for (size_t c = 0; c < m; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < m; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        if (a[c][c] == 0.0) return 0.0;
        det *= a[c][c];
        for (size_t r = c + 1; r < m; ++r) {
            double factor = a[r][c] / a[c][c];
            for (size_t k = c; k < m; ++k) a[r][k] -= factor * a[c][k];
        }
    }
    return det;
}

// ============================================================
// Exponential Stieltjes and R-transform
// ============================================================

Complex exp_stieltjes(const PiecewiseDensityMeasure& mu, Complex z) {
    if (z.imag() == 0.0) {
        double x = z.real();
        for (const auto& p : mu.pieces)
            if (p.q > 0.0 && x >= p.a && x <= p.b)
                throw LozError(ErrCode::OnSupport,
                               "real evaluation point inside the support");
    }
    return std::exp(cauchy_transform(mu, z));
}

Complex r_transform(const PiecewiseDensityMeasure& mu, Complex v) {
    if (v == Complex(1.0, 0.0))
        throw LozError(ErrCode::InversionFailed, "v = 1 is the boundary point");
    const double lo = mu.support_min(), hi = mu.support_max();
    auto near_support = [&](Complex z) {
        return std::abs(z.imag()) < 1e-9 && z.real() > lo - 1e-9 &&
               z.real() < hi + 1e-9;
    };
    // seed on the branch analytic at infinity; relocated off the support
    // hull when the large-|v| heuristic lands inside it
    Complex z = 1.0 / (v - 1.0) + measure_mean(mu);
    if (near_support(z)) {
        double push = std::abs(1.0 / (v - 1.0)) + 0.5;
        z = v.real() >= 1.0 ? Complex(hi + push, 0.0) : Complex(lo - push, 0.0);
    }
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        Complex e;
        try {
            e = exp_stieltjes(mu, z);
        } catch (const LozError&) {
            throw LozError(ErrCode::InversionFailed,
                           "iterate collided with the support");
        }
        Complex dlog = detail::stieltjes_derivative(mu, z);
        Complex de = e * dlog;
        if (std::abs(de) < 1e-300)
            throw LozError(ErrCode::InversionFailed,
                           "derivative vanishes; injectivity not certified");
        Complex step = (e - v) / de;
        Complex znew = z - step;
        for (int back = 0; back < 40 && near_support(znew); ++back) {
            step *= 0.5;
            znew = z - step;
        }
        z = znew;
        if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw LozError(ErrCode::InversionFailed, "Newton did not converge");
    Complex e_final = exp_stieltjes(mu, z);
    if (std::abs(e_final - v) > 1e-12 * std::max(1.0, std::abs(v)))
        throw LozError(ErrCode::InversionFailed,
                       "inversion residual above certification threshold");
    return z - v / (v - 1.0);
}

// ============================================================
// Limit shape
// ============================================================

SlopePoint classify_point(const PiecewiseDensityMeasure& mu, double xhat,
                          double eta) {
    SlopePoint pt;
    SolverCertificate cert;
    try {
        cert = critical_point_continuous(mu, xhat, eta);
    } catch (const LozError& e) {
        if (e.code == ErrCode::DegenerateIdentical) {
            pt.status = PointStatus::kDegenerate;
            return pt;
        }
        throw;
    }
    if (cert.has_root) {
        pt.status = PointStatus::kLiquid;
        pt.xi = (cert.root - xhat) / (cert.root - xhat + 1.0 - eta);
        pt.densities = densities_from_slope(ComplexSlope{pt.xi});
        return pt;
    }
    SignedLayout lay = signed_layout(mu, xhat, eta);
    int roots = count_window_roots(mu, xhat, eta, lay);
    int runs = positive_runs_in_window(lay);
    if (roots == runs + 1) {
        pt.status = PointStatus::kFrozen1;
        pt.densities = SlopeTriple{0.0, 0.0, 1.0};
    } else if (roots == runs - 1) {
        pt.status = PointStatus::kFrozen0;
        pt.densities = SlopeTriple{0.0, 0.0, 0.0};
    } else {
        pt.status = PointStatus::kDegenerate;
    }
    return pt;
}

SlopeField limit_shape(const PiecewiseDensityMeasure& mu,
                       const std::vector<double>& xs,
                       const std::vector<double>& etas) {
    SlopeField field;
    field.xs = xs;
    field.etas = etas;
    field.points.resize(etas.size());
    for (size_t e = 0; e < etas.size(); ++e) {
        field.points[e].resize(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            try {
                field.points[e][i] = classify_point(mu, xs[i], etas[e]);
            } catch (const LozError&) {
                field.points[e][i] = SlopePoint{};  // degenerate
            }
        }
    }
    return field;
}

// ============================================================
// Finite-N asymptotic kernel
// ============================================================

double kernel_finite_N_asymptotic(const Signature& t, long long x1, int n1,
                                  long long x2, int n2,
                                  const AsymptoticThresholds& thresholds) {
    const int N = t.n();
    long long offset = std::llabs(x2 - x1) + std::llabs(static_cast<long long>(n2) - n1);
    if (offset > thresholds.max_offset)
        throw LozError(ErrCode::TooCloseToEdge,
                       "offsets beyond the validity window", offset);
    SolverCertificate cert = critical_point_discrete(t, x1, n1);
    if (!cert.has_root)
        throw LozError(ErrCode::TooCloseToEdge,
                       "no certified complex critical point at the base");
    double im_ratio = cert.root.imag() / static_cast<double>(N);
    double abs_ratio = std::abs(cert.root) / static_cast<double>(N);
    if (im_ratio < thresholds.min_im_ratio || abs_ratio > thresholds.max_abs_ratio)
        throw LozError(ErrCode::TooCloseToEdge,
                       "critical point fails the bulk thresholds");
    Complex xi = (cert.root - static_cast<double>(x1)) /
                 (cert.root - static_cast<double>(x1) + static_cast<double>(N - n1));
    return detail::raw_beta_closed_form(xi, x2 - x1, n2 - n1);
}

// ============================================================
// Consistency residuals
// ============================================================

namespace detail {

double raw_beta_closed_form(Complex xi, long long dx, long long dn) {
    Antiderivative f = build_antiderivative(dx, dn);
    Complex anchor(beta_mid_anchor(dn), 0.0);
    Complex x = eval_antiderivative(f, xi) - eval_antiderivative(f, anchor);
    return x.imag() / kPi;
}

double raw_beta_quadrature(Complex xi, long long dx, long long dn) {
    auto f = [dx, dn](Complex w) { return beta_integrand(w, dx, dn); };
    Complex anchor(beta_mid_anchor(dn), 0.0);
    Complex total = integrate_segment(f, std::conj(xi), anchor) +
                    integrate_segment(f, anchor, xi);
    return total.imag() / (2.0 * kPi);
}

Complex xi_continued(const PiecewiseDensityMeasure& mu, Complex z, double eta) {
    SolverCertificate cert;
    try {
        cert = critical_point_continuous(mu, z.real(), eta);
    } catch (const LozError& e) {
        if (e.code == ErrCode::DegenerateIdentical)
            throw LozError(ErrCode::NotLiquid,
                           "slope undefined on a degenerate window");
        throw;
    }
    if (!cert.has_root)
        throw LozError(ErrCode::NotLiquid,
                       "no complex critical point at the base point");
    Complex tau = cert.root;
    if (z.imag() != 0.0) {
        int steps = std::max(2, static_cast<int>(std::ceil(std::abs(z.imag()) / 0.02)));
        for (int s = 1; s <= steps; ++s) {
            Complex xh(z.real(), z.imag() * s / steps);
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                Complex fv = std::log(tau - xh + (1.0 - eta)) - std::log(tau - xh);
                for (const auto& p : mu.pieces)
                    fv -= p.q * (std::log(tau - p.a) - std::log(tau - p.b));
                Complex dv = 1.0 / (tau - xh + (1.0 - eta)) - 1.0 / (tau - xh);
                for (const auto& p : mu.pieces)
                    dv -= p.q * (1.0 / (tau - p.a) - 1.0 / (tau - p.b));
                Complex step = fv / dv;
                tau -= step;
                if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(tau))) {
                    ok = true;
                    break;
                }
            }
            if (!ok || !(std::isfinite(tau.real()) && std::isfinite(tau.imag())))
                throw LozError(ErrCode::NotLiquid,
                               "continuation to complex z lost the root");
        }
    }
    return (tau - z) / (tau - z + (1.0 - eta));
}

Complex stieltjes_derivative(const PiecewiseDensityMeasure& mu, Complex z) {
    Complex s(0.0, 0.0);
    for (const auto& p : mu.pieces)
        s += p.q * (1.0 / (z - p.a) - 1.0 / (z - p.b));
    return s;
}

}  // namespace detail

double burgers_residual(const PiecewiseDensityMeasure& mu, Complex z,
                        double eta, double h) {
    check_eta(eta);
    Complex xi0 = detail::xi_continued(mu, z, eta);
    Complex xp = detail::xi_continued(mu, z + h, eta);
    Complex xm = detail::xi_continued(mu, z - h, eta);
    Complex ep = detail::xi_continued(mu, z, eta + h);
    Complex em = detail::xi_continued(mu, z, eta - h);
    Complex dz = (xp - xm) / (2.0 * h);
    Complex de = (ep - em) / (2.0 * h);
    return std::abs(((xi0 - 1.0) / xi0) * de - dz);
}

double projection_residual(const PiecewiseDensityMeasure& mu, double eta,
                           const std::vector<Complex>& vgrid, int cells) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw LozError(ErrCode::LevelOutOfRange,
                       "level fraction must lie in (0,1]");
    PiecewiseDensityMeasure shifted = translate_measure(mu, 1.0);
    PiecewiseDensityMeasure swept = shifted;
    if (eta < 1.0) {
        double xlo = mu.support_min() - (1.0 - eta) - 0.25;
        double xhi = mu.support_max() + 0.25;
        std::vector<PiecewiseDensityMeasure::Piece> pieces;
        double mass = 0.0;
        for (int k = 0; k < cells; ++k) {
            double a = xlo + (xhi - xlo) * k / cells;
            double b = xlo + (xhi - xlo) * (k + 1) / cells;
            double mid = 0.5 * (a + b);
            double p;
            try {
                SlopePoint pt = classify_point(mu, mid, eta);
                switch (pt.status) {
                    case PointStatus::kLiquid: p = pt.densities.p_hor; break;
                    case PointStatus::kFrozen1: p = 1.0; break;
                    case PointStatus::kFrozen0: p = 0.0; break;
                    default: p = 0.5; break;
                }
            } catch (const LozError&) {
                p = 0.5;
            }
            if (p <= 1e-12) continue;
            // particle coordinates: x = xhat/eta + 1
            double va = a / eta + 1.0, vb = b / eta + 1.0;
            pieces.push_back({va, vb, p});
            mass += p * (vb - va);
        }
        if (pieces.empty() || mass <= 0.0)
            throw LozError(ErrCode::NotLiquid,
                           "reconstructed level measure is empty");
        for (auto& p : pieces) p.q /= mass;
        swept = PiecewiseDensityMeasure::unchecked(std::move(pieces));
    }
    double worst = 0.0;
    for (Complex v : vgrid) {
        Complex lhs = r_transform(swept, v);
        Complex rhs = r_transform(shifted, v) / eta;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace loz
