// End-to-end acceptance gates for the whole library, one criterion per
// line of output.  Each criterion is self-contained, pins its tolerances
// in code, and reports PASS or FAIL together with the measured values the
// gate looked at.  The process exit status is the number of failed
// criteria, so ctest can run them individually via --only.
//
// The gates fall into three families: exact oracle equivalences (rational
// kernel determinants against enumeration, traces, counting), statistical
// gates on seeded Monte-Carlo runs (chi-square, four-sigma z-scores with
// a recorded finite-size bias term), and deterministic numerical trends
// (asymptotic kernel error decay, dual-route quadrature agreement,
// residue and PDE self-consistency checks).

#include "loz/asymptotics.hpp"
#include "loz/bigint.hpp"
#include "loz/core.hpp"
#include "loz/counting.hpp"
#include "loz/errors.hpp"
#include "loz/kernel.hpp"
#include "loz/poly.hpp"
#include "loz/prng.hpp"
#include "loz/sampler.hpp"
#include "loz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

using namespace loz;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

#if defined(__GNUC__)
__attribute__((format(printf, 1, 2)))
#endif
std::string
strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return std::string(buf);
}

Signature sig(std::vector<long long> v) { return Signature{std::move(v)}; }

Signature hexagon_sig(int m) {
    std::vector<long long> v;
    for (int j = 1; j <= 2 * m; ++j) v.push_back(j <= m ? m - j : -j);
    return sig(std::move(v));
}

PiecewiseDensityMeasure hexagon_measure() {
    return PiecewiseDensityMeasure::checked(
        {{-1.0, -0.5, 1.0}, {0.0, 0.5, 1.0}});
}

// Strictly decreasing signature with N distinct entries in [-span, span].
Signature random_sig(PhiloxRng& g, int N, long long span) {
    std::set<long long> seen;
    while ((int)seen.size() < N)
        seen.insert((long long)g.next_below(2 * span + 1) - span);
    std::vector<long long> v(seen.rbegin(), seen.rend());
    return sig(std::move(v));
}

// Distinct query points with levels inside the open strip and columns
// roaming one step past the support on both sides.
std::vector<std::pair<long long, int>> random_points(PhiloxRng& g,
                                                     const Signature& t,
                                                     int count) {
    const int N = t.n();
    const long long lo = t[N - 1] - 1, hi = t[0] + 1;
    std::set<std::pair<long long, int>> pts;
    while ((int)pts.size() < count)
        pts.insert({lo + (long long)g.next_below(hi - lo + 1),
                    1 + (int)g.next_below(N - 1)});
    return {pts.begin(), pts.end()};
}

// ------------------------------------------------------------
// criterion 1: rational kernel determinants match enumeration
// ------------------------------------------------------------

Outcome criterion_1() {
    PhiloxRng g({0xAC01, 0}, kTagWord);
    const int kCases = 200;
    int done = 0;
    while (done < kCases) {
        int N = 2 + (int)g.next_below(3);
        Signature t = random_sig(g, N, 8);
        if (gt_dimension(t) > 10000) continue;
        KernelQuery q{t, random_points(g, t, 1 + (int)g.next_below(3))};
        BigRat det = correlation(q);
        BigRat brute = correlation_bruteforce(q);
        if (det != brute)
            return {false, strf("case %d disagrees on N=%d", done, N)};
        ++done;
    }
    return {true, strf("%d random queries, determinant equals enumeration "
                       "exactly", kCases)};
}

// ------------------------------------------------------------
// criterion 2: pattern counting against enumeration
// ------------------------------------------------------------

Outcome criterion_2() {
    PhiloxRng g({0xAC02, 0}, kTagWord);
    std::vector<long long> packed;
    for (int j = 1; j <= 5; ++j) packed.push_back(-j);
    if (gt_dimension(sig(std::move(packed))) != 1)
        return {false, "packed signature does not count to one"};
    if (gt_dimension(sig({4, 2, 0})) != 8)
        return {false, "three-row staircase does not count to eight"};
    const int kCases = 200;
    int done = 0;
    while (done < kCases) {
        int N = 2 + (int)g.next_below(3);
        Signature t = random_sig(g, N, 8);
        BigInt dim = gt_dimension(t);
        if (dim > 10000) continue;
        if (dim != BigInt((long long)all_patterns(t).size()))
            return {false, strf("case %d dimension mismatch", done)};
        ++done;
    }
    return {true, strf("%d random signatures, product formula equals "
                       "enumeration; pinned counts 1 and 8 hold", kCases)};
}

// ------------------------------------------------------------
// criterion 3: exact and coupled samplers are both uniform
// ------------------------------------------------------------

Outcome criterion_3() {
    const Signature t = sig({4, 2, 0});
    const std::vector<GTPattern> cells = all_patterns(t);
    const std::uint64_t M = 100000;
    const double expected = (double)M / (double)cells.size();
    // 0.999 quantile of chi-square with 7 degrees of freedom
    const double kChiGate = 24.3219;

    auto index_of = [&](const GTPattern& p) {
        for (size_t i = 0; i < cells.size(); ++i)
            if (cells[i].rows == p.rows) return (int)i;
        return -1;
    };
    std::vector<long long> ne(cells.size(), 0), nc(cells.size(), 0);
    for (std::uint64_t k = 0; k < M; ++k) {
        int ie = index_of(sample_exact(t, SeededStream{0xAC03E, k}));
        int ic = index_of(sample_cftp(t, SeededStream{0xAC03C, k}));
        if (ie < 0 || ic < 0) return {false, "sampler produced a foreign pattern"};
        ++ne[ie];
        ++nc[ic];
    }
    double chi_e = 0, chi_c = 0, zmax = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        chi_e += (ne[i] - expected) * (ne[i] - expected) / expected;
        chi_c += (nc[i] - expected) * (nc[i] - expected) / expected;
        double pbar = (double)(ne[i] + nc[i]) / (2.0 * M);
        double se = std::sqrt(pbar * (1 - pbar) * 2.0 / M);
        double z = std::fabs((double)(ne[i] - nc[i])) / (M * se);
        zmax = std::max(zmax, z);
    }
    bool ok = chi_e < kChiGate && chi_c < kChiGate && zmax <= 4.0;
    return {ok, strf("chi-square %.2f and %.2f against gate %.4f, "
                     "largest pairwise z %.2f of 4",
                     chi_e, chi_c, kChiGate, zmax)};
}

// ------------------------------------------------------------
// criterion 4: kernel trace counts the particles on each level
// ------------------------------------------------------------

Outcome criterion_4() {
    PhiloxRng g({0xAC04, 0}, kTagWord);
    std::vector<Signature> corpus;
    for (int N = 2; N <= 6; ++N) {
        std::vector<long long> packed, spread;
        for (int j = 1; j <= N; ++j) packed.push_back(-j);
        for (int j = 0; j < N; ++j) spread.push_back(2 * (N - 1 - j));
        corpus.push_back(sig(std::move(packed)));
        corpus.push_back(sig(std::move(spread)));
        for (int r = 0; r < 2; ++r) corpus.push_back(random_sig(g, N, 7));
    }
    corpus.push_back(hexagon_sig(2));
    corpus.push_back(hexagon_sig(3));
    int traces = 0;
    for (const Signature& t : corpus) {
        const int N = t.n();
        for (int n = 1; n < N; ++n) {
            BigRat sum(0);
            for (long long x = t[N - 1]; x <= t[0]; ++x)
                sum += kernel_exact(t, x, n, x, n);
            if (sum != BigRat(n))
                return {false, strf("trace defect at level %d of N=%d", n, N)};
            if (kernel_exact(t, t[N - 1] - 1, n, t[N - 1] - 1, n) != BigRat(0) ||
                kernel_exact(t, t[0] + 1, n, t[0] + 1, n) != BigRat(0))
                return {false, strf("density leaks outside the support, "
                                    "level %d of N=%d", n, N)};
            ++traces;
        }
    }
    return {true, strf("%d level traces equal their level exactly, "
                       "zero density outside the support", traces)};
}

// ------------------------------------------------------------
// criterion 5: root structure of the cleared critical equation
// ------------------------------------------------------------

Outcome criterion_5() {
    PhiloxRng g({0xAC05, 0}, kTagWord);
    int liquid = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        int N = 2 + (int)g.next_below(29);
        Signature t = random_sig(g, N, N + 8);
        long long x = t[N - 1] - 2 +
                      (long long)g.next_below(t[0] - t[N - 1] + 5);
        int n = 1 + (int)g.next_below(N - 1);
        RootStructure rs = analyze_critical_polynomial(t, x, n);
        if (rs.nonreal != 0 && rs.nonreal != 2)
            return {false, strf("case %d has %d non-real roots", rep,
                                rs.nonreal)};
        PoleClasses pc = critical_poles(t, x, n);
        int poles = (int)(pc.plus.size() + pc.minus_left.size() +
                          pc.minus_right.size());
        if ((int)rs.isolated.size() < poles - 3)
            return {false, strf("case %d isolates %d of %d required roots",
                                rep, (int)rs.isolated.size(), poles - 3)};
        liquid += rs.nonreal == 2;
    }
    return {true, strf("1000 random critical polynomials: non-real root "
                       "count always 0 or 2 (%d liquid), isolation bound "
                       "met", liquid)};
}

// ------------------------------------------------------------
// criterion 6: slope solver at the symmetric center
// ------------------------------------------------------------

Outcome criterion_6() {
    auto slope = complex_slope(hexagon_measure(), 0.0, 0.5);
    if (!slope) return {false, "center of the hexagon classified frozen"};
    SlopeTriple d = densities_from_slope(*slope);
    const Complex xi_sym = std::polar(1.0, std::acos(-1.0) / 3.0);
    double ddev = std::max({std::fabs(d.p_hor - 1.0 / 3.0),
                            std::fabs(d.p_up - 1.0 / 3.0),
                            std::fabs(d.p_down - 1.0 / 3.0)});
    double xdev = std::abs(slope->xi - xi_sym);
    bool ok = ddev <= 1e-6 && xdev <= 1e-6;
    return {ok, strf("densities off balance by %.2e, slope off the unit "
                     "sixth root by %.2e (gates 1e-6)", ddev, xdev)};
}

// ------------------------------------------------------------
// criterion 7: sampled bulk statistics against the predictions
// ------------------------------------------------------------

Outcome criterion_7() {
    const auto mu = hexagon_measure();
    std::vector<WindowSpec> windows;
    windows.push_back({"pt", 0.0, 0, 0.5, 0, {{0, 0}}});
    windows.push_back({"pair1", 0.0, 0, 0.5, 0, {{0, 0}, {1, 0}}});
    windows.push_back({"pair2", 0.0, 0, 0.5, 0, {{0, 0}, {2, 0}}});
    windows.push_back({"pair3", 0.0, 0, 0.5, 0, {{0, 0}, {3, 0}}});
    const std::uint64_t M = 50000;
    int threads = (int)std::max(1u, std::thread::hardware_concurrency());
    auto reports = bulk_report(mu, {24, 48}, windows, M, 0xC7ACCE5Dull,
                               threads);
    for (const auto& r : reports) {
        if (r.sampler != "exact")
            return {false, strf("N=%d fell back to the %s sampler", r.N,
                                r.sampler.c_str())};
        // the sine-kernel determinant at one-third density, pinned in
        // closed form: det = 1/9 - (sin(pi dx / 3) / (pi dx))^2
        const double pi = std::acos(-1.0);
        for (int dx = 1; dx <= 3; ++dx) {
            double s = std::sin(pi * dx / 3.0) / (pi * dx);
            double want = 1.0 / 9.0 - s * s;
            const auto& e = r.entries[dx];
            if (std::fabs(e.predicted - want) > 1e-9)
                return {false, strf("predicted pair determinant drifts "
                                    "from the sine form at dx=%d", dx)};
        }
        if (std::fabs(r.entries[0].predicted - 1.0 / 3.0) > 1e-9)
            return {false, "predicted center density is not one third"};
    }
    const auto& e24 = reports[0].entries[0];
    const auto& e48 = reports[1].entries[0];
    // one-parameter c/N bias model: the N=24 deviation from the limit
    // predicts half of itself at N=48; the gate tests the corrected value
    double bias48 = (e24.empirical - 1.0 / 3.0) / 2.0;
    double resid = std::fabs(e48.empirical - 1.0 / 3.0 - bias48);
    double sc = std::sqrt(e48.stderr_val * e48.stderr_val +
                          e24.stderr_val * e24.stderr_val / 4.0);
    double zpair = 0;
    for (int dx = 1; dx <= 3; ++dx)
        zpair = std::max(zpair, std::fabs(reports[1].entries[dx].zscore));
    bool ok = resid <= 4 * sc && zpair <= 4.0;
    return {ok, strf("center density corrected by bias %.1e sits %.1e from "
                     "one third (gate %.1e), pair determinants worst "
                     "|z| %.2f of 4",
                     bias48, resid, 4 * sc, zpair)};
}

// ------------------------------------------------------------
// criterion 8: finite-width kernel error decays along N
// ------------------------------------------------------------

Outcome criterion_8() {
    // ten offsets around the hexagon center; the same-level column at
    // dx=+3 is excluded deliberately: its signed error crosses zero near
    // m=12, so its magnitude is not monotone at desk scale
    const std::vector<std::pair<long long, int>> offs = {
        {0, 0}, {1, 0}, {-1, 0}, {2, 0}, {-2, 0},
        {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}};
    const double kSlack = 1e-3;
    double worst_rise = -1e9;
    for (const auto& off : offs) {
        double prev = 0;
        for (int m : {12, 24, 48}) {
            Signature t = hexagon_sig(m);
            double a = kernel_finite_N_asymptotic(t, 0, m, off.first,
                                                  m + off.second);
            double e = (double)kernel_exact(t, 0, m, off.first,
                                            m + off.second);
            double err = std::fabs(a - e);
            if (m > 12) {
                worst_rise = std::max(worst_rise, err - prev);
                if (err > prev + kSlack)
                    return {false,
                            strf("error grows by %.2e at offset (%+lld,%+d) "
                                 "entering width %d",
                                 err - prev, off.first, off.second, 2 * m)};
            }
            prev = err;
        }
    }
    return {true, strf("asymptotic kernel error non-increasing over widths "
                       "24, 48, 96 at 10 offsets; worst step %+.1e against "
                       "slack %.0e", worst_rise, kSlack)};
}

// ------------------------------------------------------------
// criterion 9: internal consistency of the asymptotic machinery
// ------------------------------------------------------------

Outcome criterion_9() {
    // dual-route agreement of the incomplete Beta integral
    double beta_worst = 0;
    for (double r : {0.55, 0.8, 1.0, 1.3})
        for (double a : {0.35, 0.8, 1.4, 2.1, 2.8})
            for (long long dx = -3; dx <= 3; ++dx)
                for (long long dn = -3; dn <= 3; ++dn) {
                    Complex xi = std::polar(r, a);
                    double diff =
                        std::fabs(detail::raw_beta_closed_form(xi, dx, dn) -
                                  detail::raw_beta_quadrature(xi, dx, dn));
                    beta_worst = std::max(beta_worst, diff);
                }
    if (beta_worst > 1e-10)
        return {false, strf("quadrature and antiderivative disagree by "
                            "%.2e", beta_worst)};

    // complex Burgers equation at twenty liquid points
    const auto mu = hexagon_measure();
    double burgers_worst = 0;
    for (double eta : {0.3, 0.4, 0.5, 0.6, 0.7}) {
        const double c = (0.5 - eta) / 2;
        const double hw = std::sqrt(3 * eta * (1 - eta)) / 2;
        for (double f : {-0.6, -0.2, 0.2, 0.6})
            burgers_worst = std::max(
                burgers_worst,
                burgers_residual(mu, Complex(c + f * hw, 0.0), eta));
    }
    if (burgers_worst > 1e-6)
        return {false, strf("transport defect %.2e at a liquid point",
                            burgers_worst)};

    // swept-measure projection at half height
    double proj = projection_residual(
        mu, 0.5, {Complex(1.05, 0), Complex(1.2, 0), Complex(1.5, 0.3),
                  Complex(2.5, 0)});
    if (proj > 1e-4)
        return {false, strf("projection residual %.2e at half height", proj)};

    // the boundary term of the two-term kernel split equals the residue
    // of the integral term at the base column: a circle of half the pole
    // gap turns the Laurent coefficient into a plain binomial
    PhiloxRng g({0xAC09, 0}, kTagWord);
    const double pi = std::acos(-1.0);
    double res_worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        long long p = (long long)g.next_below(6);
        long long m = 1 + (long long)g.next_below(5);
        double eta = 0.3 + 0.5 * g.next_unit();
        double rho = (1.0 - eta) / 2.0;
        const int K = 1024;
        Complex acc(0, 0);
        for (int k = 0; k < K; ++k) {
            Complex e = std::polar(1.0, 2 * pi * k / K);
            Complex du = rho * e;
            acc += std::pow(du, (double)(-p - 1)) *
                   std::pow(du + (1.0 - eta), (double)(m + p - 1)) * du;
        }
        double got = std::pow(1.0 - eta, 1.0 - (double)m) *
                     (acc / (double)K).real();
        double want = 1.0;
        for (long long j = 1; j <= p; ++j)
            want *= (double)(m - 1 + j) / (double)j;
        res_worst = std::max(res_worst, std::fabs(got / want - 1.0));
    }
    bool ok = res_worst <= 1e-10;
    return {ok, strf("dual Beta %.1e, Burgers %.1e, projection %.1e, "
                     "residue against binomial %.1e (gates 1e-10, 1e-6, "
                     "1e-4, 1e-10)",
                     beta_worst, burgers_worst, proj, res_worst)};
}

// ------------------------------------------------------------
// criterion 10: random words, their shapes and their stability
// ------------------------------------------------------------

// Shape of the semistandard insertion tableau of a word: each letter
// bumps the leftmost strictly larger entry of its row downwards.
std::vector<int> rsk_shape(const std::vector<int>& word, int rows) {
    std::vector<std::vector<int>> tab(rows);
    for (int x : word) {
        int cur = x;
        for (auto& row : tab) {
            auto it = std::upper_bound(row.begin(), row.end(), cur);
            if (it == row.end()) {
                row.push_back(cur);
                cur = -1;
                break;
            }
            std::swap(*it, cur);
        }
        if (cur != -1) return {};  // word deeper than the row budget
    }
    std::vector<int> shape;
    for (auto& row : tab) shape.push_back((int)row.size());
    return shape;
}

Outcome criterion_10() {
    // exhaustive two-letter enumeration over a three-letter alphabet
    int one_row = 0, total = 0;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
            std::vector<int> shape = rsk_shape({a, b}, 3);
            one_row += shape[0] == 2;
            ++total;
        }
    if (total != 9 || one_row != 6)
        return {false, "exhaustive insertion does not give 6 of 9"};

    const std::uint64_t M = 100000;
    long long hits = 0;
    for (std::uint64_t k = 0; k < M; ++k) {
        Signature t = sample_schur_weyl(3, 2, SeededStream{0xAC0A, k});
        if (t[0] == 1)
            ++hits;  // one-row shape; the two-row shape starts at 0
        else if (t[0] != 0)
            return {false, "sampled shape is neither of the two"};
    }
    double freq = (double)hits / (double)M;
    double se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / (double)M);
    double z = std::fabs(freq - 2.0 / 3.0) / se;
    if (z > 4.0)
        return {false, strf("one-row frequency %.4f is %.1f sigma from "
                            "two thirds", freq, z)};

    // two independent long-word runs must agree on the rescaled top row
    const int N = 40;
    const long long n = (long long)N * N;
    const std::uint64_t runs = 200;
    auto aggregate = [&](std::uint64_t seed) {
        EmpiricalMeasure em;
        for (std::uint64_t k = 0; k < runs; ++k) {
            Signature t = sample_schur_weyl(N, n, SeededStream{seed, k});
            for (int i = 0; i < N; ++i)
                em.atoms.push_back({(double)t[i] / N, 1.0 / (N * runs)});
        }
        std::sort(em.atoms.begin(), em.atoms.end());
        return em;
    };
    double ks = kolmogorov_distance(aggregate(0xA1FA), aggregate(0xB1FB));
    bool ok = ks < 0.05;
    return {ok, strf("one-row shape frequency %.4f (z %.2f of 4), seed "
                     "stability distance %.4f of 0.05", freq, z, ks)};
}

Outcome guarded(Outcome (*fn)()) {
    try {
        return fn();
    } catch (const LozError& e) {
        return {false, strf("raised %s: %s", err_name(e.code), e.what())};
    } catch (const std::exception& e) {
        return {false, strf("raised: %s", e.what())};
    }
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only K]\n");
            return 2;
        }
    }
    Outcome (*criteria[])() = {criterion_1, criterion_2, criterion_3,
                               criterion_4, criterion_5, criterion_6,
                               criterion_7, criterion_8, criterion_9,
                               criterion_10};
    int failures = 0;
    for (int k = 1; k <= 10; ++k) {
        if (only && k != only) continue;
        Outcome o = guarded(criteria[k - 1]);
        std::printf("%s criterion %d: %s\n", o.ok ? "PASS" : "FAIL", k,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += !o.ok;
    }
    return failures;
}
