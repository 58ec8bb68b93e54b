// Monte-Carlo verification harness: empirical local correlations against
// predicted bulk determinants, and law-of-large-numbers density fields
// against the limit shape.  Everything here is driven by seeded streams so
// reports are bitwise reproducible given (master seed, config), independent
// of the worker count.
#pragma once

#include "loz/asymptotics.hpp"
#include "loz/core.hpp"
#include "loz/sampler.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace loz {

// ============================================================
// Observation windows
// ============================================================

/*
 * A bulk observation window.  The reference point scales with N as
 *
 *   x0(N) = floor(x_frac * N) + x_shift,
 *   n0(N) = floor(eta_frac * N) + n_shift,
 *
 * while the integer offsets (dx, dn) stay fixed, so one spec describes a
 * sequence of windows converging to the scaled location (x_frac, eta_frac).
 * Offsets must be distinct and every resulting level n0 + dn must satisfy
 * 1 <= n < N.
 */
struct WindowSpec {
    std::string id;
    double x_frac = 0.0;
    long long x_shift = 0;
    double eta_frac = 0.5;
    long long n_shift = 0;
    std::vector<std::pair<long long, int>> offsets = {{0, 0}};
};

// Quantized reference point at a concrete N; the rounding residues record
// how far floor() moved the anchor off the exact fractions.
struct ResolvedWindow {
    long long x0 = 0;
    int n0 = 0;
    double x_round = 0.0;    // x_frac * N - floor(x_frac * N)
    double eta_round = 0.0;  // eta_frac * N - floor(eta_frac * N)
};

// Validates the offsets (distinct, all levels in [1, N-1]) and quantizes the
// anchor.  Throws ShapeMismatch on duplicate offsets, LevelOutOfRange when a
// level leaves the open strip.
ResolvedWindow resolve_window(const WindowSpec& w, int N);

// ============================================================
// Correlation reports
// ============================================================

struct CorrelationEntry {
    std::string window_id;
    std::vector<std::pair<long long, int>> offsets;
    double empirical = 0.0;
    double stderr_val = 0.0;  // sqrt(p(1-p)/M) for the indicator product
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double zscore = std::numeric_limits<double>::quiet_NaN();
    bool flagged = false;  // predicted outside [-1e-10, 1+1e-10]
};

struct CorrelationReport {
    int N = 0;
    std::uint64_t M = 0;
    std::uint64_t seed = 0;
    std::string source_id;       // signature or profile tag
    std::string sampler;         // "exact" | "cftp" | "glauber"
    std::uint64_t sweeps = 0;    // recorded glauber budget, 0 otherwise
    std::string note;            // acceptance-gate remark (Bonferroni)
    std::vector<CorrelationEntry> entries;
};

// Sampler choice per width: exact sequential while the budget allows it,
// coupling from the past in the middle range, Glauber with a recorded sweep
// budget beyond.
enum class SamplerKind { kExact, kCftp, kGlauber };
SamplerKind sampler_for(int N);
GTPattern draw_sample(const Signature& t, SeededStream stream, SamplerKind kind,
                      std::uint64_t sweeps);

/*
 * Unbiased frequency estimates of the joint horizontal-lozenge indicators
 * over M independent samples.  Sample k consumes the stream (seed, k) only,
 * so the estimate is a pure function of (t, windows, M, seed): workers own
 * disjoint stream indices and the integer tallies are merged afterwards,
 * which makes the report identical for every thread count.  Entries carry
 * empirical value and standard error; predictions stay NaN here.
 */
CorrelationReport estimate_correlations(const Signature& t,
                                        const std::vector<WindowSpec>& windows,
                                        std::uint64_t M, std::uint64_t seed,
                                        int threads = 1);

/*
 * Bulk-universality study: for each N the profile is quantized, M samples
 * are drawn, and the empirical window frequencies are matched against the
 * determinantal prediction at the continuum anchor (x_frac, eta_frac) of
 * each window.  Throws NotLiquid when the slope is undefined at an anchor.
 * Per-N master seeds are decorrelated by hashing N into the base seed.
 */
std::vector<CorrelationReport> bulk_report(const PiecewiseDensityMeasure& profile,
                                           const std::vector<int>& Ns,
                                           const std::vector<WindowSpec>& windows,
                                           std::uint64_t M, std::uint64_t seed,
                                           int threads = 1);

// ============================================================
// Law-of-large-numbers density fields
// ============================================================

/*
 * One grid cell of the density comparison.  Each lattice site is a
 * (column, strip) pair owning exactly one lozenge; empirical per-type
 * frequencies over the cell's sites are compared against the limit-shape
 * prediction averaged over the same sites, so discretization bias affects
 * both sides equally.  Horizontal densities are always compared; up/down
 * only when every site in the cell carries a certified up/down prediction
 * (liquid or fully packed), because an empty-region classification pins the
 * horizontal density alone.
 */
struct LlnCell {
    double x_lo = 0.0, x_hi = 0.0;
    double eta_lo = 0.0, eta_hi = 0.0;
    long long sites = 0;
    double emp_hor = 0.0, emp_up = 0.0, emp_down = 0.0;
    double pred_hor = 0.0, pred_up = 0.0, pred_down = 0.0;
    bool compare_ud = false;
    double dev = 0.0;  // |emp-pred| over the compared components
};

struct LlnReport {
    int N = 0;
    std::uint64_t M = 0;
    std::uint64_t seed = 0;
    std::string sampler;
    std::uint64_t sweeps = 0;
    long long degenerate_sites = 0;  // classification fell back to 1/2
    std::vector<LlnCell> cells;
    double max_abs_dev = 0.0;
};

// Density-field comparison on an nx-by-neta grid covering the scaled
// trapezoid, one report per N.  Top-strip sites (level N) are boundary data
// fixed by the signature and are excluded.
std::vector<LlnReport> lln_report(const PiecewiseDensityMeasure& profile,
                                  const std::vector<int>& Ns, std::uint64_t M,
                                  std::uint64_t seed, int nx, int neta,
                                  int threads = 1);

// ============================================================
// Serialization
// ============================================================

// CSV with columns N, M, window_id, offsets, empirical, stderr, predicted,
// zscore; offsets packed as "dx:dn;dx:dn".
std::string report_csv(const std::vector<CorrelationReport>& reports);

// JSON array of report objects with full metadata and entries.
std::string report_json(const std::vector<CorrelationReport>& reports);

std::string lln_csv(const std::vector<LlnReport>& reports);
std::string lln_json(const std::vector<LlnReport>& reports);

}  // namespace loz
