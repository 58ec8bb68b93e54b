#include "loz/verify.hpp"

#include "loz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <thread>

#include "json.hpp"

namespace loz {
namespace {

/*
 * Per-study seeds are decorrelated with a splitmix64 round, so that the
 * sample at stream index k of the N=24 study shares no randomness with
 * stream k of the N=48 study even under one master seed.
 */
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

bool occupied(const GTPattern& p, long long x, int n) {
    const auto& row = p.rows[static_cast<std::size_t>(n - 1)];
    auto it = std::lower_bound(row.begin(), row.end(), x, std::greater<>());
    return it != row.end() && *it == x;
}

std::string sampler_name(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::kExact: return "exact";
        case SamplerKind::kCftp: return "cftp";
        default: return "glauber";
    }
}

std::string signature_id(const Signature& t) {
    std::string out = "sig(N=" + std::to_string(t.n());
    if (t.n() <= 12) {
        out += ":";
        for (int i = 0; i < t.n(); ++i)
            out += (i ? "," : "") + std::to_string(t[i]);
    }
    return out + ")";
}

std::string profile_id(const PiecewiseDensityMeasure& mu) {
    char buf[64];
    std::string out = "measure(";
    for (std::size_t i = 0; i < mu.pieces.size(); ++i) {
        const auto& p = mu.pieces[i];
        std::snprintf(buf, sizeof buf, "%s[%g,%g]q=%g", i ? "|" : "", p.a, p.b,
                      p.q);
        out += buf;
    }
    return out + ")";
}

std::string bonferroni_note(std::size_t windows) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gate |z| <= 4 per window; family-wise false-alarm rate over "
                  "%zu windows <= %.3g (Bonferroni)",
                  windows, 6.3342e-5 * static_cast<double>(windows));
    return buf;
}

int clamp_threads(int threads, std::uint64_t M) {
    if (threads < 1) threads = 1;
    if (static_cast<std::uint64_t>(threads) > M)
        threads = static_cast<int>(M);
    if (threads > 256) threads = 256;
    return threads;
}

// Deterministic partition of stream indices k in [0, M) among workers; the
// merged tallies are integer sums, identical for every worker count.
void run_workers(int threads, std::uint64_t M,
                 const std::function<void(int, std::uint64_t)>& body) {
    if (threads == 1) {
        for (std::uint64_t k = 0; k < M; ++k) body(0, k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::uint64_t k = static_cast<std::uint64_t>(w); k < M;
                 k += static_cast<std::uint64_t>(threads))
                body(w, k);
        });
    for (auto& th : pool) th.join();
}

double safe_div(double num, double den) {
    return den == 0.0 ? 0.0 : num / den;
}

char const* format_double(char* buf, std::size_t cap, double v) {
    std::snprintf(buf, cap, "%.12g", v);
    return buf;
}

}  // namespace

// ============================================================
// Windows
// ============================================================

ResolvedWindow resolve_window(const WindowSpec& w, int N) {
    if (w.offsets.empty())
        throw LozError(ErrCode::ShapeMismatch, "window has no offsets");
    std::set<std::pair<long long, int>> seen(w.offsets.begin(),
                                             w.offsets.end());
    if (seen.size() != w.offsets.size())
        throw LozError(ErrCode::ShapeMismatch,
                       "window offsets must be distinct");
    ResolvedWindow r;
    const double xf = w.x_frac * N;
    const double ef = w.eta_frac * N;
    r.x0 = static_cast<long long>(std::floor(xf)) + w.x_shift;
    r.n0 = static_cast<int>(std::floor(ef) + w.n_shift);
    r.x_round = xf - std::floor(xf);
    r.eta_round = ef - std::floor(ef);
    for (const auto& [dx, dn] : w.offsets) {
        const long long level = r.n0 + dn;
        if (level < 1 || level >= N)
            throw LozError(ErrCode::LevelOutOfRange,
                           "window level outside [1, N-1]", level);
    }
    return r;
}

// ============================================================
// Sampling
// ============================================================

SamplerKind sampler_for(int N) {
    if (N <= kExactSamplerBudget) return SamplerKind::kExact;
    if (N <= 150) return SamplerKind::kCftp;
    return SamplerKind::kGlauber;
}

GTPattern draw_sample(const Signature& t, SeededStream stream,
                      SamplerKind kind, std::uint64_t sweeps) {
    switch (kind) {
        case SamplerKind::kExact: return sample_exact(t, stream);
        case SamplerKind::kCftp: return sample_cftp(t, stream);
        default: return sample_glauber(t, sweeps, stream);
    }
}

// ============================================================
// Correlation estimation
// ============================================================

CorrelationReport estimate_correlations(const Signature& t,
                                        const std::vector<WindowSpec>& windows,
                                        std::uint64_t M, std::uint64_t seed,
                                        int threads) {
    if (M < 1)
        throw LozError(ErrCode::ShapeMismatch, "sample count must be >= 1");
    if (windows.empty())
        throw LozError(ErrCode::ShapeMismatch, "no windows given");
    const int N = t.n();
    const SamplerKind kind = sampler_for(N);
    const std::uint64_t sweeps =
        kind == SamplerKind::kGlauber ? default_glauber_sweeps(N) : 0;

    // absolute probe positions per window at this N
    std::vector<std::vector<std::pair<long long, int>>> abs(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const ResolvedWindow r = resolve_window(windows[i], N);
        abs[i].reserve(windows[i].offsets.size());
        for (const auto& [dx, dn] : windows[i].offsets)
            abs[i].emplace_back(r.x0 + dx, r.n0 + dn);
    }

    const int W = clamp_threads(threads, M);
    std::vector<std::vector<std::uint64_t>> tallies(
        static_cast<std::size_t>(W),
        std::vector<std::uint64_t>(windows.size(), 0));
    run_workers(W, M, [&](int w, std::uint64_t k) {
        const GTPattern p = draw_sample(t, SeededStream{seed, k}, kind, sweeps);
        auto& mine = tallies[static_cast<std::size_t>(w)];
        for (std::size_t i = 0; i < abs.size(); ++i) {
            bool all = true;
            for (const auto& [x, n] : abs[i])
                if (!occupied(p, x, static_cast<int>(n))) {
                    all = false;
                    break;
                }
            if (all) ++mine[i];
        }
    });

    CorrelationReport rep;
    rep.N = N;
    rep.M = M;
    rep.seed = seed;
    rep.source_id = signature_id(t);
    rep.sampler = sampler_name(kind);
    rep.sweeps = sweeps;
    rep.note = bonferroni_note(windows.size());
    rep.entries.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        std::uint64_t cnt = 0;
        for (int w = 0; w < W; ++w)
            cnt += tallies[static_cast<std::size_t>(w)][i];
        CorrelationEntry e;
        e.window_id = windows[i].id.empty() ? "w" + std::to_string(i)
                                            : windows[i].id;
        e.offsets = windows[i].offsets;
        e.empirical =
            static_cast<double>(cnt) / static_cast<double>(M);
        e.stderr_val =
            std::sqrt(e.empirical * (1.0 - e.empirical) /
                      static_cast<double>(M));
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::vector<CorrelationReport> bulk_report(
    const PiecewiseDensityMeasure& profile, const std::vector<int>& Ns,
    const std::vector<WindowSpec>& windows, std::uint64_t M,
    std::uint64_t seed, int threads) {
    if (Ns.empty())
        throw LozError(ErrCode::ShapeMismatch, "no widths given");

    // Predictions live at the continuum anchor of each window; the offsets
    // stay fixed while the reference point scales, so one determinant serves
    // every N in the study.
    std::vector<double> predicted(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto slope =
            complex_slope(profile, windows[i].x_frac, windows[i].eta_frac);
        if (!slope)
            throw LozError(ErrCode::NotLiquid,
                           "window anchor is outside the liquid region");
        predicted[i] = predicted_correlation(*slope, windows[i].offsets);
    }

    std::vector<CorrelationReport> out;
    out.reserve(Ns.size());
    for (const int N : Ns) {
        const Signature t = quantize_profile(profile, N);
        CorrelationReport rep = estimate_correlations(
            t, windows, M, mix_seed(seed, static_cast<std::uint64_t>(N)),
            threads);
        rep.source_id = profile_id(profile);
        for (std::size_t i = 0; i < rep.entries.size(); ++i) {
            auto& e = rep.entries[i];
            e.predicted = predicted[i];
            e.flagged = predicted[i] < -1e-10 || predicted[i] > 1.0 + 1e-10;
            const double diff = e.empirical - e.predicted;
            if (e.stderr_val > 0.0)
                e.zscore = diff / e.stderr_val;
            else
                e.zscore = diff == 0.0
                               ? 0.0
                               : std::copysign(
                                     std::numeric_limits<double>::infinity(),
                                     diff);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

// ============================================================
// LLN density fields
// ============================================================

std::vector<LlnReport> lln_report(const PiecewiseDensityMeasure& profile,
                                  const std::vector<int>& Ns, std::uint64_t M,
                                  std::uint64_t seed, int nx, int neta,
                                  int threads) {
    if (Ns.empty() || nx < 1 || neta < 1 || M < 1)
        throw LozError(ErrCode::ShapeMismatch, "bad lln grid or sample count");

    std::vector<LlnReport> out;
    out.reserve(Ns.size());
    for (const int N : Ns) {
        const Signature t = quantize_profile(profile, N);
        const long long col_lo = t[N - 1] - 1;
        const long long col_hi = t[0];
        const long long cols = col_hi - col_lo + 1;
        const int strips = N - 1;  // strip N-1 holds the fixed top row
        const double x_lo = static_cast<double>(col_lo) / N;
        const double x_hi = static_cast<double>(col_hi) / N;
        const double cell_w = (x_hi - x_lo) / nx;

        // site (column c, strip s) lives at scaled point (c/N, (s+1)/N)
        auto cell_of = [&](long long c, int s) -> std::size_t {
            const double xh = static_cast<double>(c) / N;
            const double eta = static_cast<double>(s + 1) / N;
            int cx = static_cast<int>((xh - x_lo) / cell_w);
            cx = std::clamp(cx, 0, nx - 1);
            int cy = static_cast<int>(eta * neta);
            cy = std::clamp(cy, 0, neta - 1);
            return static_cast<std::size_t>(cy) * nx +
                   static_cast<std::size_t>(cx);
        };

        const std::size_t ncells =
            static_cast<std::size_t>(nx) * static_cast<std::size_t>(neta);

        /*
         * Limit-shape prediction averaged over the same sites that the
         * empirical counts see, so quantization of the arctic boundary is
         * shared by both sides of the comparison.  A frozen-empty site pins
         * the horizontal density only, so its cell drops out of the up/down
         * comparison.
         */
        std::vector<long long> sites(ncells, 0), ud_sites(ncells, 0);
        std::vector<double> ph(ncells, 0.0), pu(ncells, 0.0), pd(ncells, 0.0);
        long long degenerate = 0;
        for (int s = 0; s < strips; ++s) {
            const double eta = static_cast<double>(s + 1) / N;
            for (long long c = col_lo; c <= col_hi; ++c) {
                const double xh = static_cast<double>(c) / N;
                SlopePoint sp = classify_point(profile, xh, eta);
                if (sp.status == PointStatus::kDegenerate)
                    sp = classify_point(profile, xh + 1e-7, eta);
                const std::size_t cell = cell_of(c, s);
                ++sites[cell];
                switch (sp.status) {
                    case PointStatus::kLiquid:
                        ph[cell] += sp.densities.p_hor;
                        pu[cell] += sp.densities.p_up;
                        pd[cell] += sp.densities.p_down;
                        ++ud_sites[cell];
                        break;
                    case PointStatus::kFrozen1:
                        ph[cell] += 1.0;
                        ++ud_sites[cell];
                        break;
                    case PointStatus::kFrozen0:
                        break;  // horizontal density 0, up/down split unknown
                    default:
                        ++degenerate;
                        ph[cell] += 0.5;
                        break;
                }
            }
        }

        const SamplerKind kind = sampler_for(N);
        const std::uint64_t sweeps =
            kind == SamplerKind::kGlauber ? default_glauber_sweeps(N) : 0;
        const std::uint64_t study_seed =
            mix_seed(seed, static_cast<std::uint64_t>(N));

        const int W = clamp_threads(threads, M);
        std::vector<std::vector<std::uint64_t>> tally(
            static_cast<std::size_t>(W),
            std::vector<std::uint64_t>(ncells * 3, 0));
        run_workers(W, M, [&](int w, std::uint64_t k) {
            const GTPattern p =
                draw_sample(t, SeededStream{study_seed, k}, kind, sweeps);
            auto& mine = tally[static_cast<std::size_t>(w)];
            for (const Tile& tile : tiles(p)) {
                const int s = tile.type == TileType::kHorizontal ? tile.n - 1
                                                                 : tile.n;
                if (s >= strips) continue;
                const std::size_t cell = cell_of(tile.x, s);
                const std::size_t slot =
                    tile.type == TileType::kHorizontal
                        ? 0
                        : (tile.type == TileType::kUp ? 1 : 2);
                ++mine[cell * 3 + slot];
            }
        });
        std::vector<std::uint64_t> counts(ncells * 3, 0);
        for (int w = 0; w < W; ++w)
            for (std::size_t i = 0; i < counts.size(); ++i)
                counts[i] += tally[static_cast<std::size_t>(w)][i];

        LlnReport rep;
        rep.N = N;
        rep.M = M;
        rep.seed = study_seed;
        rep.sampler = sampler_name(kind);
        rep.sweeps = sweeps;
        rep.degenerate_sites = degenerate;
        for (int cy = 0; cy < neta; ++cy)
            for (int cx = 0; cx < nx; ++cx) {
                const std::size_t cell =
                    static_cast<std::size_t>(cy) * nx + cx;
                if (sites[cell] == 0) continue;
                LlnCell lc;
                lc.x_lo = x_lo + cx * cell_w;
                lc.x_hi = x_lo + (cx + 1) * cell_w;
                lc.eta_lo = static_cast<double>(cy) / neta;
                lc.eta_hi = static_cast<double>(cy + 1) / neta;
                lc.sites = sites[cell];
                const double denom =
                    static_cast<double>(sites[cell]) *
                    static_cast<double>(M);
                lc.emp_hor = safe_div(
                    static_cast<double>(counts[cell * 3 + 0]), denom);
                lc.emp_up = safe_div(
                    static_cast<double>(counts[cell * 3 + 1]), denom);
                lc.emp_down = safe_div(
                    static_cast<double>(counts[cell * 3 + 2]), denom);
                lc.pred_hor =
                    ph[cell] / static_cast<double>(sites[cell]);
                lc.pred_up = pu[cell] / static_cast<double>(sites[cell]);
                lc.pred_down = pd[cell] / static_cast<double>(sites[cell]);
                lc.compare_ud = ud_sites[cell] == sites[cell];
                lc.dev = std::abs(lc.emp_hor - lc.pred_hor);
                if (lc.compare_ud) {
                    lc.dev = std::max(lc.dev,
                                      std::abs(lc.emp_up - lc.pred_up));
                    lc.dev = std::max(
                        lc.dev, std::abs(lc.emp_down - lc.pred_down));
                }
                rep.max_abs_dev = std::max(rep.max_abs_dev, lc.dev);
                rep.cells.push_back(lc);
            }
        (void)cols;
        out.push_back(std::move(rep));
    }
    return out;
}

// ============================================================
// Serialization
// ============================================================

namespace {

std::string offsets_column(
    const std::vector<std::pair<long long, int>>& offsets) {
    std::string out;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) out += ";";
        out += std::to_string(offsets[i].first) + ":" +
               std::to_string(offsets[i].second);
    }
    return out;
}

nlohmann::json offsets_json(
    const std::vector<std::pair<long long, int>>& offsets) {
    auto arr = nlohmann::json::array();
    for (const auto& [dx, dn] : offsets)
        arr.push_back(nlohmann::json::array({dx, dn}));
    return arr;
}

}  // namespace

std::string report_csv(const std::vector<CorrelationReport>& reports) {
    std::string out =
        "N,M,window_id,offsets,empirical,stderr,predicted,zscore\n";
    char b[4][64];
    for (const auto& rep : reports)
        for (const auto& e : rep.entries) {
            out += std::to_string(rep.N) + "," + std::to_string(rep.M) + "," +
                   e.window_id + "," + offsets_column(e.offsets) + ",";
            out += format_double(b[0], sizeof b[0], e.empirical);
            out += ",";
            out += format_double(b[1], sizeof b[1], e.stderr_val);
            out += ",";
            out += format_double(b[2], sizeof b[2], e.predicted);
            out += ",";
            out += format_double(b[3], sizeof b[3], e.zscore);
            out += "\n";
        }
    return out;
}

std::string report_json(const std::vector<CorrelationReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& rep : reports) {
        nlohmann::json r = {{"N", rep.N},
                            {"M", rep.M},
                            {"seed", rep.seed},
                            {"source_id", rep.source_id},
                            {"sampler", rep.sampler},
                            {"sweeps", rep.sweeps},
                            {"note", rep.note}};
        auto entries = nlohmann::json::array();
        for (const auto& e : rep.entries)
            entries.push_back({{"window_id", e.window_id},
                               {"offsets", offsets_json(e.offsets)},
                               {"empirical", e.empirical},
                               {"stderr", e.stderr_val},
                               {"predicted", e.predicted},
                               {"zscore", e.zscore},
                               {"flagged", e.flagged}});
        r["entries"] = std::move(entries);
        arr.push_back(std::move(r));
    }
    return arr.dump(2) + "\n";
}

std::string lln_csv(const std::vector<LlnReport>& reports) {
    std::string out =
        "N,M,x_lo,x_hi,eta_lo,eta_hi,sites,emp_hor,pred_hor,emp_up,pred_up,"
        "emp_down,pred_down,compare_ud,dev\n";
    char b[64];
    for (const auto& rep : reports)
        for (const auto& c : rep.cells) {
            out += std::to_string(rep.N) + "," + std::to_string(rep.M);
            for (const double v :
                 {c.x_lo, c.x_hi, c.eta_lo, c.eta_hi}) {
                out += ",";
                out += format_double(b, sizeof b, v);
            }
            out += "," + std::to_string(c.sites);
            for (const double v : {c.emp_hor, c.pred_hor, c.emp_up, c.pred_up,
                                   c.emp_down, c.pred_down}) {
                out += ",";
                out += format_double(b, sizeof b, v);
            }
            out += std::string(",") + (c.compare_ud ? "1" : "0") + ",";
            out += format_double(b, sizeof b, c.dev);
            out += "\n";
        }
    return out;
}

std::string lln_json(const std::vector<LlnReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& rep : reports) {
        nlohmann::json r = {{"N", rep.N},
                            {"M", rep.M},
                            {"seed", rep.seed},
                            {"sampler", rep.sampler},
                            {"sweeps", rep.sweeps},
                            {"degenerate_sites", rep.degenerate_sites},
                            {"max_abs_dev", rep.max_abs_dev}};
        auto cells = nlohmann::json::array();
        for (const auto& c : rep.cells)
            cells.push_back({{"x_lo", c.x_lo},
                             {"x_hi", c.x_hi},
                             {"eta_lo", c.eta_lo},
                             {"eta_hi", c.eta_hi},
                             {"sites", c.sites},
                             {"emp_hor", c.emp_hor},
                             {"emp_up", c.emp_up},
                             {"emp_down", c.emp_down},
                             {"pred_hor", c.pred_hor},
                             {"pred_up", c.pred_up},
                             {"pred_down", c.pred_down},
                             {"compare_ud", c.compare_ud},
                             {"dev", c.dev}});
        r["cells"] = std::move(cells);
        arr.push_back(std::move(r));
    }
    return arr.dump(2) + "\n";
}

}  // namespace loz
