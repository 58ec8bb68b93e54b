#include "loz/sampler.hpp"

#include "loz/bigint.hpp"
#include "loz/counting.hpp"
#include "loz/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace loz {
namespace {

using LD = long double;
constexpr LD kLdEps = 1.0842021724855044e-19L;  // 2^-63, x87 unit roundoff
constexpr LD kTwoPow64 = 18446744073709551616.0L;

/*
 * Sequential row sampling.  Given a row y of length m+1, the row below is
 * distributed on the product of intervals z_j in (y_{j+1}, y_j] with weight
 * prod_{i<j}(z_i - z_j).  Coordinates are decided left to right by CDF
 * inversion: with z_0..z_{j-1} already pinned, the partial sum
 *
 *   S_j(v) = sum of weights over { z_j <= v, z_{j+1..} free }
 *
 * is a determinant whose rows are per-slot power sums, because the slots
 * are disjoint and the weight is itself a determinant, so row sums pull
 * inside by multilinearity.  The decision rule for a fresh 64-bit draw u is
 * "smallest v with S_j(v) * 2^64 > u * S_j(y_j)"; slots of width one are
 * forced and consume no randomness.
 *
 * Two evaluation routes answer each comparison:
 *  - a float route in long double, with rows expressed in the Chebyshev
 *    basis of the transition span (the monomial basis is numerically
 *    useless already around m = 30): the matrix inverse is maintained by
 *    rank-1 row updates, so a CDF probe is an O(m) dot product.  Every
 *    comparison carries an error margin scaled by the measured condition
 *    number; a probe landing inside the margin aborts to the exact route.
 *  - an exact route on big integers (Bareiss for small matrices, CRT
 *    determinants beyond), used for small N, for spans too large to
 *    tabulate, and as the fallback above.
 * Both routes implement the same decision rule with the same draw u, so
 * the sampled law is exactly uniform regardless of which route answers.
 */

struct Slot {
    long long lo, hi;  // z in (lo, hi]
    bool fixed = false;
    long long value = 0;
};

std::vector<VSlot> to_vslots(const std::vector<Slot>& s, std::size_t j,
                             long long v) {
    std::vector<VSlot> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == j)
            out.push_back(VSlot::interval(s[i].lo, v));
        else if (s[i].fixed)
            out.push_back(VSlot::fixed(s[i].value));
        else
            out.push_back(VSlot::interval(s[i].lo, s[i].hi));
    }
    return out;
}

// Smallest v in (lo, hi] with S(v) * 2^64 > u * S(hi), exactly.
long long exact_coordinate(const std::vector<Slot>& slots, std::size_t j,
                           std::uint64_t u) {
    const BigInt w = partial_vandermonde_sum(to_vslots(slots, j, slots[j].hi));
    const BigInt target = BigInt(u) * w;
    long long a = slots[j].lo, b = slots[j].hi;
    while (a + 1 < b) {
        const long long mid = a + (b - a) / 2;
        BigInt s = partial_vandermonde_sum(to_vslots(slots, j, mid));
        if ((s << 64) > target)
            b = mid;
        else
            a = mid;
    }
    return b;
}

// Float machinery for one row transition.  Prefix tables of Chebyshev
// values over the transition span make every CDF probe an O(m) dot product
// against one column of the maintained inverse.
class FloatTransition {
  public:
    // Returns false if the tables would not fit or the matrix cannot be
    // inverted at useful accuracy; the caller then uses the exact route.
    bool init(const std::vector<Slot>& slots) {
        m_ = static_cast<int>(slots.size());
        base_ = slots[m_ - 1].lo;
        top_ = slots[0].hi;
        const long long span = top_ - base_;
        if (span < 1) return false;
        const unsigned long long cells =
            (unsigned long long)(span + 1) * (unsigned long long)m_;
        if (cells > (1ull << 22)) return false;
        c_ = (LD)(base_ + 1 + top_) / 2;
        s_ = std::max<LD>(1, (LD)(top_ - base_ - 1) / 2);

        prefix_.assign(m_, std::vector<LD>((std::size_t)span + 1, 0));
        for (long long x = base_ + 1; x <= top_; ++x) {
            const std::size_t idx = (std::size_t)(x - base_);
            const LD u = ((LD)x - c_) / s_;
            LD t0 = 1, t1 = u;
            for (int k = 0; k < m_; ++k) {
                const LD tk = k == 0 ? t0 : (k == 1 ? t1 : 2 * u * t1 - t0);
                if (k >= 2) {
                    t0 = t1;
                    t1 = tk;
                }
                prefix_[k][idx] = prefix_[k][idx - 1] + tk;
            }
        }

        mat_.assign(m_, std::vector<LD>(m_));
        for (int i = 0; i < m_; ++i) {
            for (int k = 0; k < m_; ++k)
                mat_[i][k] = slots[i].fixed
                                 ? cheb(k, slots[i].value)
                                 : pref(k, slots[i].hi) - pref(k, slots[i].lo);
        }
        return refactorize();
    }

    // CDF of slot j at v given the rows currently installed; row j must
    // still hold its full interval row.  By the rank-1 determinant update,
    // replacing row j with the (lo, v] row scales the determinant by
    // 1 + (r_v - r_full)^T inv e_j, which is exactly S_j(v) / S_j(hi).
    LD cdf(int j, const Slot& slot, long long v) const {
        LD q = 0;
        for (int k = 0; k < m_; ++k)
            q += (pref(k, slot.hi) - pref(k, v)) * inv_[k][j];
        return 1 - q;
    }

    LD margin() const { return delta_; }

    // Pin slot j to value z (rank-1 row replacement).  Returns false when
    // the matrix can no longer be trusted in floats.
    bool pin(int j, long long z) {
        std::vector<LD> dvec(m_);
        for (int k = 0; k < m_; ++k) dvec[k] = cheb(k, z) - mat_[j][k];
        LD denom = 1;
        for (int k = 0; k < m_; ++k) denom += dvec[k] * inv_[k][j];
        for (int k = 0; k < m_; ++k) mat_[j][k] += dvec[k];
        // denom is the probability of the pinned value, so a genuine value
        // can be tiny; negative means the inverse is corrupt.  Both cases
        // rebuild from the updated matrix.
        if (!(denom > 1e-9L)) return refactorize();
        std::vector<LD> rowv(m_), col(m_);
        for (int b = 0; b < m_; ++b) {
            LD acc = 0;
            for (int k = 0; k < m_; ++k) acc += dvec[k] * inv_[k][b];
            rowv[b] = acc / denom;
        }
        for (int a = 0; a < m_; ++a) col[a] = inv_[a][j];
        for (int a = 0; a < m_; ++a)
            for (int b = 0; b < m_; ++b) inv_[a][b] -= col[a] * rowv[b];
        if (++updates_ % 24 == 0) return refactorize();
        return true;
    }

  private:
    LD pref(int k, long long v) const {
        return prefix_[k][(std::size_t)(v - base_)];
    }

    LD cheb(int k, long long x) const {
        const LD u = ((LD)x - c_) / s_;
        LD t0 = 1, t1 = u;
        if (k == 0) return t0;
        for (int i = 2; i <= k; ++i) {
            const LD t = 2 * u * t1 - t0;
            t0 = t1;
            t1 = t;
        }
        return t1;
    }

    bool refactorize() {
        // Gauss-Jordan inverse with partial pivoting, plus a one-norm
        // condition estimate that sets the decision margin.
        const int m = m_;
        std::vector<std::vector<LD>> a(mat_);
        inv_.assign(m, std::vector<LD>(m, 0));
        for (int i = 0; i < m; ++i) inv_[i][i] = 1;
        for (int k = 0; k < m; ++k) {
            int piv = k;
            for (int i = k + 1; i < m; ++i)
                if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
            if (a[piv][k] == 0) return false;
            std::swap(a[piv], a[k]);
            std::swap(inv_[piv], inv_[k]);
            const LD d = a[k][k];
            for (int j = 0; j < m; ++j) {
                a[k][j] /= d;
                inv_[k][j] /= d;
            }
            for (int i = 0; i < m; ++i) {
                if (i == k) continue;
                const LD f = a[i][k];
                if (f == 0) continue;
                for (int j = 0; j < m; ++j) {
                    a[i][j] -= f * a[k][j];
                    inv_[i][j] -= f * inv_[k][j];
                }
            }
        }
        LD n1 = 0, n1i = 0;
        for (int j = 0; j < m; ++j) {
            LD cm = 0, ci = 0;
            for (int i = 0; i < m; ++i) {
                cm += std::fabs(mat_[i][j]);
                ci += std::fabs(inv_[i][j]);
            }
            n1 = std::max(n1, cm);
            n1i = std::max(n1i, ci);
        }
        delta_ = 500 * m * n1 * n1i * kLdEps;
        updates_ = 0;
        return delta_ < 0.25L;
    }

    int m_ = 0;
    long long base_ = 0, top_ = 0;
    LD c_ = 0, s_ = 1, delta_ = 1;
    int updates_ = 0;
    std::vector<std::vector<LD>> prefix_, mat_, inv_;
};

// Sample the row below y.  Draws exactly one 64-bit word per non-forced
// coordinate, in left-to-right order, whichever route decides it.
std::vector<long long> sample_row_below(const std::vector<long long>& y,
                                        PhiloxRng& rng, bool exact_only) {
    const int m = static_cast<int>(y.size()) - 1;
    std::vector<long long> z(m);
    if (m == 0) return z;

    std::vector<Slot> slots(m);
    bool any_free = false;
    for (int j = 0; j < m; ++j) {
        slots[j] = {y[j + 1], y[j]};
        if (slots[j].lo + 1 == slots[j].hi) {
            slots[j].fixed = true;
            slots[j].value = slots[j].hi;
        } else {
            any_free = true;
        }
    }
    if (!any_free) {
        for (int j = 0; j < m; ++j) z[j] = slots[j].value;
        return z;
    }

    FloatTransition ft;
    bool use_float = !exact_only && ft.init(slots);

    for (int j = 0; j < m; ++j) {
        if (slots[j].fixed) {
            z[j] = slots[j].value;
            continue;
        }
        const std::uint64_t u = rng.next_u64();
        long long chosen = 0;
        bool decided = false;
        if (use_float) {
            const LD theta = (LD)u / kTwoPow64;
            const LD delta = ft.margin();
            long long a = slots[j].lo, b = slots[j].hi;
            bool certain = true;
            while (a + 1 < b) {
                const long long mid = a + (b - a) / 2;
                const LD cv = ft.cdf(j, slots[j], mid);
                if (std::fabs(cv - theta) <= delta) {
                    certain = false;
                    break;
                }
                if (cv > theta)
                    b = mid;
                else
                    a = mid;
            }
            if (certain) {
                chosen = b;
                decided = true;
            }
        }
        if (!decided) chosen = exact_coordinate(slots, j, u);
        z[j] = chosen;
        slots[j].fixed = true;
        slots[j].value = chosen;
        if (use_float) use_float = ft.pin(j, chosen);
    }
    return z;
}

GTPattern sample_sequential(const Signature& t, SeededStream stream,
                            bool exact_only) {
    validate_signature(t.entries);
    const int n = t.n();
    PhiloxRng rng(stream, kTagSequentialSampler);
    GTPattern p;
    p.rows.resize(n);
    p.rows[n - 1] = t.entries;
    for (int lvl = n - 1; lvl >= 1; --lvl)
        p.rows[lvl - 1] =
            sample_row_below(p.rows[lvl], rng, exact_only || n <= 12);
    return p;
}

// ---- corner-flip dynamics ---------------------------------------------

struct Move {
    int n, j;  // 1-based level in [1, N), 1-based index in [1, n]
    int dir;   // +1 or -1
};

// Decode one uniform move from a stream of 64-bit words.  Rejection over
// as many words as needed keeps the law exactly uniform.
template <typename WordFn>
Move decode_move(int nlevels, WordFn&& next_word) {
    const std::uint64_t pairs =
        (std::uint64_t)nlevels * (nlevels - 1) / 2;  // (n, j) with n < N
    const std::uint64_t need = pairs * 2;
    const std::uint64_t limit = need * (~std::uint64_t(0) / need);
    for (;;) {
        const std::uint64_t w = next_word();
        if (w >= limit) continue;
        const std::uint64_t idx = w % need;
        const int dir = (idx & 1) ? 1 : -1;
        const std::uint64_t pr = idx >> 1;
        // invert the triangular enumeration of (n, j): pairs at level n
        // occupy offsets [n(n-1)/2, n(n+1)/2)
        int n = (int)((std::sqrt(8.0 * (double)pr + 1) - 1) / 2) + 1;
        while ((std::uint64_t)n * (n - 1) / 2 > pr) --n;
        while ((std::uint64_t)n * (n + 1) / 2 <= pr) ++n;
        const int j = (int)(pr - (std::uint64_t)n * (n - 1) / 2) + 1;
        return {n, j, dir};
    }
}

// Apply a corner flip if it keeps the pattern valid; otherwise do nothing.
// Checking the four neighbor constraints suffices: strict decrease inside
// a row already follows from the two constraints against the row above.
void apply_move(GTPattern& p, const Move& mv) {
    auto& row = p.rows[mv.n - 1];
    const long long x = row[mv.j - 1];
    const auto& up = p.rows[mv.n];  // level n+1 always exists (n < N)
    if (mv.dir > 0) {
        if (x + 1 > up[mv.j - 1]) return;
        if (mv.j >= 2 && x + 1 >= p.rows[mv.n - 2][mv.j - 2]) return;
        row[mv.j - 1] = x + 1;
    } else {
        if (x - 1 <= up[mv.j]) return;
        if (mv.j <= mv.n - 1 && x - 1 < p.rows[mv.n - 2][mv.j - 1]) return;
        row[mv.j - 1] = x - 1;
    }
}

}  // namespace

GTPattern sample_exact(const Signature& t, SeededStream stream, int budget) {
    if (t.n() > budget)
        throw LozError(ErrCode::BudgetExceeded,
                       "top row longer than the exact sampler budget; "
                       "sample_cftp has no size limit",
                       t.n());
    return sample_sequential(t, stream, false);
}

namespace detail {

GTPattern sample_exact_route_only(const Signature& t, SeededStream stream) {
    return sample_sequential(t, stream, true);
}

}  // namespace detail

GTPattern sample_cftp(const Signature& t, SeededStream stream,
                      CftpStats* stats) {
    validate_signature(t.entries);
    const int n = t.n();
    if (stats) *stats = {};
    GTPattern hi_chain = max_pattern(t);
    GTPattern lo_chain = min_pattern(t);
    if (n == 1 || hi_chain.rows == lo_chain.rows) return hi_chain;
    PhiloxRng rng(stream, kTagCftp);
    for (std::uint64_t span = 1;; span *= 2) {
        hi_chain = max_pattern(t);
        lo_chain = min_pattern(t);
        // moves at times -span..-1; the randomness of time -k is a pure
        // function of k, so successive epochs replay the tail exactly
        for (std::uint64_t k = span; k >= 1; --k) {
            std::array<std::uint64_t, 4> blk{};
            int pos = 4;
            std::uint64_t salt = 0;
            const Move mv = decode_move(n, [&] {
                if (pos == 4) {
                    blk = rng.at_time(k, salt++);
                    pos = 0;
                }
                return blk[pos++];
            });
            apply_move(hi_chain, mv);
            apply_move(lo_chain, mv);
        }
        if (stats) {
            ++stats->epochs;
            stats->total_steps += span;
            stats->final_span = span;
        }
        if (hi_chain.rows == lo_chain.rows) return hi_chain;
    }
}

std::uint64_t default_glauber_sweeps(int n) {
    return 10ull * (std::uint64_t)n * n * n;
}

GTPattern sample_glauber(const Signature& t, std::uint64_t sweeps,
                         SeededStream stream) {
    validate_signature(t.entries);
    if (sweeps < 1)
        throw LozError(ErrCode::ShapeMismatch, "need at least one sweep");
    const int n = t.n();
    GTPattern p = max_pattern(t);
    if (n == 1) return p;
    PhiloxRng rng(stream, kTagGlauber);
    const std::uint64_t steps = sweeps * ((std::uint64_t)n * (n - 1) / 2);
    for (std::uint64_t i = 0; i < steps; ++i) {
        const Move mv = decode_move(n, [&] { return rng.next_u64(); });
        apply_move(p, mv);
    }
    return p;
}

Signature sample_schur_weyl(int N, long long n, SeededStream stream) {
    if (N < 1 || n < 0)
        throw LozError(ErrCode::ShapeMismatch,
                       "need alphabet size >= 1 and word length >= 0");
    PhiloxRng rng(stream, kTagWord);
    std::vector<std::vector<int>> tab;  // rows of the insertion tableau
    for (long long i = 0; i < n; ++i) {
        int x = (int)rng.next_below((std::uint64_t)N) + 1;
        for (std::size_t r = 0;; ++r) {
            if (r == tab.size()) {
                tab.push_back({x});
                break;
            }
            auto it = std::upper_bound(tab[r].begin(), tab[r].end(), x);
            if (it == tab[r].end()) {
                tab[r].push_back(x);
                break;
            }
            std::swap(x, *it);
        }
    }
    std::vector<long long> ell(N);
    for (int i = 0; i < N; ++i) {
        const long long lam =
            i < (int)tab.size() ? (long long)tab[i].size() : 0;
        ell[i] = lam - (i + 1);
    }
    return Signature{std::move(ell)};
}

Signature quantize_profile(const PiecewiseDensityMeasure& f, int N) {
    if (N < 1) throw LozError(ErrCode::ShapeMismatch, "need N >= 1");
    const auto checked = PiecewiseDensityMeasure::checked(f.pieces);
    auto pieces = checked.pieces;
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.a < b.a; });
    // right-continuous quantile: a q exactly on a piece boundary resolves
    // to the start of the next positive piece, jumping zero-density gaps
    auto quantile = [&](double q) {
        double cum = 0;
        for (const auto& pc : pieces) {
            const double mass = (pc.b - pc.a) * pc.q;
            if (mass <= 0) continue;
            if (q < cum + mass) return pc.a + (q - cum) / pc.q;
            cum += mass;
        }
        return pieces.back().b;
    };
    std::vector<long long> t(N);
    for (int i = 1; i <= N; ++i) {
        const double v = N * quantile((double)(N - i) / N);
        // nudge guards against a quantile landing a float ulp below the
        // integer it represents exactly
        t[i - 1] =
            (long long)std::floor(v + 1e-12 * std::max(1.0, std::fabs(v)));
    }
    Signature out{std::move(t)};
    validate_signature(out.entries);
    return out;
}

}  // namespace loz
