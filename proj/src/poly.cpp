#include "loz/poly.hpp"

#include <algorithm>
#include <utility>

#include "loz/errors.hpp"

namespace loz {

namespace {

BigInt poly_content(const BigPoly& p) {
    BigInt g = 0;
    for (const auto& c : p.c) {
        g = boost::multiprecision::gcd(g, c);
        if (g == 1) break;
    }
    return g;
}

void strip_content(BigPoly& p) {
    BigInt g = poly_content(p);
    if (g == 0 || g == 1) return;
    for (auto& c : p.c) c /= g;
}

int sign_of(const BigInt& v) {
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

// Remainder of f by g scaled by a positive constant, so its sign sequence
// is usable in Sturm chains.  Each reduction step multiplies the running
// remainder by lc(g); the final sign flip compensates odd powers of a
// negative leading coefficient.
BigPoly pseudo_rem_positive(const BigPoly& f, const BigPoly& g) {
    BigPoly r = f;
    const int dg = g.degree();
    const BigInt& lg = g.c.back();
    int steps_with_negative_lg = 0;
    while (r.degree() >= dg && !r.c.empty()) {
        const int dr = r.degree();
        BigInt lr = r.c.back();
        BigPoly next;
        next.c.assign(static_cast<size_t>(dr), BigInt(0));
        // lg * r - lr * x^{dr-dg} * g, degree drops by at least one
        for (int i = 0; i < dr; ++i) {
            BigInt v = lg * r.c[static_cast<size_t>(i)];
            int j = i - (dr - dg);
            if (j >= 0) v -= lr * g.c[static_cast<size_t>(j)];
            next.c[static_cast<size_t>(i)] = std::move(v);
        }
        trim(next);
        r = std::move(next);
        if (lg < 0) steps_with_negative_lg ^= 1;
    }
    if (steps_with_negative_lg)
        for (auto& c : r.c) c = -c;
    return r;
}

// p0 = primitive p, p1 = primitive p', then repeated negated positive
// pseudo-remainders with content stripping.  The last nonzero entry is a
// gcd of (p, p') up to sign.
std::vector<BigPoly> sturm_chain(BigPoly p) {
    std::vector<BigPoly> chain;
    trim(p);
    strip_content(p);
    if (p.c.empty()) return chain;
    chain.push_back(p);
    BigPoly d = derivative(p);
    strip_content(d);
    if (d.c.empty()) return chain;
    chain.push_back(std::move(d));
    while (true) {
        const BigPoly& a = chain[chain.size() - 2];
        const BigPoly& b = chain.back();
        if (b.degree() < 1) break;
        BigPoly r = pseudo_rem_positive(a, b);
        if (r.c.empty()) break;
        for (auto& c : r.c) c = -c;
        strip_content(r);
        chain.push_back(std::move(r));
    }
    return chain;
}

int variations(const std::vector<int>& signs) {
    int v = 0;
    int prev = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++v;
        prev = s;
    }
    return v;
}

int variations_at_minus_inf(const std::vector<BigPoly>& chain) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain) {
        int s = sign_of(q.c.back());
        if (q.degree() % 2 == 1) s = -s;
        signs.push_back(s);
    }
    return variations(signs);
}

int variations_at_plus_inf(const std::vector<BigPoly>& chain) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain) signs.push_back(sign_of(q.c.back()));
    return variations(signs);
}

int variations_at(const std::vector<BigPoly>& chain, const BigInt& num,
                  const BigInt& den) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain) signs.push_back(sign_at(q, num, den));
    return variations(signs);
}

// Quotient of an exact division of primitive polynomials; every step of the
// classical long division stays integral.
BigPoly divide_exact(const BigPoly& p, const BigPoly& g) {
    BigPoly r = p;
    const int dg = g.degree();
    const BigInt& lg = g.c.back();
    BigPoly q;
    q.c.assign(static_cast<size_t>(p.degree() - dg + 1), BigInt(0));
    while (!r.c.empty() && r.degree() >= dg) {
        const int dr = r.degree();
        BigInt coef = r.c.back() / lg;
        if (coef * lg != r.c.back())
            throw LozError(ErrCode::ShapeMismatch,
                           "inexact polynomial division");
        q.c[static_cast<size_t>(dr - dg)] = coef;
        for (int j = 0; j <= dg; ++j)
            r.c[static_cast<size_t>(dr - dg + j)] -=
                coef * g.c[static_cast<size_t>(j)];
        trim(r);
    }
    if (!r.c.empty())
        throw LozError(ErrCode::ShapeMismatch, "inexact polynomial division");
    return q;
}

}  // namespace

void trim(BigPoly& p) {
    while (!p.c.empty() && p.c.back() == 0) p.c.pop_back();
}

BigPoly derivative(const BigPoly& p) {
    BigPoly d;
    if (p.c.size() <= 1) return d;
    d.c.resize(p.c.size() - 1);
    for (size_t i = 1; i < p.c.size(); ++i)
        d.c[i - 1] = p.c[i] * BigInt(static_cast<long long>(i));
    return d;
}

int sign_at(const BigPoly& p, const BigInt& num, const BigInt& den) {
    if (p.c.empty()) return 0;
    // sum c_i num^i den^{d-i}, Horner from the top
    BigInt acc = p.c.back();
    for (int i = p.degree() - 1; i >= 0; --i)
        acc = acc * num + p.c[static_cast<size_t>(i)] * pow(den, p.degree() - i);
    return sign_of(acc);
}

PoleClasses critical_poles(const Signature& t, long long x, int n) {
    const int N = t.n();
    if (n < 1 || n > N)
        throw LozError(ErrCode::LevelOutOfRange, "level outside 1..N", n);
    PoleClasses pc;
    const long long lo = x - (N - n);  // interval poles are x-a, a in 1..N-n
    std::vector<long long> tset(t.entries);
    std::sort(tset.begin(), tset.end());
    for (long long v = lo; v <= x - 1; ++v)
        if (!std::binary_search(tset.begin(), tset.end(), v))
            pc.plus.push_back(v);
    for (long long tv : tset) {
        if (tv < lo)
            pc.minus_left.push_back(tv);
        else if (tv > x - 1)
            pc.minus_right.push_back(tv);
    }
    return pc;
}

BigPoly critical_polynomial(const Signature& t, long long x, int n) {
    PoleClasses pc = critical_poles(t, x, n);
    std::vector<std::pair<long long, int>> poles;  // (location, +-1)
    for (long long p : pc.plus) poles.emplace_back(p, +1);
    for (long long p : pc.minus_left) poles.emplace_back(p, -1);
    for (long long p : pc.minus_right) poles.emplace_back(p, -1);

    // full product prod (z - p_k)
    BigPoly full;
    full.c = {BigInt(1)};
    for (const auto& [p, s] : poles) {
        (void)s;
        BigPoly next;
        next.c.assign(full.c.size() + 1, BigInt(0));
        for (size_t i = 0; i < full.c.size(); ++i) {
            next.c[i + 1] += full.c[i];
            next.c[i] -= full.c[i] * BigInt(p);
        }
        full = std::move(next);
    }

    // Q = sum_k s_k * full / (z - p_k), each quotient by synthetic division
    BigPoly q;
    q.c.assign(full.c.size() > 0 ? full.c.size() - 1 : 0, BigInt(0));
    for (const auto& [p, s] : poles) {
        BigInt carry = 0;
        for (int i = static_cast<int>(full.c.size()) - 1; i >= 1; --i) {
            carry = full.c[static_cast<size_t>(i)] + carry * BigInt(p);
            if (s > 0)
                q.c[static_cast<size_t>(i - 1)] += carry;
            else
                q.c[static_cast<size_t>(i - 1)] -= carry;
        }
    }
    trim(q);
    return q;
}

int count_distinct_real_roots(const BigPoly& p) {
    auto chain = sturm_chain(p);
    if (chain.empty() || chain[0].degree() < 1) return 0;
    return variations_at_minus_inf(chain) - variations_at_plus_inf(chain);
}

int count_distinct_real_roots_in(const BigPoly& p, long long a, long long b) {
    auto chain = sturm_chain(p);
    if (chain.empty() || chain[0].degree() < 1) return 0;
    return variations_at(chain, BigInt(a), BigInt(1)) -
           variations_at(chain, BigInt(b), BigInt(1));
}

int count_real_roots_with_multiplicity(const BigPoly& p) {
    if (p.degree() < 1) return 0;
    auto chain = sturm_chain(p);
    if (chain.empty() || chain[0].degree() < 1) return 0;
    int distinct =
        variations_at_minus_inf(chain) - variations_at_plus_inf(chain);
    const BigPoly& g = chain.back();
    if (g.degree() < 1) return distinct;
    // roots of gcd(p, p') are the roots of p with multiplicity one less
    return distinct + count_real_roots_with_multiplicity(g);
}

RootStructure analyze_critical_polynomial(const Signature& t, long long x,
                                          int n) {
    RootStructure rs;
    BigPoly q = critical_polynomial(t, x, n);
    rs.degree = q.degree();
    if (rs.degree < 1) {
        rs.nonreal = 0;
        return rs;
    }
    auto chain = sturm_chain(q);
    rs.real_distinct =
        variations_at_minus_inf(chain) - variations_at_plus_inf(chain);
    const BigPoly& g = chain.back();
    if (g.degree() < 1) {
        rs.real_with_multiplicity = rs.real_distinct;
    } else {
        BigPoly q_primitive = q;
        strip_content(q_primitive);
        BigPoly sqfree = divide_exact(q_primitive, g);
        rs.real_with_multiplicity = count_distinct_real_roots(sqfree) +
                                    count_real_roots_with_multiplicity(g);
    }
    rs.nonreal = rs.degree - rs.real_with_multiplicity;

    // one certified sign-change interval per same-class gap
    PoleClasses pc = critical_poles(t, x, n);
    auto scan_class = [&](const std::vector<long long>& poles) {
        for (size_t i = 0; i + 1 < poles.size(); ++i) {
            long long a = poles[i], b = poles[i + 1];
            int sa = sign_at(q, BigInt(a), BigInt(1));
            int sb = sign_at(q, BigInt(b), BigInt(1));
            if (sa == 0 || sb == 0 || sa == sb) continue;
            // bisect on dyadic midpoints until the bracket is narrow
            BigInt lo_num(a), hi_num(b), den(1);
            for (int step = 0; step < 12; ++step) {
                BigInt mid_num = lo_num + hi_num;  // over den * 2
                BigInt mid_den = den * 2;
                int sm = sign_at(q, mid_num, mid_den);
                if (sm == 0) break;
                lo_num *= 2;
                hi_num *= 2;
                den = mid_den;
                if (sm == sa)
                    lo_num = mid_num;
                else
                    hi_num = mid_num;
            }
            rs.isolated.emplace_back(
                static_cast<double>(BigRat(lo_num, den)),
                static_cast<double>(BigRat(hi_num, den)));
        }
    };
    scan_class(pc.plus);
    scan_class(pc.minus_left);
    scan_class(pc.minus_right);
    std::sort(rs.isolated.begin(), rs.isolated.end());
    return rs;
}

}  // namespace loz
