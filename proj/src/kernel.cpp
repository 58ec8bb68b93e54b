#include "loz/kernel.hpp"

#include "loz/counting.hpp"
#include "loz/errors.hpp"

#include <algorithm>
#include <set>

namespace loz {

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

BigInt pochhammer(const BigInt& a, int k) {
    BigInt p = 1;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
}

/*
 * K(x1,n1; x2,n2) =
 *     -[n2 < n1][x2 <= x1] (x1-x2+1)_{n1-n2-1} / (n1-n2-1)!
 *     + (N-n1)!/(N-n2-1)! * (double contour integral).
 *
 * The integrand is
 *
 *     (z-x2+1)_{N-n2-1} / (w-x1)_{N-n1+1} * 1/(w-z) * prod_r (w-t_r)/(z-t_r),
 *
 * with the w contour a large circle and the z contour enclosing exactly the
 * poles z = t_r with t_r >= x2.  Both integrals collapse to residue sums:
 *
 *  - In w the finite poles are w = x1-j for j = 0..N-n1 (simple zeros of the
 *    falling denominator) and w = z.  The residue of 1/(w-x1)_{N-n1+1} at
 *    x1-j is 1/((-1)^j j! (N-n1-j)!).
 *  - Summed over w, the apparent poles in z at the points x1-j cancel
 *    between the Cauchy factor and the w = z residue, so in z only the
 *    t_r poles remain.  At z = t_r the w = z residue contributes exactly
 *    when t_r is one of the points x1-j; that replaces the w residue there,
 *    which vanishes because the numerator prod(w-t_r) has a zero.
 *
 * So for each t_r >= x2 we accumulate
 *
 *     A_r * sum_{j=0}^{N-n1} c_j,   A_r = (t_r-x2+1)_{N-n2-1} / prod_{s!=r}(t_r-t_s),
 *
 * where c_j = prod_{s!=r}(x1-j-t_s) / ((-1)^j j! (N-n1-j)!) generically and
 * c_j = prod_{s!=r}(t_r-t_s) / ((-1)^j j! (N-n1-j)!) when x1-j == t_r.
 * Everything is a ratio of products of integers, so the result is exact.
 */
BigRat kernel_exact(const Signature& t, long long x1, int n1, long long x2,
                    int n2) {
    const int N = t.n();
    if (n1 < 1 || n1 >= N || n2 < 1 || n2 >= N)
        throw LozError(ErrCode::LevelOutOfRange,
                       "kernel levels must lie in [1, N)");
    validate_signature(t.entries);

    BigRat result = 0;
    if (n2 < n1 && x2 <= x1) {
        result -= make_rat(pochhammer(BigInt(x1 - x2 + 1), n1 - n2 - 1),
                         factorial(n1 - n2 - 1));
    }

    const BigRat pre = make_rat(factorial(N - n1), factorial(N - n2 - 1));
    for (int r = 0; r < N; ++r) {
        if (t[r] < x2) continue;
        BigInt denom_r = 1;
        for (int s = 0; s < N; ++s)
            if (s != r) denom_r *= t[r] - t[s];
        const BigRat a_r = make_rat(pochhammer(BigInt(t[r] - x2 + 1), N - n2 - 1),
                         denom_r);

        BigRat inner = 0;
        for (int j = 0; j <= N - n1; ++j) {
            const long long w = x1 - j;
            BigInt num;
            if (w == t[r]) {
                num = denom_r;
            } else {
                num = 1;
                for (int s = 0; s < N; ++s)
                    if (s != r) num *= w - t[s];
                if (num == 0) continue;
            }
            BigInt d = factorial(j) * factorial(N - n1 - j);
            if (j % 2 != 0) d = -d;
            inner += make_rat(num, d);
        }
        result += pre * a_r * inner;
    }
    return result;
}

// Exact determinant via row scaling to integers and fraction-free
// elimination on the integer matrix.
BigRat rational_determinant(std::vector<std::vector<BigRat>> m) {
    const std::size_t k = m.size();
    if (k == 0) return 1;
    std::vector<std::vector<BigInt>> im(k, std::vector<BigInt>(k));
    BigInt scale = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (m[i].size() != k)
            throw LozError(ErrCode::ShapeMismatch, "matrix is not square");
        BigInt l = 1;
        for (auto& e : m[i]) l = boost::multiprecision::lcm(l, big_den(e));
        for (std::size_t j = 0; j < k; ++j)
            im[i][j] = big_num(m[i][j]) * (l / big_den(m[i][j]));
        scale *= l;
    }
    return make_rat(bareiss_determinant(im), scale);
}

namespace {

void validate_query(const KernelQuery& q) {
    validate_signature(q.t.entries);
    const int N = q.t.n();
    std::set<std::pair<long long, int>> seen;
    for (auto& [x, n] : q.points) {
        if (n < 1 || n >= N)
            throw LozError(ErrCode::LevelOutOfRange,
                           "query levels must lie in [1, N)");
        if (!seen.insert({x, n}).second)
            throw LozError(ErrCode::ShapeMismatch,
                           "query points must be distinct");
    }
}

}  // namespace

BigRat correlation(const KernelQuery& q) {
    validate_query(q);
    const std::size_t k = q.points.size();
    std::vector<std::vector<BigRat>> m(k, std::vector<BigRat>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m[i][j] = kernel_exact(q.t, q.points[i].first, q.points[i].second,
                                   q.points[j].first, q.points[j].second);
    return rational_determinant(std::move(m));
}

BigRat correlation_bruteforce(const KernelQuery& q, long long cap) {
    validate_query(q);
    BigInt hits = 0, total = 0;
    enumerate_patterns(
        q.t,
        [&](const GTPattern& p) {
            ++total;
            for (auto& [x, n] : q.points) {
                const auto& row = p.rows[n - 1];
                if (!std::binary_search(row.rbegin(), row.rend(), x))
                    return true;
            }
            ++hits;
            return true;
        },
        cap);
    return make_rat(hits, total);
}

}  // namespace loz
