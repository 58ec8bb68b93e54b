#include "loz/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace loz {

BigInt gt_dimension(const Signature& t) {
  const int n = t.n();
  BigInt num = 1, den = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      num *= BigInt(t[i] - t[j]);
      den *= BigInt(j - i);
    }
  }
  return num / den;  // exact: Weyl dimensions are integers
}

std::vector<std::pair<long long, long long>> interlacing_intervals(
    const std::vector<long long>& upper) {
  std::vector<std::pair<long long, long long>> out;
  for (size_t j = 0; j + 1 < upper.size(); ++j) {
    out.emplace_back(upper[j + 1], upper[j]);
  }
  return out;
}

namespace {

// Emits every pattern; rows above `row` are already filled in p.
bool enumerate_below(GTPattern& p, int row,
                     const std::function<bool(const GTPattern&)>& visit) {
  if (row < 0) return visit(p);
  const auto& upper = p.rows[row + 1];
  auto iv = interlacing_intervals(upper);
  auto& cur = p.rows[row];
  cur.resize(row + 1);
  for (int j = 0; j <= row; ++j) cur[j] = iv[j].first + 1;
  // Odometer over the product of the per-coordinate ranges; the ranges are
  // pairwise disjoint, so every combination is a valid interlacing row.
  while (true) {
    if (!enumerate_below(p, row - 1, visit)) return false;
    int j = row;
    while (j >= 0 && cur[j] == iv[j].second) {
      cur[j] = iv[j].first + 1;
      --j;
    }
    if (j < 0) return true;
    ++cur[j];
  }
}

}  // namespace

void enumerate_patterns(const Signature& t,
                        const std::function<bool(const GTPattern&)>& visit,
                        long long cap) {
  BigInt dim = gt_dimension(t);
  if (dim > cap) {
    throw LozError(ErrCode::CapExceeded,
                   "gt_dimension = " + dim.str() + " exceeds cap " +
                       std::to_string(cap));
  }
  const int n = t.n();
  GTPattern p;
  p.rows.resize(n);
  p.rows[n - 1] = t.entries;
  enumerate_below(p, n - 2, visit);
}

std::vector<GTPattern> all_patterns(const Signature& t, long long cap) {
  std::vector<GTPattern> out;
  enumerate_patterns(
      t,
      [&](const GTPattern& p) {
        out.push_back(p);
        return true;
      },
      cap);
  return out;
}

// ============================================================
// Power sums and partial Vandermonde determinants
// ============================================================

namespace {

constexpr int kMaxPower = 160;

// Stirling numbers of the second kind, S2[p][k] for p,k <= kMaxPower.
const std::vector<std::vector<BigInt>>& stirling2() {
  static const std::vector<std::vector<BigInt>> table = [] {
    std::vector<std::vector<BigInt>> s(kMaxPower + 1);
    for (int p = 0; p <= kMaxPower; ++p) {
      s[p].resize(p + 1);
      for (int k = 0; k <= p; ++k) {
        if (p == 0) {
          s[p][k] = 1;  // S2(0,0) = 1
        } else if (k == 0) {
          s[p][k] = 0;
        } else {
          s[p][k] = s[p - 1][k - 1] +
                    BigInt(k) * (k <= p - 1 ? s[p - 1][k] : BigInt(0));
        }
      }
    }
    return s;
  }();
  return table;
}

// F_p(m) = sum_{v=0}^{m} v^p for m >= -1 (empty sum for m = -1), using
// sum C(v,k) = C(m+1,k+1):  F_p(m) = sum_k S2(p,k) k! C(m+1, k+1).
BigInt nonneg_prefix_power_sum(long long m, int p) {
  if (m < 0) return 0;
  const auto& s2 = stirling2();
  BigInt total = 0;
  BigInt binom = BigInt(m + 1);  // C(m+1, 1)
  BigInt kfact = 1;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) {
      kfact *= k;
      // C(m+1, k+1) = C(m+1, k) * (m+1-k) / (k+1)
      binom = binom * BigInt(m + 1 - k) / BigInt(k + 1);
    }
    total += s2[p][k] * kfact * binom;
  }
  return total;
}

}  // namespace

BigInt interval_power_sum(long long lo, long long hi, int p) {
  if (p > kMaxPower) {
    throw LozError(ErrCode::CapExceeded,
                   "power " + std::to_string(p) + " exceeds table limit", p);
  }
  if (lo >= hi) return 0;
  // Sum over v in [lo+1, hi]; negative parts via v -> -v.
  const long long a = lo + 1, b = hi;
  BigInt total = 0;
  if (b >= 0) {
    long long a0 = std::max(a, 0LL);
    total += nonneg_prefix_power_sum(b, p) - nonneg_prefix_power_sum(a0 - 1, p);
  }
  if (a < 0) {
    long long b0 = std::min(b, -1LL);
    BigInt neg = nonneg_prefix_power_sum(-a, p) - nonneg_prefix_power_sum(-b0 - 1, p);
    total += (p % 2 == 0) ? neg : -neg;
  }
  return total;
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>>& m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < n; ++i) {
        if (m[i][k] != 0) {
          swap_row = i;
          break;
        }
      }
      if (swap_row < 0) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod_u64(u64 a, u64 b, u64 p) { return (u64)((u128)a * b % p); }

u64 powmod_u64(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, p);
    a = mulmod_u64(a, a, p);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Shared pool of 62-bit primes, grown on demand.
const u64& crt_prime(std::size_t idx) {
  static std::vector<u64> pool;
  static u64 next_candidate = (u64(1) << 62) - 1;
  while (pool.size() <= idx) {
    while (!is_prime_u64(next_candidate)) next_candidate -= 2;
    pool.push_back(next_candidate);
    next_candidate -= 2;
  }
  return pool[idx];
}

u64 mod_u64(const BigInt& a, u64 p) {
  BigInt r = a % p;
  if (r < 0) r += p;
  return r.convert_to<u64>();
}

u64 det_mod_p(const std::vector<std::vector<BigInt>>& m, u64 p) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<u64>> a(n, std::vector<u64>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = mod_u64(m[i][j], p);
  u64 det = 1;
  bool neg = false;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i) {
      if (a[i][k] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      neg = !neg;
    }
    det = mulmod_u64(det, a[k][k], p);
    const u64 inv = powmod_u64(a[k][k], p - 2, p);
    for (int i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      const u64 f = mulmod_u64(a[i][k], inv, p);
      for (int j = k; j < n; ++j) {
        u64 sub = mulmod_u64(f, a[k][j], p);
        a[i][j] = a[i][j] >= sub ? a[i][j] - sub : a[i][j] + p - sub;
      }
    }
  }
  return neg ? (det == 0 ? 0 : p - det) : det;
}

}  // namespace

BigInt crt_determinant(const std::vector<std::vector<BigInt>>& m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  // Hadamard bound in bits: prod_i ||row_i||_2 with ||.||_2 bounded by
  // sqrt(n) * max|entry|.
  double bits = 2;
  for (int i = 0; i < n; ++i) {
    unsigned mx = 0;
    bool all_zero = true;
    for (int j = 0; j < n; ++j) {
      if (m[i][j] != 0) {
        all_zero = false;
        mx = std::max(mx, boost::multiprecision::msb(abs(m[i][j])));
      }
    }
    if (all_zero) return 0;
    bits += mx + 1 + 0.5 * std::log2(double(n));
  }
  const std::size_t count = (std::size_t)(bits / 61.9) + 1;
  BigInt x = 0, prod = 1;
  for (std::size_t i = 0; i < count; ++i) {
    const u64 p = crt_prime(i);
    const u64 r = det_mod_p(m, p);
    // lift: x += prod * ((r - x) * prod^-1 mod p)
    const u64 delta =
        mulmod_u64((r + p - mod_u64(x, p)) % p,
                   powmod_u64(mod_u64(prod, p), p - 2, p), p);
    x += prod * delta;
    prod *= p;
  }
  if (2 * x > prod) x -= prod;
  return x;
}

BigInt partial_vandermonde_sum(const std::vector<VSlot>& slots) {
  const int n = static_cast<int>(slots.size());
  if (n == 0) return 1;
  for (const auto& s : slots) {
    if (s.empty()) return 0;
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (!(slots[i].min_value() > slots[i + 1].max_value())) {
      throw LozError(ErrCode::InconsistentOrdering,
                     "slot " + std::to_string(i) +
                         " does not dominate slot " + std::to_string(i + 1),
                     i);
    }
  }
  // Row i = power sums (exponents n-1 down to 0) of slot i; by
  // multilinearity det = sum over free choices of det[y_i^{n-1-j}], and the
  // latter is the Vandermonde product for decreasing y.
  std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i) {
    if (slots[i].is_fixed) {
      BigInt pw = 1;
      for (int j = n - 1; j >= 0; --j) {
        m[i][j] = pw;
        if (j > 0) pw *= BigInt(slots[i].value);
      }
    } else {
      for (int j = 0; j < n; ++j) {
        m[i][j] = interval_power_sum(slots[i].lo, slots[i].hi, n - 1 - j);
      }
    }
  }
  // Bareiss wins for small matrices; its intermediate growth makes CRT the
  // better tool beyond a dozen rows.
  if (n <= 12) return bareiss_determinant(m);
  return crt_determinant(m);
}

BigInt partial_vandermonde_sum(
    const std::vector<long long>& fixed,
    const std::vector<std::pair<long long, long long>>& free_intervals) {
  std::vector<VSlot> slots;
  for (long long v : fixed) slots.push_back(VSlot::fixed(v));
  for (auto [lo, hi] : free_intervals) slots.push_back(VSlot::interval(lo, hi));
  std::sort(slots.begin(), slots.end(), [](const VSlot& a, const VSlot& b) {
    return a.max_value() > b.max_value();
  });
  return partial_vandermonde_sum(slots);
}

}  // namespace loz
