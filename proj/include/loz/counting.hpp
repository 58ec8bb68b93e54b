// Exact counting of GT patterns: the Weyl dimension product, exhaustive
// enumeration (the oracle the rest of the library is tested against), and
// partial Vandermonde sums, which are the workhorse of the exact sampler.
#pragma once

#include <functional>
#include <vector>

#include "loz/bigint.hpp"
#include "loz/core.hpp"

namespace loz {

// Number of GT patterns with top row t: prod_{i<j}(l_i - l_j) / prod (j - i).
BigInt gt_dimension(const Signature& t);

// Calls visit for every pattern with top row t; stop early by returning
// false.  Throws CapExceeded (message carries the dimension) if
// gt_dimension(t) > cap.
void enumerate_patterns(const Signature& t,
                        const std::function<bool(const GTPattern&)>& visit,
                        long long cap = 10'000'000);

std::vector<GTPattern> all_patterns(const Signature& t,
                                    long long cap = 10'000'000);

// One coordinate of a partial Vandermonde sum: either pinned to a value or
// free over the integer interval (lo, hi] -- the (exclusive, inclusive]
// convention matches the interlacing constraint z_j in (y_{j+1}, y_j].
struct VSlot {
  bool is_fixed;
  long long value;   // when fixed
  long long lo, hi;  // when free

  static VSlot fixed(long long v) { return {true, v, 0, 0}; }
  static VSlot interval(long long lo, long long hi) {
    return {false, 0, lo, hi};
  }
  bool empty() const { return !is_fixed && lo >= hi; }
  long long min_value() const { return is_fixed ? value : lo + 1; }
  long long max_value() const { return is_fixed ? value : hi; }
};

// Sum over all choices of the free coordinates inside their intervals of
// prod_{i<j}(y_i - y_j), coordinates listed left to right in decreasing
// order.  Slots must be strictly ordered (min of each > max of the next);
// otherwise InconsistentOrdering.  An empty free interval gives 0.
//
// Evaluated exactly as det of the matrix whose row i holds the power sums
// y^{n-1}, ..., y^0 of slot i (multilinearity of det in rows), by Bareiss
// fraction-free elimination.
BigInt partial_vandermonde_sum(const std::vector<VSlot>& slots);

// Spec-facing convenience: fixed values plus free intervals, merged into a
// single decreasing slot list by value.
BigInt partial_vandermonde_sum(const std::vector<long long>& fixed,
                               const std::vector<std::pair<long long, long long>>& free_intervals);

// Per-coordinate intervals for a row interlacing below `upper`:
// result[j] = (upper[j+1], upper[j]].
std::vector<std::pair<long long, long long>> interlacing_intervals(
    const std::vector<long long>& upper);

// Sum_{v = lo+1}^{hi} v^p, exact, any 64-bit bounds (closed form in the
// binomial basis, so wide intervals cost the same as narrow ones).
BigInt interval_power_sum(long long lo, long long hi, int p);

// Fraction-free determinant of an integer matrix (Bareiss).  The matrix is
// consumed.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>>& m);

// Exact determinant of an integer matrix by Chinese remaindering over
// 62-bit primes.  Much faster than Bareiss once the matrix is larger than
// a dozen rows or the entries grow past a few words.
BigInt crt_determinant(const std::vector<std::vector<BigInt>>& m);

}  // namespace loz
