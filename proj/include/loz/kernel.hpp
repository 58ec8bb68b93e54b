// Exact determinantal correlation kernel for uniform Gelfand-Tsetlin
// patterns with fixed top row, plus an enumeration-based oracle.
#pragma once

#include "loz/bigint.hpp"
#include "loz/core.hpp"

#include <utility>
#include <vector>

namespace loz {

// A correlation query: does a horizontal lozenge sit at each (x, level)?
// Levels must satisfy 1 <= level < N; points must be pairwise distinct.
struct KernelQuery {
    Signature t;
    std::vector<std::pair<long long, int>> points;
};

// Kernel entry K(x1,n1; x2,n2) as an exact rational.  The double contour
// integral is evaluated as a finite residue sum, see kernel.cpp.
BigRat kernel_exact(const Signature& t, long long x1, int n1, long long x2,
                    int n2);

// Probability that every queried position carries a horizontal lozenge,
// as det[K(p_i, p_j)].  Empty query yields 1.
BigRat correlation(const KernelQuery& q);

// Same probability by exhaustive enumeration of all patterns.  Throws
// CapExceeded if the pattern count exceeds `cap`.
BigRat correlation_bruteforce(const KernelQuery& q,
                              long long cap = 10'000'000);

// Determinant of a rational matrix, exact.  Consumes its argument.
BigRat rational_determinant(std::vector<std::vector<BigRat>> m);

// Rising factorial a(a+1)...(a+k-1); k = 0 gives 1.
BigInt pochhammer(const BigInt& a, int k);
BigInt factorial(int n);

}  // namespace loz
