// Integer polynomials for the critical equation of the discrete action:
// clearing denominators of the logarithmic derivative gives a polynomial
// whose non-real roots (none or a conjugate pair) decide liquid points,
// and whose real roots obey a rigid one-per-gap structure used both for
// fast isolation and for exact counting.
#pragma once

#include <utility>
#include <vector>

#include "loz/bigint.hpp"
#include "loz/core.hpp"

namespace loz {

// Coefficients in increasing degree; trailing zeros trimmed, so
// c.empty() means the zero polynomial.
struct BigPoly {
    std::vector<BigInt> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }
};

void trim(BigPoly& p);
BigPoly derivative(const BigPoly& p);
// Sign of p(num/den), den > 0, exactly.
int sign_at(const BigPoly& p, const BigInt& num, const BigInt& den);

// The poles of the discrete logarithmic derivative at (t, x, n), after
// cancelling the ones shared by both sums.  plus holds the surviving
// interval poles {x-a} not in t; minus_left / minus_right hold the top-row
// poles outside [x-N+n, x-1], split by side.
struct PoleClasses {
    std::vector<long long> plus;        // increasing
    std::vector<long long> minus_left;  // increasing, all < x-N+n
    std::vector<long long> minus_right; // increasing, all >= x
};

PoleClasses critical_poles(const Signature& t, long long x, int n);

// Numerator of the cleared logarithmic derivative: sum over plus poles of
// prod(z - q) over the other poles, minus the same sum over minus poles.
// Degree is (total poles) - 1 with leading coefficient -n.
BigPoly critical_polynomial(const Signature& t, long long x, int n);

// Exact number of distinct real roots (Sturm count over the reals).
int count_distinct_real_roots(const BigPoly& p);
// Distinct real roots inside the open interval (a, b), integer endpoints
// that must not be roots themselves.
int count_distinct_real_roots_in(const BigPoly& p, long long a, long long b);
// Real roots counted with multiplicity.
int count_real_roots_with_multiplicity(const BigPoly& p);

// Summary of the root structure of the critical polynomial.
struct RootStructure {
    int degree = 0;
    int real_distinct = 0;
    int real_with_multiplicity = 0;
    int nonreal = 0;  // degree - real_with_multiplicity
    // disjoint open dyadic intervals, each holding at least one real root,
    // found by sign changes inside same-class gaps
    std::vector<std::pair<double, double>> isolated;
};

RootStructure analyze_critical_polynomial(const Signature& t, long long x,
                                          int n);

}  // namespace loz
