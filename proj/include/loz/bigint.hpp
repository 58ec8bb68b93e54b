#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace loz {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt big_num(const BigRat& q) { return boost::multiprecision::numerator(q); }
inline BigInt big_den(const BigRat& q) { return boost::multiprecision::denominator(q); }

// cpp_rational's two-argument constructor rejects negative denominators, so
// build ratios through this instead.
inline BigRat make_rat(BigInt num, BigInt den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return BigRat(std::move(num), std::move(den));
}

}  // namespace loz
