#ifndef AM_NUMERIC_HPP
#define AM_NUMERIC_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace am {

// Pointer totals are bounded by m^2 * 2^n, which can exceed 64 bits for
// large data sets; all pointer arithmetic is arbitrary precision and all
// probabilities are exact rationals. Decimal output is a rendering concern.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

} // namespace am

#endif
