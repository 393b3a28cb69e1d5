#pragma once

// Exact fractions for the combinatorial layer: boundary-circle partitions,
// marked-point positions, horizontal trace bookkeeping.  Everything metric
// (cell areas, cycle lengths, QP data) lives in doubles; the rationals exist
// so that gluing validation and cover surgery never accumulate drift.

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

#include "elk/types.hpp"

namespace elk {

using Frac = boost::rational<long long>;

// Accepts "3/4", "-2", "0.125", "1e-3" style strings.  Plain decimals are
// converted digit-exactly; inputs that overflow long long fall back to a
// continued-fraction snap of the double value.
Frac frac_parse(const std::string& s);

// "n/d" for non-integers, plain "n" otherwise.
std::string frac_format(const Frac& f);

// Nearest rational with denominator <= max_den whose value is within rel_tol
// of x (continued-fraction convergents).  Throws if nothing qualifies.
Frac frac_from_double(double x, double rel_tol = 1e-9, long long max_den = (1LL << 31));

inline double frac_to_double(const Frac& f) {
  return static_cast<double>(f.numerator()) / static_cast<double>(f.denominator());
}

Frac frac_floor(const Frac& f);  // largest integer <= f, as a Frac

// Representative in [0,1).
Frac frac_mod1(const Frac& f);

}  // namespace elk
