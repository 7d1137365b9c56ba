#pragma once

// Extended-precision reals and certified enclosures.
//
// Real is an MPFR-backed float with ~168 bits of mantissa. Enclosure is a
// closed interval [lo, hi] produced with directed rounding, so it is
// guaranteed to contain the exact value it stands for.

#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

namespace robenv {

using BigInt = mpz_class;
using ExactRational = mpq_class;

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>,
                                           boost::multiprecision::et_off>;

enum class Verdict { Holds, Fails, Undecided };

struct Enclosure {
  Real lo;
  Real hi;

  Real width() const { return hi - lo; }
  Real mid() const { return (lo + hi) / 2; }
};

ExactRational make_rational(const BigInt& num, const BigInt& den);
ExactRational exact_from_double(double x);
double to_double(const ExactRational& q);

Real to_real(const ExactRational& q);
Real real_from_double(double x);

Enclosure enclose(const ExactRational& q);
Enclosure exp_enclosure(const ExactRational& x);
// [lo, hi] * f for f >= 0.
Enclosure scale_enclosure(const Enclosure& e, const ExactRational& f);
Enclosure div_enclosure(const Enclosure& num, const Enclosure& den);  // den > 0, num >= 0

// a < e, decided against the whole interval.
Verdict less_than(const ExactRational& a, const Enclosure& e);
Verdict less_equal(const ExactRational& a, const Enclosure& e);
Verdict less_than(const Enclosure& a, const Enclosure& b);

// Floor of c * sqrt(m) for c >= 0, computed exactly (m^2 c^2 comparison).
long long floor_scaled_sqrt(double c, unsigned long long m);

// Round-to-nearest decimal rendering with `digits` significant digits.
std::string format_significant(const Real& x, int digits);

}  // namespace robenv
