#include "robenv/real.hpp"

#include <cmath>
#include <vector>

#include <mpfr.h>

#include "robenv/error.hpp"

namespace robenv {
namespace {

mpfr_ptr raw(Real& x) { return x.backend().data(); }
mpfr_srcptr raw(const Real& x) { return x.backend().data(); }

}  // namespace

ExactRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorCode::ZeroDenominator, "rational with zero denominator");
  ExactRational q(num, den);
  q.canonicalize();
  return q;
}

ExactRational exact_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  ExactRational q(x);  // mpq_set_d is exact
  return q;
}

// Correctly rounded; mpq get_d truncates.
double to_double(const ExactRational& q) {
  mpfr_t t;
  mpfr_init2(t, 53);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

Real to_real(const ExactRational& q) {
  Real r;
  mpfr_set_q(raw(r), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real real_from_double(double x) {
  Real r;
  mpfr_set_d(raw(r), x, MPFR_RNDN);
  return r;
}

Enclosure enclose(const ExactRational& q) {
  Enclosure e;
  mpfr_set_q(raw(e.lo), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(raw(e.hi), q.get_mpq_t(), MPFR_RNDU);
  return e;
}

Enclosure exp_enclosure(const ExactRational& x) {
  Enclosure arg = enclose(x);
  Enclosure e;
  mpfr_exp(raw(e.lo), raw(arg.lo), MPFR_RNDD);
  mpfr_exp(raw(e.hi), raw(arg.hi), MPFR_RNDU);
  return e;
}

Enclosure scale_enclosure(const Enclosure& e, const ExactRational& f) {
  if (f < 0) throw Error(ErrorCode::InvalidArgument, "negative enclosure scale");
  Enclosure out;
  mpfr_mul_q(raw(out.lo), raw(e.lo), f.get_mpq_t(), MPFR_RNDD);
  mpfr_mul_q(raw(out.hi), raw(e.hi), f.get_mpq_t(), MPFR_RNDU);
  return out;
}

Enclosure div_enclosure(const Enclosure& num, const Enclosure& den) {
  if (!(den.lo > 0) || num.lo < 0) {
    throw Error(ErrorCode::PrecisionInsufficient, "enclosure division needs positive operands");
  }
  Enclosure out;
  mpfr_div(raw(out.lo), raw(num.lo), raw(den.hi), MPFR_RNDD);
  mpfr_div(raw(out.hi), raw(num.hi), raw(den.lo), MPFR_RNDU);
  return out;
}

Verdict less_than(const ExactRational& a, const Enclosure& e) {
  if (mpfr_cmp_q(raw(e.lo), a.get_mpq_t()) > 0) return Verdict::Holds;
  if (mpfr_cmp_q(raw(e.hi), a.get_mpq_t()) <= 0) return Verdict::Fails;
  return Verdict::Undecided;
}

Verdict less_equal(const ExactRational& a, const Enclosure& e) {
  if (mpfr_cmp_q(raw(e.lo), a.get_mpq_t()) >= 0) return Verdict::Holds;
  if (mpfr_cmp_q(raw(e.hi), a.get_mpq_t()) < 0) return Verdict::Fails;
  return Verdict::Undecided;
}

Verdict less_than(const Enclosure& a, const Enclosure& b) {
  if (a.hi < b.lo) return Verdict::Holds;
  if (a.lo >= b.hi) return Verdict::Fails;
  return Verdict::Undecided;
}

long long floor_scaled_sqrt(double c, unsigned long long m) {
  if (!(c >= 0)) throw Error(ErrorCode::InvalidArgument, "floor_scaled_sqrt needs c >= 0");
  // Largest integer k with k^2 <= c^2 m.
  const ExactRational target = exact_from_double(c) * exact_from_double(c) * BigInt(std::to_string(m));
  long long k = static_cast<long long>(std::floor(c * std::sqrt(static_cast<double>(m))));
  if (k < 0) k = 0;
  while (k > 0 && ExactRational(BigInt(static_cast<long>(k)) * static_cast<long>(k)) > target) --k;
  while (ExactRational(BigInt(static_cast<long>(k + 1)) * static_cast<long>(k + 1)) <= target) ++k;
  return k;
}

std::string format_significant(const Real& x, int digits) {
  std::vector<char> buf(64 + static_cast<std::size_t>(digits));
  mpfr_snprintf(buf.data(), buf.size(), "%.*RNg", digits, raw(x));
  return std::string(buf.data());
}

}  // namespace robenv
