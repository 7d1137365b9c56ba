#include "robenv/exactmath.hpp"

#include <algorithm>
#include <string>

#include "robenv/error.hpp"

namespace robenv {
namespace {

void require_probability(const ExactRational& p) {
  if (p <= 0 || p >= 1) {
    throw Error(ErrorCode::InvalidArgument, "success probability must lie in (0,1)");
  }
}

BigInt pow_big(const BigInt& base, unsigned long e) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace

void TailQuery::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tail query needs n >= 1");
  require_probability(p);
}

BigInt binom(long n, long k) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "binom needs n >= 1");
  if (k < 0 || k > n) return BigInt(0);
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

BinomialTails::BinomialTails(long n, const ExactRational& p) : n_(n), p_(p) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "binomial tails need n >= 1");
  require_probability(p);
  const BigInt a = p.get_num();
  const BigInt b = p.get_den();
  const BigInt q = b - a;
  denominator_ = pow_big(b, static_cast<unsigned long>(n));

  cumulative_.resize(static_cast<std::size_t>(n) + 1);
  // Term i is C(n,i) a^i q^(n-i); walk a^i upward and q^(n-i) from a table.
  std::vector<BigInt> q_pow(static_cast<std::size_t>(n) + 1);
  q_pow[0] = 1;
  for (long i = 1; i <= n; ++i) q_pow[i] = q_pow[i - 1] * q;
  BigInt a_pow = 1;
  BigInt running = 0;
  for (long i = 0; i <= n; ++i) {
    running += binom(n, i) * a_pow * q_pow[n - i];
    cumulative_[i] = running;
    a_pow *= a;
  }
}

const BigInt& BinomialTails::tail_numerator(long k) const {
  if (k < 0) return zero_;
  if (k >= n_) return cumulative_.back();
  return cumulative_[static_cast<std::size_t>(k)];
}

ExactRational BinomialTails::tail(long k) const {
  return make_rational(tail_numerator(k), denominator_);
}

ExactRational binomial_tail(const TailQuery& q) {
  q.validate();
  if (q.k < 0) return ExactRational(0);
  if (q.k >= q.n) return ExactRational(1);
  return BinomialTails(q.n, q.p).tail(q.k);
}

bool mode_bound_holds(long n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mode bound needs n >= 1");
  const BigInt c = binom(n, n / 2);
  BigInt four_n;
  mpz_ui_pow_ui(four_n.get_mpz_t(), 4, static_cast<unsigned long>(n));
  return c * c * n < four_n;
}

ExactRational tail_ratio(const BinomialTails& tails, long k, long x) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "tail ratio needs k >= 1");
  if (x < 0 || x > tails.n()) throw Error(ErrorCode::InvalidArgument, "tail ratio needs 0 <= x <= n");
  const BigInt& den = tails.tail_numerator(x);
  if (den == 0) throw Error(ErrorCode::ZeroDenominator, "U(x) = 0");
  return make_rational(tails.tail_numerator(x - k), den);
}

ExactRational tail_ratio(long n, long k, const ExactRational& p, long x) {
  return tail_ratio(BinomialTails(n, p), k, x);
}

HoeffdingCheck hoeffding_ratio_check(const BinomialTails& tails, long k, long r) {
  const long n = tails.n();
  if (!(n > r && r >= k && k >= 1)) {
    throw Error(ErrorCode::PreconditionViolated, "need n > r >= k >= 1");
  }
  if (tails.tail(r) > ExactRational(1, 2)) {
    throw Error(ErrorCode::PreconditionViolated,
                "U(r) > 1/2 at n=" + std::to_string(n) + " r=" + std::to_string(r));
  }
  HoeffdingCheck out;
  out.ratio = tail_ratio(tails, k, r);
  const ExactRational exponent = make_rational(BigInt(-2) * (k - 1) * (k - 1), BigInt(n));
  out.bound = scale_enclosure(exp_enclosure(exponent), ExactRational(2));
  switch (less_equal(out.ratio, out.bound)) {
    case Verdict::Holds: out.holds = true; break;
    case Verdict::Fails: out.holds = false; break;
    case Verdict::Undecided:
      throw Error(ErrorCode::PrecisionInsufficient, "hoeffding ratio within rounding of the bound");
  }
  return out;
}

bool hoeffding_ratio_holds(long n, long k, const ExactRational& p, long r) {
  return hoeffding_ratio_check(BinomialTails(n, p), k, r).holds;
}

Real binomial_tail_real(long n, const Real& p, long k) {
  if (k < 0) return Real(0);
  if (k >= n) return Real(1);
  const Real q = 1 - p;
  Real sum = 0;
  for (long i = 0; i <= k; ++i) {
    sum += Real(binom(n, i).get_str()) * pow(p, i) * pow(q, n - i);
  }
  return sum;
}

Real solve_p_for_tail(long n, long r, const ExactRational& target, double tol) {
  if (target <= 0 || target >= 1) {
    throw Error(ErrorCode::NoSolution, "tail target must lie in (0,1)");
  }
  if (r < 0 || r >= n) throw Error(ErrorCode::InvalidArgument, "need 0 <= r < n");
  const Real goal = to_real(target);
  Real lo = 0;  // U(lo) > goal
  Real hi = 1;  // U(hi) < goal
  for (int iter = 0; iter < 400; ++iter) {
    const Real mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    if (binomial_tail_real(n, mid, r) > goal) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Real p = (lo + hi) / 2;
  if (abs(binomial_tail_real(n, p, r) - goal) > Real(tol)) {
    throw Error(ErrorCode::NoSolution, "bisection did not reach the requested tolerance");
  }
  return p;
}

HarperRhs harper_rhs_detail(long n, long k, const ExactRational& frac, double tol) {
  if (frac <= 0 || frac > 1) throw Error(ErrorCode::InvalidArgument, "need 0 < frac <= 1");
  HarperRhs out;
  if (k == 0) {
    out.value = to_real(frac);
    return out;
  }
  if (k < 1 || k >= n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < n");
  bool found = false;
  for (long r = 0; r < n - k; ++r) {
    Real p;
    try {
      p = solve_p_for_tail(n, r, frac, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSolution) throw;
      out.skipped_r.push_back(r);
      continue;
    }
    const Real v = binomial_tail_real(n, p, r + k);
    if (!found || v < out.value) {
      out.value = v;
      out.argmin_r = r;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::NoFeasibleR, "no r admits a tail solution");
  return out;
}

Real harper_rhs(long n, long k, const ExactRational& frac, double tol) {
  return harper_rhs_detail(n, k, frac, tol).value;
}

}  // namespace robenv
