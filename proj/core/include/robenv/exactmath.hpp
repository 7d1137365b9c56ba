#pragma once

// Exact binomial combinatorics and the scalar inequalities built on them.
//
// U_{n,p}(k) below always means the lower binomial tail
//   sum_{i=0}^{k} C(n,i) p^i (1-p)^(n-i),
// which is 0 for k < 0 and 1 for k >= n.

#include <optional>
#include <vector>

#include "robenv/real.hpp"

namespace robenv {

struct TailQuery {
  long n = 1;  // trial count, >= 1
  long k = 0;  // tail cutoff, any integer
  ExactRational p{1, 2};

  void validate() const;
};

// C(n, k) for n >= 1; zero outside 0 <= k <= n.
BigInt binom(long n, long k);

ExactRational binomial_tail(const TailQuery& q);

// All tails U_{n,p}(0..n) for one (n, p), kept over the common denominator
// den^n where p = num/den, so ratios of tails are ratios of integers.
class BinomialTails {
 public:
  BinomialTails(long n, const ExactRational& p);

  long n() const { return n_; }
  const ExactRational& p() const { return p_; }

  // U_{n,p}(k) for any integer k.
  ExactRational tail(long k) const;
  // Numerator of tail(k) over denominator().
  const BigInt& tail_numerator(long k) const;
  const BigInt& denominator() const { return denominator_; }

 private:
  long n_;
  ExactRational p_;
  std::vector<BigInt> cumulative_;  // cumulative_[k] for 0 <= k <= n
  BigInt denominator_;
  BigInt zero_{0};
};

// C(n, floor(n/2))^2 * n < 4^n, decided on exact integers.
bool mode_bound_holds(long n);

// U_{n,p}(x-k) / U_{n,p}(x). Requires 0 <= x <= n and k >= 1.
ExactRational tail_ratio(long n, long k, const ExactRational& p, long x);
ExactRational tail_ratio(const BinomialTails& tails, long k, long x);

struct HoeffdingCheck {
  ExactRational ratio;  // U(r-k)/U(r)
  Enclosure bound;      // 2 exp(-2 (k-1)^2 / n)
  bool holds = false;
};

// Requires n > r >= k >= 1 and U_{n,p}(r) <= 1/2.
HoeffdingCheck hoeffding_ratio_check(const BinomialTails& tails, long k, long r);
bool hoeffding_ratio_holds(long n, long k, const ExactRational& p, long r);

// U_{n,p}(k) evaluated at a real p.
Real binomial_tail_real(long n, const Real& p, long k);

// p in (0,1) with |U_{n,p}(r) - target| <= tol, by bisection on the strictly
// decreasing map p -> U_{n,p}(r). Requires 0 <= r < n.
Real solve_p_for_tail(long n, long r, const ExactRational& target, double tol);

struct HarperRhs {
  Real value;
  long argmin_r = -1;
  std::vector<long> skipped_r;  // r for which no p solves the tail equation
};

// min over integer r in [0, n-k) of U_{n,p_r}(r+k) with U_{n,p_r}(r) = frac.
// k = 0 returns frac.
HarperRhs harper_rhs_detail(long n, long k, const ExactRational& frac, double tol);
Real harper_rhs(long n, long k, const ExactRational& frac, double tol);

}  // namespace robenv
