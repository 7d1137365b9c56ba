#pragma once

// Exact probability mass functions on contiguous integer grids.

#include <cstddef>
#include <vector>

#include "robenv/real.hpp"

namespace robenv {

inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 24;

// Masses are held as integer weights over one shared denominator; the
// weights always sum to the denominator exactly.
class DiscretePMF {
 public:
  DiscretePMF(long offset, std::vector<BigInt> weights, BigInt denominator);

  static DiscretePMF from_masses(long offset, const std::vector<ExactRational>& masses);
  static DiscretePMF point_mass(long at);

  long offset() const { return offset_; }
  long last() const { return offset_ + static_cast<long>(weights_.size()) - 1; }
  std::size_t size() const { return weights_.size(); }

  ExactRational mass_at(long value) const;
  std::vector<ExactRational> masses() const;
  // Pr[X <= value].
  ExactRational cdf(long value) const;
  BigInt cdf_weight(long value) const;

  // Symmetric about the origin.
  bool is_symmetric() const;

  const std::vector<BigInt>& weights() const { return weights_; }
  const BigInt& denominator() const { return denominator_; }

 private:
  long offset_;
  std::vector<BigInt> weights_;
  BigInt denominator_;
};

// Uniform on {0, ..., levels-1}.
DiscretePMF pmf_uniform_levels(long levels);

DiscretePMF convolve(const DiscretePMF& a, const DiscretePMF& b,
                     std::size_t support_cap = kDefaultSupportCap);

// Distribution of the sum of `count` independent copies of `base`.
DiscretePMF pmf_iid_sum(const DiscretePMF& base, long count,
                        std::size_t support_cap = kDefaultSupportCap);

struct SpreadCheck {
  ExactRational lhs;  // Pr[X + Y <= t]
  ExactRational rhs;  // Pr[X < t]
  bool holds = false;
};

// X ~ Binomial(n, 1/2), Y independent with values (offset + i) / y_grid_denominator.
// Requires Y symmetric about 0, t - floor(t) = 1/2 and t < n/2.
SpreadCheck binomial_spread_check(long n, const DiscretePMF& sym_y, long y_grid_denominator,
                                  const ExactRational& t);
bool binomial_spread_holds(long n, const DiscretePMF& sym_y, const ExactRational& t,
                           long y_grid_denominator = 1);

struct AntiConcentrationCheck {
  ExactRational lhs;  // Pr[sum X_i <= n E[X] - t + 1]
  double rhs = 0.0;   // 1/2 - 2t/sqrt(n), for reporting only
  bool holds = false;
};

// X_i uniform on `levels` evenly spaced points of [0,1] (levels even).
// The comparison with 1/2 - 2t/sqrt(n) is decided exactly by squaring.
AntiConcentrationCheck anti_concentration_check(const DiscretePMF& level_sum, long n, long levels,
                                                const ExactRational& t);
bool anti_concentration_holds(long n, long levels, double t,
                              std::size_t support_cap = kDefaultSupportCap);

}  // namespace robenv
