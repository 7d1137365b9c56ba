#include "robenv/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robenv/error.hpp"
#include "robenv/exactmath.hpp"

namespace robenv {
namespace {

BigInt floor_of(const ExactRational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

long to_long(const BigInt& v) {
  if (!v.fits_slong_p()) throw Error(ErrorCode::InvalidArgument, "value outside the integer grid");
  return v.get_si();
}

}  // namespace

DiscretePMF::DiscretePMF(long offset, std::vector<BigInt> weights, BigInt denominator)
    : offset_(offset), weights_(std::move(weights)), denominator_(std::move(denominator)) {
  if (weights_.empty()) throw Error(ErrorCode::InvalidArgument, "empty support");
  if (denominator_ <= 0) throw Error(ErrorCode::ZeroDenominator, "pmf denominator must be positive");
  BigInt total = 0;
  for (const auto& w : weights_) {
    if (w < 0) throw Error(ErrorCode::InvalidArgument, "negative mass");
    total += w;
  }
  if (total != denominator_) throw Error(ErrorCode::InvalidArgument, "masses do not sum to 1");
}

DiscretePMF DiscretePMF::from_masses(long offset, const std::vector<ExactRational>& masses) {
  BigInt den = 1;
  for (const auto& m : masses) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m.get_den_mpz_t());
  std::vector<BigInt> weights;
  weights.reserve(masses.size());
  for (const auto& m : masses) weights.push_back(m.get_num() * (den / m.get_den()));
  return DiscretePMF(offset, std::move(weights), std::move(den));
}

DiscretePMF DiscretePMF::point_mass(long at) { return DiscretePMF(at, {BigInt(1)}, BigInt(1)); }

ExactRational DiscretePMF::mass_at(long value) const {
  if (value < offset_ || value > last()) return ExactRational(0);
  return make_rational(weights_[static_cast<std::size_t>(value - offset_)], denominator_);
}

std::vector<ExactRational> DiscretePMF::masses() const {
  std::vector<ExactRational> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) out.push_back(make_rational(w, denominator_));
  return out;
}

BigInt DiscretePMF::cdf_weight(long value) const {
  if (value < offset_) return BigInt(0);
  if (value >= last()) return denominator_;
  BigInt sum = 0;
  for (long v = offset_; v <= value; ++v) sum += weights_[static_cast<std::size_t>(v - offset_)];
  return sum;
}

ExactRational DiscretePMF::cdf(long value) const { return make_rational(cdf_weight(value), denominator_); }

bool DiscretePMF::is_symmetric() const {
  if (offset_ != -last()) return false;
  return std::equal(weights_.begin(), weights_.end(), weights_.rbegin());
}

DiscretePMF pmf_uniform_levels(long levels) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
  return DiscretePMF(0, std::vector<BigInt>(static_cast<std::size_t>(levels), BigInt(1)), BigInt(levels));
}

namespace {

bool flat(const std::vector<BigInt>& w) {
  return std::all_of(w.begin(), w.end(), [&](const BigInt& x) { return x == w.front(); });
}

// Convolution with `len` equal weights: a sliding window sum, linear in the support.
std::vector<BigInt> window_sum(const std::vector<BigInt>& a, std::size_t len) {
  std::vector<BigInt> out(a.size() + len - 1);
  BigInt run = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k < a.size()) run += a[k];
    if (k >= len) run -= a[k - len];
    out[k] = run;
  }
  return out;
}

void check_width(std::size_t width, std::size_t support_cap) {
  if (width > support_cap) {
    throw Error(ErrorCode::SupportCapExceeded,
                "support of " + std::to_string(width) + " points exceeds cap " + std::to_string(support_cap));
  }
}

}  // namespace

DiscretePMF convolve(const DiscretePMF& a, const DiscretePMF& b, std::size_t support_cap) {
  const std::size_t width = a.size() + b.size() - 1;
  check_width(width, support_cap);
  const long offset = a.offset() + b.offset();
  const BigInt denominator = a.denominator() * b.denominator();
  const auto& wa = a.weights();
  const auto& wb = b.weights();
  if (flat(wb) || flat(wa)) {
    const bool b_flat = flat(wb);
    const auto& other = b_flat ? wa : wb;
    const BigInt& w = b_flat ? wb.front() : wa.front();
    std::vector<BigInt> out = window_sum(other, b_flat ? wb.size() : wa.size());
    if (w != 1) {
      for (auto& x : out) x *= w;
    }
    return DiscretePMF(offset, std::move(out), denominator);
  }
  std::vector<BigInt> out(width, BigInt(0));
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (wa[i] == 0) continue;
    for (std::size_t j = 0; j < wb.size(); ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), wa[i].get_mpz_t(), wb[j].get_mpz_t());
    }
  }
  return DiscretePMF(offset, std::move(out), denominator);
}

DiscretePMF pmf_iid_sum(const DiscretePMF& base, long count, std::size_t support_cap) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  // Checked up front so an oversized request fails before any work.
  const double predicted = static_cast<double>(count) * static_cast<double>(base.size() - 1) + 1.0;
  if (predicted > static_cast<double>(support_cap)) {
    throw Error(ErrorCode::SupportCapExceeded,
                "sum of " + std::to_string(count) + " copies exceeds support cap " + std::to_string(support_cap));
  }
  const auto& w = base.weights();
  if (flat(w)) {
    // Repeated window sums beat powering here: each step is linear in the support.
    std::vector<BigInt> acc{BigInt(1)};
    for (long c = 0; c < count; ++c) acc = window_sum(acc, w.size());
    BigInt scale, denominator;
    mpz_pow_ui(scale.get_mpz_t(), w.front().get_mpz_t(), static_cast<unsigned long>(count));
    mpz_pow_ui(denominator.get_mpz_t(), base.denominator().get_mpz_t(), static_cast<unsigned long>(count));
    if (scale != 1) {
      for (auto& x : acc) x *= scale;
    }
    return DiscretePMF(base.offset() * count, std::move(acc), denominator);
  }
  // Binary powering; the product is order independent, so the result is exact.
  DiscretePMF result = DiscretePMF::point_mass(0);
  DiscretePMF power = base;
  bool have_result = false;
  for (long c = count; c > 0; c >>= 1) {
    if (c & 1) {
      result = have_result ? convolve(result, power, support_cap) : power;
      have_result = true;
    }
    if (c > 1) power = convolve(power, power, support_cap);
  }
  return result;
}

SpreadCheck binomial_spread_check(long n, const DiscretePMF& sym_y, long y_grid_denominator,
                                  const ExactRational& t) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  if (y_grid_denominator < 1) throw Error(ErrorCode::InvalidArgument, "grid denominator must be >= 1");
  if (!sym_y.is_symmetric()) throw Error(ErrorCode::AsymmetricY, "Y is not symmetric about 0");
  if (t - ExactRational(floor_of(t)) != ExactRational(1, 2)) {
    throw Error(ErrorCode::PreconditionViolated, "t must be a half-integer");
  }
  if (!(t < ExactRational(n, 2))) throw Error(ErrorCode::PreconditionViolated, "t must be below n/2");

  // Common denominator 2^n * den(Y); Y <= t - x  <=>  grid index <= floor((t - x) * scale).
  BigInt lhs_weight = 0;
  BigInt rhs_weight = 0;
  for (long x = 0; x <= n; ++x) {
    const BigInt cx = binom(n, x);
    const ExactRational cut = (t - x) * y_grid_denominator;
    lhs_weight += cx * sym_y.cdf_weight(to_long(floor_of(cut)));
    if (ExactRational(x) < t) rhs_weight += cx * sym_y.denominator();
  }
  BigInt den;
  mpz_mul_2exp(den.get_mpz_t(), sym_y.denominator().get_mpz_t(), static_cast<mp_bitcnt_t>(n));
  SpreadCheck out;
  out.lhs = make_rational(lhs_weight, den);
  out.rhs = make_rational(rhs_weight, den);
  out.holds = out.lhs >= out.rhs;
  return out;
}

bool binomial_spread_holds(long n, const DiscretePMF& sym_y, const ExactRational& t, long y_grid_denominator) {
  return binomial_spread_check(n, sym_y, y_grid_denominator, t).holds;
}

AntiConcentrationCheck anti_concentration_check(const DiscretePMF& level_sum, long n, long levels,
                                                const ExactRational& t) {
  if (levels < 2 || levels % 2 != 0) throw Error(ErrorCode::PreconditionViolated, "levels must be even and >= 2");
  if (!(t > 0)) throw Error(ErrorCode::PreconditionViolated, "t must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");

  // In grid units each X_i = j / (levels - 1); b - a = 1 and E[X_i] = 1/2.
  const ExactRational cutoff = (ExactRational(n, 2) - t + 1) * (levels - 1);
  AntiConcentrationCheck out;
  out.lhs = level_sum.cdf(to_long(floor_of(cutoff)));
  out.rhs = 0.5 - 2.0 * t.get_d() / std::sqrt(static_cast<double>(n));
  // lhs > 1/2 - 2t/sqrt(n)  <=>  2t/sqrt(n) > g  with g = 1/2 - lhs.
  const ExactRational gap = ExactRational(1, 2) - out.lhs;
  if (gap < 0) {
    out.holds = true;
  } else {
    out.holds = 4 * t * t > gap * gap * n;
  }
  return out;
}

bool anti_concentration_holds(long n, long levels, double t, std::size_t support_cap) {
  if (levels < 2 || levels % 2 != 0) throw Error(ErrorCode::PreconditionViolated, "levels must be even and >= 2");
  const DiscretePMF sum = pmf_iid_sum(pmf_uniform_levels(levels), n, support_cap);
  return anti_concentration_check(sum, n, levels, exact_from_double(t)).holds;
}

}  // namespace robenv
