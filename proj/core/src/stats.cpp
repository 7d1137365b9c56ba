#include "robenv/stats.hpp"

#include <algorithm>
#include <cmath>

#include "robenv/error.hpp"

namespace robenv {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "wilson interval needs trials > 0");
  if (successes > trials) throw Error(ErrorCode::InvalidArgument, "successes exceed trials");
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Exact endpoints at the extremes.
  if (successes == 0) out.lo = 0.0;
  if (successes == trials) out.hi = 1.0;
  return out;
}

}  // namespace robenv
