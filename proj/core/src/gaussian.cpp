#include "robenv/gaussian.hpp"

#include <algorithm>
#include <cstdio>

#include <mpfr.h>

#include "robenv/error.hpp"

namespace robenv {
namespace {

mpfr_ptr raw(Real& x) { return x.backend().data(); }
mpfr_srcptr raw(const Real& x) { return x.backend().data(); }

std::string describe(const char* what, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s (%.17g, %.17g)", what, a, b);
  return buf;
}

Real exact_difference(double a, double b) {
  Real out;
  if (mpfr_sub(raw(out), raw(real_from_double(a)), raw(real_from_double(b)), MPFR_RNDN) != 0) {
    throw Error(ErrorCode::PrecisionInsufficient, "grid offset not exactly representable");
  }
  return out;
}

void check_width(const Enclosure& e, double max_abs_error, double& widest) {
  const double half = static_cast<double>(e.width() / 2);
  widest = std::max(widest, half);
  if (half > max_abs_error) {
    throw Error(ErrorCode::PrecisionInsufficient, "Phi enclosure wider than the requested error bound");
  }
}

Verdict ratio_nondecreasing(const Enclosure& earlier, const Enclosure& later) {
  if (earlier.hi <= later.lo) return Verdict::Holds;
  if (earlier.lo > later.hi) return Verdict::Fails;
  return Verdict::Undecided;
}

bool decide(Verdict v, const std::string& context) {
  if (v == Verdict::Undecided) {
    throw Error(ErrorCode::PrecisionInsufficient, "cannot separate " + context);
  }
  return v == Verdict::Holds;
}

}  // namespace

Enclosure normal_cdf_enclosure(const Real& x) {
  Real s_lo;
  Real s_hi;
  mpfr_sqrt_ui(raw(s_lo), 2, MPFR_RNDD);
  mpfr_sqrt_ui(raw(s_hi), 2, MPFR_RNDU);
  Real neg_x = -x;  // exact
  Real u_lo;
  Real u_hi;
  if (neg_x >= 0) {
    mpfr_div(raw(u_lo), raw(neg_x), raw(s_hi), MPFR_RNDD);
    mpfr_div(raw(u_hi), raw(neg_x), raw(s_lo), MPFR_RNDU);
  } else {
    mpfr_div(raw(u_lo), raw(neg_x), raw(s_lo), MPFR_RNDD);
    mpfr_div(raw(u_hi), raw(neg_x), raw(s_hi), MPFR_RNDU);
  }
  // Phi(x) = erfc(-x / sqrt 2) / 2 and erfc is decreasing.
  Enclosure out;
  mpfr_erfc(raw(out.lo), raw(u_hi), MPFR_RNDD);
  mpfr_erfc(raw(out.hi), raw(u_lo), MPFR_RNDU);
  mpfr_div_2ui(raw(out.lo), raw(out.lo), 1, MPFR_RNDD);
  mpfr_div_2ui(raw(out.hi), raw(out.hi), 1, MPFR_RNDU);
  return out;
}

Enclosure normal_cdf_enclosure(double x) { return normal_cdf_enclosure(real_from_double(x)); }

GaussianReport gaussian_checks(std::span<const double> grid, std::span<const double> k_grid,
                               double max_abs_error) {
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw Error(ErrorCode::InvalidArgument, "x grid must be strictly increasing");
  }
  for (double k : k_grid) {
    if (!(k > 0)) throw Error(ErrorCode::InvalidArgument, "k grid entries must be positive");
  }

  GaussianReport report;
  std::vector<Enclosure> phi;
  phi.reserve(grid.size());
  for (double x : grid) {
    phi.push_back(normal_cdf_enclosure(x));
    check_width(phi.back(), max_abs_error, report.max_abs_error);
  }

  // Phi(x - k) / Phi(x) along the grid.
  for (double k : k_grid) {
    std::vector<Enclosure> ratio;
    ratio.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Enclosure shifted = normal_cdf_enclosure(exact_difference(grid[j], k));
      check_width(shifted, max_abs_error, report.max_abs_error);
      ratio.push_back(div_enclosure(shifted, phi[j]));
    }
    for (std::size_t j = 0; j + 1 < ratio.size(); ++j) {
      ++report.monotone_checks;
      if (!decide(ratio_nondecreasing(ratio[j], ratio[j + 1]),
                  describe("ratio monotonicity at (k, x)", k, grid[j + 1]))) {
        report.failures.push_back(describe("Phi(x-k)/Phi(x) decreases at (k, x)", k, grid[j + 1]));
      }
    }
  }

  // Phi(x) < exp(-x^2/2) for x <= 1/2.
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    if (x > 0.5) continue;
    ++report.tail_checks;
    const ExactRational xq = exact_from_double(x);
    const Enclosure bound = exp_enclosure(-xq * xq / 2);
    if (!decide(less_than(phi[j], bound), describe("tail bound at (x, x)", x, x))) {
      report.failures.push_back(describe("Phi(x) >= exp(-x^2/2) at (x, x)", x, x));
    }
  }

  // Phi(z - c)/Phi(z) < 2 exp(-c^2/2) at z = 1/2 and at z = 0.
  for (double z : {0.5, 0.0}) {
    const Enclosure phi_z = normal_cdf_enclosure(z);
    for (double c : k_grid) {
      ++report.ratio_checks;
      const Enclosure num = normal_cdf_enclosure(exact_difference(z, c));
      const Enclosure ratio = div_enclosure(num, phi_z);
      const ExactRational cq = exact_from_double(c);
      const Enclosure bound = scale_enclosure(exp_enclosure(-cq * cq / 2), ExactRational(2));
      if (!decide(less_than(ratio, bound), describe("ratio bound at (z, c)", z, c))) {
        report.failures.push_back(describe("Phi(z-c)/Phi(z) >= 2exp(-c^2/2) at (z, c)", z, c));
      }
    }
  }
  return report;
}

}  // namespace robenv
