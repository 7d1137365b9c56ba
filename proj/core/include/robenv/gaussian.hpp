#pragma once

// Certified standard-normal CDF and the scalar Gaussian inequalities used by
// the continuous isoperimetry argument.

#include <span>
#include <string>
#include <vector>

#include "robenv/real.hpp"

namespace robenv {

// Enclosure of Phi(x) for an x exactly representable as Real. Uses MPFR's
// correctly rounded erfc under directed rounding.
Enclosure normal_cdf_enclosure(const Real& x);
Enclosure normal_cdf_enclosure(double x);

struct GaussianReport {
  std::size_t monotone_checks = 0;   // Phi(x-k)/Phi(x) nondecreasing along the grid
  std::size_t tail_checks = 0;       // Phi(x) < exp(-x^2/2) for x <= 1/2
  std::size_t ratio_checks = 0;      // Phi(z-c)/Phi(z) < 2 exp(-c^2/2), z in {1/2, 0}
  std::vector<std::string> failures;
  double max_abs_error = 0.0;        // widest Phi enclosure seen, halved

  bool all_hold() const { return failures.empty(); }
};

// grid must be strictly increasing; k_grid entries positive. Throws
// PrecisionInsufficient if any Phi enclosure is wider than 2 * max_abs_error
// or any comparison cannot be separated.
GaussianReport gaussian_checks(std::span<const double> grid, std::span<const double> k_grid,
                               double max_abs_error = 1e-12);

}  // namespace robenv
