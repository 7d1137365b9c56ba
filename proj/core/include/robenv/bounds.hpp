#pragma once

// Closed-form bounds on attainable robustness and average image distances.

#include <optional>
#include <string>
#include <vector>

#include "robenv/real.hpp"

namespace robenv {

struct BoundQuery {
  double r = 0.5;  // target robust fraction, in (0, 1)
  int p = 0;
  long n = 1;
  int h = 1;
  int b = 1;

  void validate() const;
};

// Intermediate constants of the r <-> c reparametrization.
struct BoundTerms {
  Real c_upper;                      // r = 2 exp(-2 c^2)
  Real c_l2;                         // r = 2 exp(-c^2 / 2)
  Real c_lower;                      // r = 1 - 4c
  Real l0_term;                      // c_upper sqrt(h) n + 2
  std::optional<Real> l0_root_term;  // l0_term^(1/p), p >= 2
  std::optional<Real> l2_term;       // (c_l2 + 2 sqrt(h) n / 2^b)^(2/p), p >= 2
  std::string dominating_term;       // "theorem1" or "theorem3"
};

struct BoundResult {
  Real upper_size;
  Real lower_size;  // clamped at 0
  BoundTerms terms;
};

BoundResult evaluate_bounds(const BoundQuery& q);
Real upper_bound_size(const BoundQuery& q);
Real lower_bound_size(const BoundQuery& q);

struct AvgDistanceConstant {
  ExactRational k_bp;  // E|X - Y|^max(1,p) for independent uniform channel values
  Real k_hbp;
};

// Throws BitDepthTooLarge for b > 16.
AvgDistanceConstant avg_distance_constant(int h, int b, int p);
Real avg_distance_lower_bound(long n, int h, int b, int p);

struct BoundsRow {
  int p = 0;
  Real upper_size;
  Real lower_size;
  Real c_upper;
  Real c_lower;
  std::string dominating_term;
};

inline constexpr int kTableDigits = 6;

std::vector<BoundsRow> bounds_table(double r, long n, int h, int b, const std::vector<int>& p_list);

// Values rounded to 6 significant digits, round-to-nearest.
std::string bounds_csv(const std::vector<BoundsRow>& rows);
std::string bounds_json(const std::vector<BoundsRow>& rows);

// Smallest n0 <= n_max such that upper >= lower for every n in [n0, n_max];
// empty if the inequality fails at n_max.
std::optional<long> corollary_crossover(double r, int h, int b, int p, long n_max);

}  // namespace robenv
