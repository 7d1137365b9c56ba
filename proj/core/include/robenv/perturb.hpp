#pragma once

// Perturbation search: the randomized cell-walk FindPerturbation procedure
// and exact minimal-perturbation oracles.

#include <cstdint>
#include <optional>

#include "robenv/classifiers.hpp"
#include "robenv/image_space.hpp"
#include "robenv/stats.hpp"

namespace robenv {

inline constexpr int kMaxCellWalkDimension = 12;
inline constexpr std::uint64_t kDefaultCellCap = std::uint64_t{1} << 22;

struct CellWalkOptions {
  int max_dimension = kMaxCellWalkDimension;
  std::uint64_t cell_cap = kDefaultCellCap;
};

struct PerturbationOutcome {
  std::optional<ImageTensor> result;  // empty is the failure marker
  ContinuousPoint start;              // p1, sampled inside the image's cell
  double l2_moved = 0.0;              // ||i - result||_2
  double bound = 0.0;                 // radius + 2 n sqrt(h) / 2^b
  bool within_bound = true;           // l2_moved <= bound, checked in extended precision
  std::uint64_t cells_examined = 0;

  bool success() const { return result.has_value(); }
};

// p1 uniform in the cell [l/2^b, (l+1)/2^b] of each channel, on a 2^-32
// sub-grid so every coordinate is an exact double.
ContinuousPoint sample_in_cell(const ImageTensor& image, std::uint64_t seed);

// Walks every cell whose closed box meets the L2 ball of `radius` around p1
// and returns the image of the nearest cell with a different label (ties go
// to the lowest index).
PerturbationOutcome find_perturbation(const ClassifierHandle& c, const ImageTensor& image, double radius,
                                      std::uint64_t seed, const CellWalkOptions& options = {});

// Independent full scan over all cells with exact rational distances; the
// index of the nearest different-label cell within the ball, if any.
std::optional<std::uint64_t> nearest_other_cell_scan(const ClassifierHandle& c, const ImageTensor& image,
                                                     const ContinuousPoint& point, double radius,
                                                     std::uint64_t cap = kDefaultImageCap);

struct FailureRate {
  std::uint64_t failures = 0;
  std::uint64_t samples = 0;
  double rate = 0.0;
  Interval ci95;
  double bound = 0.0;  // 2 exp(-radius^2 / 2)
  bool class_interesting = false;
  bool contract_held = true;  // every success stayed within its distance bound
};

FailureRate failure_rate(const ClassifierHandle& c, Label label, double radius, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads = 0, const CellWalkOptions& options = {});

struct MinimalPerturbation {
  int p = 0;
  ExactRational power;  // ||i - witness||_p^max(p,1), exact
  double distance = 0.0;
  ImageTensor witness;
};

// Exhaustive over the space; the lowest-index witness among the closest.
MinimalPerturbation minimal_perturbation(const ClassifierHandle& c, const ImageTensor& image, int p,
                                         std::uint64_t cap = kDefaultImageCap);

// Closed-form minimal attack on the sum classifier: fill the cheapest
// channels toward the threshold (largest headroom for p <= 1, balanced
// increments for p >= 2).
MinimalPerturbation attack_sum_classifier(const ImageTensor& image, int p);

}  // namespace robenv
