#pragma once

// Robustness of images and classes under bounded perturbations.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robenv/classifiers.hpp"
#include "robenv/image_space.hpp"
#include "robenv/pmf.hpp"
#include "robenv/stats.hpp"

namespace robenv {

inline constexpr std::uint64_t kDefaultBallCap = std::uint64_t{1} << 22;

struct RobustnessOptions {
  std::uint64_t space_cap = kDefaultImageCap;
  std::uint64_t ball_cap = kDefaultBallCap;
};

// True iff every image within the budget (inclusive) shares the label of
// `image`. L0 budgets enumerate the Hamming ball; p >= 1 uses the closed
// form for the sum classifier and a space scan otherwise.
bool image_is_robust(const ClassifierHandle& c, const ImageTensor& image, const PerturbationBudget& budget,
                     const RobustnessOptions& options = {});

enum class RobustMethod { Exhaustive, Analytic, MonteCarlo };

std::string to_string(RobustMethod method);

struct RobustnessReport {
  SpaceParams params;
  std::string classifier;
  Label label = 0;
  PerturbationBudget budget;
  RobustMethod method = RobustMethod::Exhaustive;
  BigInt total;         // class size, or samples drawn
  BigInt robust_count;
  ExactRational fraction;
  std::optional<Interval> ci95;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
};

struct FractionRequest {
  RobustMethod method = RobustMethod::Exhaustive;
  std::uint64_t samples = 0;  // Monte Carlo only
  std::uint64_t seed = 0;     // Monte Carlo only
  unsigned threads = 0;
  RobustnessOptions limits;
};

RobustnessReport class_robust_fraction(const ClassifierHandle& c, Label label, const PerturbationBudget& budget,
                                       const FractionRequest& request);

// Exact fraction of sum-classifier class 0 robust to L1 size d, read off the
// level-sum distribution. A negative d admits no perturbation at all, so the
// fraction is 1.
ExactRational sum_exact_fraction_L1(const SpaceParams& params, double d,
                                    std::size_t support_cap = kDefaultSupportCap);

struct ReductionReport {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::optional<std::uint64_t> counterexample;  // image index
  std::string direction;
  bool holds() const { return violations == 0; }
};

enum class SweepMode { Exhaustive, Sampled };

// Robust to L1 size d implies robust to L0 size d.
ReductionReport reduction_check_L1_to_L0(const ClassifierHandle& c, double d, SweepMode mode = SweepMode::Exhaustive,
                                         std::uint64_t samples = 0, std::uint64_t seed = 0,
                                         const RobustnessOptions& options = {});

// Robust to L0 size d implies robust to Lp size d^(1/p) / (2^b - 1), and not
// robust to L0 size d implies not robust to Lp size d^(1/p). Exhaustive.
ReductionReport reduction_check_L0_to_Lp(const ClassifierHandle& c, double d, int p,
                                         const RobustnessOptions& options = {});

struct Theorem1Row {
  Label label = 0;
  BigInt class_size;
  double c = 0.0;
  long budget = 0;  // floor(c sqrt(h) n + 2) channel changes
  BigInt robust_count;
  ExactRational fraction;
  double bound = 0.0;  // 2 exp(-2 c^2)
  double margin = 0.0;
  bool holds = false;
};

struct Theorem1Report {
  std::vector<Theorem1Row> rows;
  bool all_hold() const;
};

// For every interesting class and every c: the fraction of the class robust
// to L0 size floor(c sqrt(h) n + 2) is strictly below 2 exp(-2 c^2).
Theorem1Report theorem1_holds(const ClassifierHandle& c, std::span<const double> c_grid,
                              std::uint64_t cap = kDefaultImageCap);

std::string report_to_json(const RobustnessReport& report);
std::string report_csv_header();
std::string report_to_csv(const RobustnessReport& report);

}  // namespace robenv
