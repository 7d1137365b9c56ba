#pragma once

// Verification suites run by `robenv verify`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace robenv::cli {

struct SuiteConfig {
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::uint64_t cap_images = std::uint64_t{1} << 20;
  std::uint64_t cap_subsets = std::uint64_t{1} << 16;
  std::vector<double> c_grid;  // overrides each suite's default grid when set
  std::string mutant;          // empty, or one of mutant_names()

  long mode_bound_max_n = 10000;
  std::uint64_t random_subsets = 100000;
  int balanced_small = 1000;  // balanced classifiers on (2,1,1)
  int balanced_large = 100;   // balanced classifiers on (2,1,2)
  std::uint64_t failure_samples = 10000;
};

struct CheckResult {
  std::string id;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::optional<double> min_margin;
  std::string counterexample;  // first violation, if any
  bool passed() const { return violations == 0 && checked > 0; }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool passed() const;
};

const std::vector<std::string>& suite_names();  // without "all"
const std::vector<std::string>& mutant_names();

// Throws std::invalid_argument for unknown suite or mutant names.
SuiteReport run_suite(const std::string& name, const SuiteConfig& config);
std::vector<SuiteReport> run_suites(const std::string& name, const SuiteConfig& config);

std::string reports_to_text(const std::vector<SuiteReport>& reports);
std::string reports_to_json(const std::vector<SuiteReport>& reports, const SuiteConfig& config);

}  // namespace robenv::cli
