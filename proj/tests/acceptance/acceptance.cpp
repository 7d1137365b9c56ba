// Runs the twelve acceptance criteria at full scale and prints one PASS/FAIL line each.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "robenv/bounds.hpp"
#include "robenv/classifiers.hpp"
#include "robenv/error.hpp"
#include "robenv/image_space.hpp"
#include "robenv/perturb.hpp"
#include "robenv/robustness.hpp"
#include "robenv_cli/app.hpp"
#include "robenv_cli/suites.hpp"

namespace {

using namespace robenv;
using cli::CheckResult;
using cli::SuiteReport;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string summarize(const std::vector<CheckResult>& checks, double seconds) {
  std::uint64_t checked = 0, violations = 0;
  std::string first;
  for (const auto& c : checks) {
    checked += c.checked;
    violations += c.violations;
    if (first.empty() && !c.passed()) first = c.id + (c.counterexample.empty() ? "" : ": " + c.counterexample);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu checks, %llu cases, %llu violations, %.1fs", checks.size(),
                static_cast<unsigned long long>(checked), static_cast<unsigned long long>(violations), seconds);
  return first.empty() ? buf : std::string(buf) + "; first failure: " + first;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  if (checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

Outcome from_checks(const std::vector<CheckResult>& checks, double seconds, double limit_seconds) {
  Outcome o;
  o.passed = all_passed(checks) && seconds < limit_seconds;
  o.detail = summarize(checks, seconds);
  if (seconds >= limit_seconds) o.detail += "; over the " + std::to_string(static_cast<int>(limit_seconds)) + "s limit";
  return o;
}

std::vector<CheckResult> select(const SuiteReport& r, const std::function<bool(const std::string&)>& keep) {
  std::vector<CheckResult> out;
  for (const auto& c : r.checks) {
    if (keep(c.id)) out.push_back(c);
  }
  return out;
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

Outcome suite_criterion(const SuiteReport& r, double limit) { return from_checks(r.checks, r.seconds, limit); }

Outcome theorem1_margins(const SuiteReport& r) {
  Outcome o = suite_criterion(r, 600);
  for (const auto& c : r.checks) {
    if (!c.min_margin || *c.min_margin <= 0) {
      o.passed = false;
      o.detail += "; non-positive margin in " + c.id;
    }
  }
  return o;
}

Outcome average_distance() {
  const SpaceParams p{8, 1, 2};
  const std::uint64_t pairs = 100000;
  const std::uint64_t seed = 7;
  double sum[3] = {0, 0, 0};
  for (std::uint64_t i = 0; i < pairs; ++i) {
    const ImageTensor a = sample_uniform(p, seed, 2 * i);
    const ImageTensor b = sample_uniform(p, seed, 2 * i + 1);
    for (int norm = 0; norm <= 2; ++norm) sum[norm] += norm_distance(a, b, norm);
  }
  Outcome o{true, ""};
  for (int norm = 0; norm <= 2; ++norm) {
    const double mean = sum[norm] / static_cast<double>(pairs);
    const double bound = static_cast<double>(avg_distance_lower_bound(p.n, p.h, p.b, norm));
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sp=%d mean %.6g >= bound %.6g", norm ? "; " : "", norm, mean, bound);
    o.detail += buf;
    if (!(mean >= bound)) o.passed = false;
  }
  return o;
}

Outcome bounds_snapshot() {
  const std::string expected =
      "p,upper_size,lower_size,c_upper,c_lower,dominating_term\n"
      "0,325.014,46.4974,0.832555,0.125,theorem1\n"
      "1,325.014,46.4974,0.832555,0.125,theorem1\n"
      "2,4.6962,0.0267408,0.832555,0.125,theorem3\n";
  std::ostringstream out, err;
  const int code = cli::run({"bounds", "--r", "0.5", "--n", "224", "--h", "3", "--b", "8", "--p", "0,1,2"}, out, err);
  Outcome o;
  o.passed = code == 0 && out.str() == expected;
  o.detail = o.passed ? "p=2 upper 4.69620, lower 0.0267408" : "got:\n" + out.str() + err.str();
  return o;
}

Outcome oracle_coherence() {
  std::uint64_t checked = 0, mismatches = 0;
  std::string first;
  auto mismatch = [&](const std::string& what) {
    ++mismatches;
    if (first.empty()) first = what;
  };
  const std::vector<double> sizes{0.5, 1.0, 1.5, 2.0, 3.0};
  for (const SpaceParams p : {SpaceParams{2, 1, 1}, SpaceParams{2, 1, 2}}) {
    const std::vector<ClassifierHandle> zoo{
        sum_classifier(p), random_classifier(p, 2, RandomKind::Balanced, 1),
        random_classifier(p, 3, RandomKind::Uniform, 2), random_classifier(p, 2, RandomKind::LinearThreshold, 3)};
    for (const ClassifierHandle& c : zoo) {
      for (const ImageTensor& img : enumerate_space(p)) {
        for (int norm : {0, 1, 2}) {
          const MinimalPerturbation m = minimal_perturbation(c, img, norm);
          for (double d : sizes) {
            const PerturbationBudget budget = PerturbationBudget::from_size(norm, d);
            ++checked;
            if (image_is_robust(c, img, budget) != (m.power > budget.threshold)) {
              mismatch(c.name() + " " + to_string(p) + " image " + std::to_string(image_index(img)) +
                       " p=" + std::to_string(norm));
            }
          }
          ++checked;
          if (image_is_robust(c, img, PerturbationBudget::from_power(norm, m.power))) {
            mismatch("witness budget reported robust, image " + std::to_string(image_index(img)));
          }
        }
        if (c.kind() != ClassifierKind::Sum) continue;
        for (int norm : {0, 1, 2, 3}) {
          ++checked;
          const MinimalPerturbation fast = attack_sum_classifier(img, norm);
          if (fast.power != minimal_perturbation(c, img, norm).power || c.decide(fast.witness) == c.decide(img)) {
            mismatch("sum attack, image " + std::to_string(image_index(img)) + " p=" + std::to_string(norm));
          }
        }
      }
    }
  }
  Outcome o;
  o.passed = mismatches == 0 && checked > 0;
  o.detail = std::to_string(checked) + " comparisons, " + std::to_string(mismatches) + " mismatches";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

template <class F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("error: ") + e.what()};
  }
}

}  // namespace

int main() {
  const cli::SuiteConfig config;  // defaults are the acceptance scale
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };

  SuiteReport hamming;
  bool hamming_ran = false;
  auto hamming_report = [&]() -> const SuiteReport& {
    if (!hamming_ran) {
      hamming = cli::run_suite("hamming", config);
      hamming_ran = true;
    }
    return hamming;
  };

  const std::vector<Criterion> criteria{
      {1, "binomial suite", [&] { return suite_criterion(cli::run_suite("binomial", config), 30); }},
      {2, "hamming isoperimetry",
       [&] {
         const SuiteReport& r = hamming_report();
         return from_checks(select(r, [](const std::string& id) { return starts_with(id, "hamgraph"); }), r.seconds,
                            300);
       }},
      {3, "harper lower bound",
       [&] {
         const SuiteReport& r = hamming_report();
         return from_checks(select(r, [](const std::string& id) { return starts_with(id, "harper"); }), r.seconds,
                            300);
       }},
      {4, "theorem 1 at desk scale", [&] { return theorem1_margins(cli::run_suite("theorem1", config)); }},
      {5, "theorem 2 exact fractions", [&] { return suite_criterion(cli::run_suite("theorem2", config), 600); }},
      {6, "anti-concentration", [&] { return suite_criterion(cli::run_suite("anticonc", config), 600); }},
      {7, "reduction lemmas", [&] { return suite_criterion(cli::run_suite("reductions", config), 600); }},
      {8, "cell-walk contracts", [&] { return suite_criterion(cli::run_suite("theorem3", config), 300); }},
      {9, "gaussian scalar suite", [&] { return suite_criterion(cli::run_suite("gaussian", config), 600); }},
      {10, "average distance", average_distance},
      {11, "bounds table snapshot", bounds_snapshot},
      {12, "oracle coherence", oracle_coherence},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = guarded(c.run);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.passed;
    std::printf("%s %2d %s (%s) [%.1fs]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
