#include "robenv_cli/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "robenv/bounds.hpp"
#include "robenv/classifiers.hpp"
#include "robenv/exactmath.hpp"
#include "robenv/gaussian.hpp"
#include "robenv/hamming.hpp"
#include "robenv/perturb.hpp"
#include "robenv/pmf.hpp"
#include "robenv/random.hpp"
#include "robenv/robustness.hpp"

namespace robenv::cli {
namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Accumulates one sweep into a CheckResult.
class Tally {
 public:
  explicit Tally(std::string id) { result_.id = std::move(id); }

  void observe(bool ok, std::optional<double> margin, const std::function<std::string()>& describe) {
    ++result_.checked;
    if (margin && (!result_.min_margin || *margin < *result_.min_margin)) result_.min_margin = margin;
    if (!ok) {
      if (result_.violations == 0) result_.counterexample = describe();
      ++result_.violations;
    }
  }

  CheckResult done() { return std::move(result_); }

 private:
  CheckResult result_;
};

bool mutant_is(const SuiteConfig& config, const char* name) { return config.mutant == name; }

std::vector<double> grid_or(const SuiteConfig& config, std::vector<double> fallback) {
  return config.c_grid.empty() ? fallback : config.c_grid;
}

// ---------------------------------------------------------------- binomial

bool mode_bound_halved_exponent(long n) {
  // Mutant: C(n, n/2) n < 2^n.
  BigInt rhs;
  mpz_ui_pow_ui(rhs.get_mpz_t(), 2, static_cast<unsigned long>(n));
  return binom(n, n / 2) * BigInt(n) < rhs;
}

SuiteReport binomial_suite(const SuiteConfig& config) {
  SuiteReport report{"binomial", {}, 0.0};

  Tally mode("mode_bound n=1.." + std::to_string(config.mode_bound_max_n));
  for (long n = 1; n <= config.mode_bound_max_n; ++n) {
    const bool ok = mutant_is(config, "mode-bound-n") ? mode_bound_halved_exponent(n) : mode_bound_holds(n);
    mode.observe(ok, std::nullopt, [n] { return fmt("n=%ld", n); });
  }
  report.checks.push_back(mode.done());

  Tally mono("tail_ratio nondecreasing in x, n<=40, k<=5, p=j/10");
  for (long n = 1; n <= 40; ++n) {
    for (long j = 1; j <= 9; ++j) {
      const BinomialTails tails(n, ExactRational(j, 10));
      for (long k = 1; k <= 5; ++k) {
        ExactRational prev = tail_ratio(tails, k, 0);
        for (long x = 1; x <= n; ++x) {
          ExactRational cur = tail_ratio(tails, k, x);
          mono.observe(prev <= cur, to_double(cur - prev),
                       [&] { return fmt("n=%ld p=%ld/10 k=%ld x=%ld", n, j, k, x); });
          prev = std::move(cur);
        }
      }
    }
  }
  report.checks.push_back(mono.done());

  Tally hoeff("hoeffding ratio bound, all admissible (n<=64, r, k), p in {j/10, 1/4, 3/4}");
  std::vector<ExactRational> probs{{1, 4}, {3, 4}};
  for (long j = 1; j <= 9; ++j) probs.emplace_back(j, 10);
  const double exponent = mutant_is(config, "hoeffding-8") ? 8.0 : 2.0;
  for (long n = 2; n <= 64; ++n) {
    std::vector<Enclosure> bounds(static_cast<std::size_t>(n));
    for (long k = 1; k < n; ++k) {
      const ExactRational e = -ExactRational(exponent) * (k - 1) * (k - 1) / n;
      bounds[static_cast<std::size_t>(k)] = scale_enclosure(exp_enclosure(e), ExactRational(2));
    }
    for (const auto& p : probs) {
      const BinomialTails tails(n, p);
      for (long r = 1; r < n; ++r) {
        if (tails.tail(r) > ExactRational(1, 2)) continue;
        for (long k = 1; k <= r; ++k) {
          const ExactRational ratio = tail_ratio(tails, k, r);
          const Enclosure& bound = bounds[static_cast<std::size_t>(k)];
          const Verdict v = less_equal(ratio, bound);
          if (v == Verdict::Undecided) throw std::runtime_error("hoeffding comparison undecided");
          hoeff.observe(v == Verdict::Holds, static_cast<double>(bound.lo) - to_double(ratio), [&] {
            return fmt("n=%ld p=%s r=%ld k=%ld ratio=%.6g bound=%.6g", n, p.get_str().c_str(), r, k, to_double(ratio),
                       static_cast<double>(bound.mid()));
          });
        }
      }
    }
  }
  report.checks.push_back(hoeff.done());
  return report;
}

// ----------------------------------------------------------------- hamming

HammingSubset random_subset(const GraphParams& graph, std::uint64_t seed, std::uint64_t index) {
  // Size uniform in [1, V/2], then a uniform subset of that size.
  CounterRng rng(seed, index);
  const std::uint64_t total = graph.vertex_count();
  const std::uint64_t size = 1 + rng.below(total / 2);
  std::vector<std::uint64_t> pool(total);
  for (std::uint64_t i = 0; i < total; ++i) pool[i] = i;
  for (std::uint64_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(total - i)]);
  pool.resize(size);
  return HammingSubset::from_vertices(graph, pool);
}

void hamgraph_sweep(SuiteReport& report, const GraphParams& graph, const std::vector<double>& c_grid,
                    const SuiteConfig& config) {
  const std::uint64_t total = graph.vertex_count();
  const bool exhaustive = total < 64 && (std::uint64_t{1} << total) <= config.cap_subsets;
  Tally tally(fmt("hamgraph interior ratio < 2exp(-2c^2), H(%d,%d), %s", graph.dims, graph.alphabet,
                  exhaustive ? "all subsets" : (std::to_string(config.random_subsets) + " random subsets").c_str()));
  auto check = [&](const HammingSubset& s, const std::string& label) {
    const auto results = check_hamgraph_theorem(s, c_grid);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      tally.observe(r.holds, static_cast<double>(r.bound.lo) - to_double(r.ratio), [&] {
        return fmt("%s c=%g ratio=%s", label.c_str(), c_grid[i], r.ratio.get_str().c_str());
      });
    }
  };
  if (exhaustive) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << total); ++mask) {
      const auto size = static_cast<std::uint64_t>(__builtin_popcountll(mask));
      if (2 * size > total) continue;
      check(HammingSubset::from_mask(graph, mask), fmt("mask=%llu", static_cast<unsigned long long>(mask)));
    }
  } else {
    const std::uint64_t seed = mix_seed(config.seed, static_cast<std::uint64_t>(graph.dims * 100 + graph.alphabet));
    for (std::uint64_t i = 0; i < config.random_subsets; ++i) {
      check(random_subset(graph, seed, i), fmt("random subset #%llu", static_cast<unsigned long long>(i)));
    }
  }
  report.checks.push_back(tally.done());
}

void harper_sweep(SuiteReport& report, const GraphParams& graph, long k) {
  Tally tally(fmt("harper expansion bound, H(%d,%d), k=%ld, all proper subsets", graph.dims, graph.alphabet, k));
  HarperChecker checker(graph, k, 1e-9);
  const std::uint64_t total = graph.vertex_count();
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << total); ++mask) {
    const HarperCheck r = checker.check(HammingSubset::from_mask(graph, mask));
    tally.observe(r.holds, static_cast<double>(to_real(r.lhs) - r.rhs), [&] {
      return fmt("mask=%llu lhs=%s rhs=%.12g", static_cast<unsigned long long>(mask), r.lhs.get_str().c_str(),
                 static_cast<double>(r.rhs));
    });
  }
  report.checks.push_back(tally.done());
}

SuiteReport hamming_suite(const SuiteConfig& config) {
  SuiteReport report{"hamming", {}, 0.0};
  const auto c_grid = grid_or(config, {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});
  hamgraph_sweep(report, GraphParams{4, 2}, c_grid, config);
  hamgraph_sweep(report, GraphParams{6, 2}, c_grid, config);
  hamgraph_sweep(report, GraphParams{4, 3}, c_grid, config);
  for (long k = 1; k <= 3; ++k) harper_sweep(report, GraphParams{4, 2}, k);
  harper_sweep(report, GraphParams{2, 3}, 1);
  return report;
}

// ---------------------------------------------------------------- anticonc

struct SymmetricY {
  const char* name;
  DiscretePMF pmf;
  long grid;
};

std::vector<SymmetricY> y_family() {
  auto uniform = [](long lo, long hi) {
    return DiscretePMF(lo, std::vector<BigInt>(static_cast<std::size_t>(hi - lo + 1), BigInt(1)), BigInt(hi - lo + 1));
  };
  std::vector<SymmetricY> out;
  out.push_back({"point mass 0", DiscretePMF::point_mass(0), 1});
  out.push_back({"uniform {-1,0,1}", uniform(-1, 1), 1});
  out.push_back({"uniform {-1,1}", DiscretePMF(-1, {1, 0, 1}, 2), 1});
  out.push_back({"uniform {-2..2}", uniform(-2, 2), 1});
  out.push_back({"triangle (1,2,1)/4", DiscretePMF(-1, {1, 2, 1}, 4), 1});
  out.push_back({"uniform {-3,3}", DiscretePMF(-3, {1, 0, 0, 0, 0, 0, 1}, 2), 1});
  out.push_back({"uniform {-1/2,1/2}", DiscretePMF(-1, {1, 0, 1}, 2), 2});
  out.push_back({"uniform {-3/2..3/2} step 1", DiscretePMF(-3, {1, 0, 1, 0, 1, 0, 1}, 4), 2});
  out.push_back({"uniform {-1..1} step 1/2", uniform(-2, 2), 2});
  return out;
}

SuiteReport anticonc_suite(const SuiteConfig&) {
  SuiteReport report{"anticonc", {}, 0.0};
  Tally spread("binomial spread Pr[X+Y<=t] >= Pr[X<t], n=2..20, symmetric Y family, half-integer t < n/2");
  const auto family = y_family();
  for (long n = 2; n <= 20; ++n) {
    for (const auto& y : family) {
      for (long twice_t = -1; twice_t < n; twice_t += 2) {
        const ExactRational t(twice_t, 2);
        const SpreadCheck r = binomial_spread_check(n, y.pmf, y.grid, t);
        spread.observe(r.holds, to_double(r.lhs - r.rhs),
                       [&] { return fmt("n=%ld Y=%s t=%s", n, y.name, t.get_str().c_str()); });
      }
    }
  }
  report.checks.push_back(spread.done());

  Tally anti("anti-concentration, n=1..64, 2k in {2,4,8}, t grid");
  const std::vector<ExactRational> t_grid{{1, 4}, {1, 2}, {1, 1}, {3, 2}, {2, 1}, {3, 1}, {4, 1}, {6, 1}, {8, 1}};
  for (long levels : {2L, 4L, 8L}) {
    const DiscretePMF base = pmf_uniform_levels(levels);
    DiscretePMF sum = base;
    for (long n = 1; n <= 64; ++n) {
      if (n > 1) sum = convolve(sum, base);
      for (const auto& t : t_grid) {
        const AntiConcentrationCheck r = anti_concentration_check(sum, n, levels, t);
        anti.observe(r.holds, to_double(r.lhs) - r.rhs,
                     [&] { return fmt("n=%ld levels=%ld t=%s", n, levels, t.get_str().c_str()); });
      }
    }
  }
  report.checks.push_back(anti.done());
  return report;
}

// ---------------------------------------------------------------- gaussian

std::vector<double> x_grid() {
  std::vector<double> xs;
  for (int i = -600; i <= 50; ++i) xs.push_back(i / 100.0);
  return xs;
}

std::vector<double> k_grid() {
  std::vector<double> ks;
  for (int i = 1; i <= 40; ++i) ks.push_back(i / 10.0);
  return ks;
}

SuiteReport gaussian_suite(const SuiteConfig& config) {
  SuiteReport report{"gaussian", {}, 0.0};
  const auto xs = x_grid();
  const auto ks = grid_or(config, k_grid());
  if (mutant_is(config, "gaussian-tail-x2")) {
    Tally tally("mutant tail bound Phi(x) < exp(-x^2), x in [-6, 0.5]");
    for (double x : xs) {
      const Enclosure phi = normal_cdf_enclosure(x);
      const ExactRational xq = exact_from_double(x);
      const Enclosure bound = exp_enclosure(-xq * xq);
      const Verdict v = less_than(phi, bound);
      tally.observe(v == Verdict::Holds, static_cast<double>(bound.lo - phi.hi), [&] { return fmt("x=%g", x); });
    }
    report.checks.push_back(tally.done());
    return report;
  }
  if (mutant_is(config, "gaussian-ratio-c2")) {
    Tally tally("mutant ratio bound Phi(z-c)/Phi(z) < 2exp(-c^2), z in {0.5, 0}");
    for (double z : {0.5, 0.0}) {
      for (double c : ks) {
        const Enclosure ratio = div_enclosure(normal_cdf_enclosure(z - c), normal_cdf_enclosure(z));
        const ExactRational cq = exact_from_double(c);
        const Enclosure bound = scale_enclosure(exp_enclosure(-cq * cq), ExactRational(2));
        tally.observe(less_than(ratio, bound) == Verdict::Holds, static_cast<double>(bound.lo - ratio.hi),
                      [&] { return fmt("z=%g c=%g", z, c); });
      }
    }
    report.checks.push_back(tally.done());
    return report;
  }
  const GaussianReport g = gaussian_checks(xs, ks, 1e-12);
  auto add = [&](const char* id, std::uint64_t count, const char* prefix) {
    CheckResult r;
    r.id = id;
    r.checked = count;
    for (const auto& f : g.failures) {
      if (f.rfind(prefix, 0) == 0) {
        if (r.violations == 0) r.counterexample = f;
        ++r.violations;
      }
    }
    report.checks.push_back(std::move(r));
  };
  add("Phi(x-k)/Phi(x) nondecreasing, x in [-6,0.5] step 0.01, k in 0.1..4.0", g.monotone_checks, "Phi(x-k)");
  add("Phi(x) < exp(-x^2/2) for x <= 1/2", g.tail_checks, "Phi(x) >=");
  add("Phi(z-c)/Phi(z) < 2exp(-c^2/2), z in {0.5, 0}", g.ratio_checks, "Phi(z-c)");
  return report;
}

// ---------------------------------------------------------------- theorem1

void theorem1_for(Tally& tally, const ClassifierHandle& c, const std::vector<double>& grid, const SuiteConfig& config) {
  const Theorem1Report r = theorem1_holds(c, grid, config.cap_images);
  for (const auto& row : r.rows) {
    tally.observe(row.holds, row.margin, [&] {
      return fmt("%s %s label=%d c=%g fraction=%s bound=%.6g", c.name().c_str(), to_string(c.params()).c_str(),
                 row.label, row.c, row.fraction.get_str().c_str(), row.bound);
    });
  }
}

SuiteReport theorem1_suite(const SuiteConfig& config) {
  SuiteReport report{"theorem1", {}, 0.0};
  const auto grid = grid_or(config, {0.5, 0.75, 1.0});
  const SpaceParams small{2, 1, 1};
  const SpaceParams large{2, 1, 2};
  {
    Tally tally("L0 robust fraction < 2exp(-2c^2), sum classifier on (2,1,1) and (2,1,2)");
    theorem1_for(tally, sum_classifier(small), grid, config);
    theorem1_for(tally, sum_classifier(large), grid, config);
    report.checks.push_back(tally.done());
  }
  for (const auto& [space, count] : {std::pair{small, config.balanced_small}, std::pair{large, config.balanced_large}}) {
    Tally tally(fmt("L0 robust fraction < 2exp(-2c^2), %d balanced classifiers on %s", count, to_string(space).c_str()));
    for (int i = 0; i < count; ++i) {
      const auto c = random_classifier(space, 2, RandomKind::Balanced, mix_seed(config.seed, static_cast<std::uint64_t>(i)));
      theorem1_for(tally, c, grid, config);
    }
    report.checks.push_back(tally.done());
  }
  {
    Tally tally("L0 robust fraction < 2exp(-2c^2), linear-threshold and uniform classifiers on (2,1,1), (2,1,2), (3,1,1)");
    for (const SpaceParams& space : {small, large, SpaceParams{3, 1, 1}}) {
      for (std::uint64_t i = 0; i < 10; ++i) {
        const std::uint64_t s = mix_seed(config.seed, 1000 + i);
        theorem1_for(tally, random_classifier(space, 2, RandomKind::LinearThreshold, s), grid, config);
        theorem1_for(tally, random_classifier(space, 3, RandomKind::Uniform, s), grid, config);
      }
    }
    report.checks.push_back(tally.done());
  }
  return report;
}

// ---------------------------------------------------------------- theorem2

SuiteReport theorem2_suite(const SuiteConfig&) {
  SuiteReport report{"theorem2", {}, 0.0};
  {
    Tally tally("sum class 0 is (1-4c)-robust to L1 size 16c-2 on (16,1,1), exact; matches U(127-floor(d))/U(127)");
    const SpaceParams space{16, 1, 1};
    const BinomialTails tails(256, ExactRational(1, 2));
    for (long j = 1; j <= 4; ++j) {
      const ExactRational c(j, 20);
      const ExactRational dq = 16 * c - 2;
      const double d = to_double(dq);
      const ExactRational fraction = sum_exact_fraction_L1(space, d);
      const ExactRational floor_bound = 1 - 4 * c;
      ExactRational expected = 1;
      if (dq >= 1) {
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), dq.get_num_mpz_t(), dq.get_den_mpz_t());
        expected = tail_ratio(tails, fl.get_si(), 127);
      }
      tally.observe(fraction >= floor_bound && fraction == expected, to_double(fraction - floor_bound), [&] {
        return fmt("c=%s fraction=%s expected=%s", c.get_str().c_str(), fraction.get_str().c_str(),
                   expected.get_str().c_str());
      });
    }
    report.checks.push_back(tally.done());
  }
  {
    Tally tally("sum class 0 is (1-4c)-robust to L1 size c sqrt(h) n - 2 on (32,1,1), (12,3,1), (8,1,2)");
    for (const SpaceParams& space : {SpaceParams{32, 1, 1}, SpaceParams{12, 3, 1}, SpaceParams{8, 1, 2}}) {
      for (long j = 1; j <= 4; ++j) {
        const ExactRational c(j, 20);
        const double d = to_double(c) * std::sqrt(static_cast<double>(space.h)) * space.n - 2;
        const ExactRational fraction = sum_exact_fraction_L1(space, d);
        tally.observe(fraction >= 1 - 4 * c, to_double(fraction - (1 - 4 * c)), [&] {
          return fmt("%s c=%s fraction=%s", to_string(space).c_str(), c.get_str().c_str(), fraction.get_str().c_str());
        });
      }
    }
    report.checks.push_back(tally.done());
  }
  {
    Tally tally("analytic L1 fraction equals exhaustive class_robust_fraction on (2,1,1), (3,1,1)");
    for (const SpaceParams& space : {SpaceParams{2, 1, 1}, SpaceParams{3, 1, 1}}) {
      const auto c = sum_classifier(space);
      for (double d : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const ExactRational analytic = sum_exact_fraction_L1(space, d);
        FractionRequest req;
        const RobustnessReport exhaustive = class_robust_fraction(c, 0, PerturbationBudget::from_size(1, d), req);
        tally.observe(analytic == exhaustive.fraction, std::nullopt, [&] {
          return fmt("%s d=%g analytic=%s exhaustive=%s", to_string(space).c_str(), d, analytic.get_str().c_str(),
                     exhaustive.fraction.get_str().c_str());
        });
      }
    }
    report.checks.push_back(tally.done());
  }
  return report;
}

// ---------------------------------------------------------------- theorem3

SuiteReport theorem3_suite(const SuiteConfig& config) {
  SuiteReport report{"theorem3", {}, 0.0};
  const SpaceParams space{2, 1, 2};
  const auto sum = sum_classifier(space);
  const auto sizes = class_sizes(sum, CountMode::Exhaustive);
  const auto radii = grid_or(config, {1.5, 2.0});
  {
    Tally contract("cell walk successes stay within radius + 2n sqrt(h)/2^b and change the label, sum on (2,1,2)");
    Tally rate(fmt("failure rate Wilson upper < 2exp(-c^2/2) + 0.02, %llu samples, sum on (2,1,2)",
                   static_cast<unsigned long long>(config.failure_samples)));
    for (const auto& s : sizes) {
      if (!s.interesting) continue;
      for (double radius : radii) {
        const FailureRate fr = failure_rate(sum, s.label, radius, config.failure_samples, config.seed, config.threads);
        contract.observe(fr.contract_held, std::nullopt,
                         [&] { return fmt("label=%d radius=%g", s.label, radius); });
        const double limit = fr.bound + 0.02;
        rate.observe(fr.ci95.hi < limit, limit - fr.ci95.hi, [&] {
          return fmt("label=%d radius=%g rate=%g ci_hi=%g bound=%g", s.label, radius, fr.rate, fr.ci95.hi, fr.bound);
        });
      }
    }
    // Every image, a few seeds each: success implies label change and the distance bound.
    for (const ImageTensor& image : enumerate_space(space)) {
      for (std::uint64_t k = 0; k < 4; ++k) {
        for (double radius : radii) {
          const auto o = find_perturbation(sum, image, radius, mix_seed(config.seed, image_index(image) * 4 + k));
          if (!o.success()) continue;
          const bool ok = o.within_bound && sum.decide(*o.result) != sum.decide(image);
          contract.observe(ok, o.bound - o.l2_moved, [&] { return encode_image(image) + fmt(" radius=%g", radius); });
        }
      }
    }
    report.checks.push_back(contract.done());
    report.checks.push_back(rate.done());
  }
  {
    Tally tally("non-robust fraction at L2 size c + 2n sqrt(h)/2^b >= 1 - 2exp(-c^2/2), interesting classes of (2,1,2)");
    std::vector<ClassifierHandle> zoo{sum};
    for (std::uint64_t i = 0; i < 5; ++i) zoo.push_back(random_classifier(space, 2, RandomKind::Balanced, mix_seed(config.seed, 50 + i)));
    for (const auto& c : zoo) {
      for (const auto& s : class_sizes(c, CountMode::Exhaustive)) {
        if (!s.interesting) continue;
        for (double cv : {0.25, 0.5, 1.0, 1.5}) {
          const double size = cv + 2.0 * space.n * std::sqrt(static_cast<double>(space.h)) / space.level_count();
          FractionRequest req;
          req.threads = config.threads;
          const auto rep = class_robust_fraction(c, s.label, PerturbationBudget::from_size(2, size), req);
          const double non_robust = 1.0 - to_double(rep.fraction);
          const double floor_value = 1.0 - 2.0 * std::exp(-cv * cv / 2);
          tally.observe(non_robust >= floor_value, non_robust - floor_value, [&] {
            return fmt("%s label=%d c=%g non_robust=%g", c.name().c_str(), s.label, cv, non_robust);
          });
        }
      }
    }
    report.checks.push_back(tally.done());
  }
  {
    Tally tally("robust at Lp size d^(2/p) implies robust at L2 size d, p in {3,4}, all images of (2,1,2)");
    std::vector<ClassifierHandle> zoo{sum, random_classifier(space, 2, RandomKind::Balanced, config.seed),
                                      random_classifier(space, 2, RandomKind::LinearThreshold, config.seed)};
    for (const auto& c : zoo) {
      for (int p : {3, 4}) {
        for (double d : {0.5, 1.0, 1.5}) {
          const ExactRational dq = exact_from_double(d);
          const auto lp = PerturbationBudget::from_power(p, dq * dq);
          const auto l2 = PerturbationBudget::from_size(2, d);
          for (const ImageTensor& image : enumerate_space(space)) {
            const bool ok = !image_is_robust(c, image, lp) || image_is_robust(c, image, l2);
            tally.observe(ok, std::nullopt, [&] {
              return fmt("%s p=%d d=%g ", c.name().c_str(), p, d) + encode_image(image);
            });
          }
        }
      }
    }
    report.checks.push_back(tally.done());
  }
  return report;
}

// -------------------------------------------------------------- reductions

std::vector<ClassifierHandle> zoo_for(const SpaceParams& space, std::uint64_t seed) {
  return {sum_classifier(space),
          constant_classifier(space),
          random_classifier(space, 2, RandomKind::Balanced, seed),
          random_classifier(space, 2, RandomKind::Uniform, seed),
          random_classifier(space, 3, RandomKind::Uniform, seed + 1),
          random_classifier(space, 2, RandomKind::LinearThreshold, seed)};
}

SuiteReport reductions_suite(const SuiteConfig& config) {
  SuiteReport report{"reductions", {}, 0.0};
  Tally l1("L1 robust implies L0 robust, d in {1,2,3}, classifier zoo on (2,1,1), (2,1,2), (3,1,1)");
  Tally lp("L0 robustness bracketed by Lp budgets, d in {1,2,3}, p in {2,3}, same zoo");
  RobustnessOptions options;
  options.space_cap = config.cap_images;
  for (const SpaceParams& space : {SpaceParams{2, 1, 1}, SpaceParams{2, 1, 2}, SpaceParams{3, 1, 1}}) {
    for (const auto& c : zoo_for(space, config.seed)) {
      for (double d : {1.0, 2.0, 3.0}) {
        const auto r = reduction_check_L1_to_L0(c, d, SweepMode::Exhaustive, 0, 0, options);
        l1.observe(r.holds(), std::nullopt, [&] {
          return fmt("%s %s d=%g image=%llu", c.name().c_str(), to_string(space).c_str(), d,
                     static_cast<unsigned long long>(r.counterexample.value_or(0)));
        });
        for (int p : {2, 3}) {
          const auto q = reduction_check_L0_to_Lp(c, d, p, options);
          lp.observe(q.holds(), std::nullopt, [&] {
            return fmt("%s %s d=%g p=%d image=%llu", c.name().c_str(), to_string(space).c_str(), d, p,
                       static_cast<unsigned long long>(q.counterexample.value_or(0)));
          });
        }
      }
    }
  }
  report.checks.push_back(l1.done());
  report.checks.push_back(lp.done());
  return report;
}

using SuiteFn = SuiteReport (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites{
      {"binomial", binomial_suite}, {"hamming", hamming_suite},   {"anticonc", anticonc_suite},
      {"gaussian", gaussian_suite}, {"theorem1", theorem1_suite}, {"theorem2", theorem2_suite},
      {"theorem3", theorem3_suite}, {"reductions", reductions_suite}};
  return suites;
}

}  // namespace

bool SuiteReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

const std::vector<std::string>& mutant_names() {
  static const std::vector<std::string> names{"mode-bound-n", "hoeffding-8", "gaussian-tail-x2", "gaussian-ratio-c2"};
  return names;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& config) {
  if (!config.mutant.empty() &&
      std::find(mutant_names().begin(), mutant_names().end(), config.mutant) == mutant_names().end()) {
    throw std::invalid_argument("unknown mutant '" + config.mutant + "'");
  }
  for (const auto& [suite, fn] : registry()) {
    if (suite != name) continue;
    const auto start = std::chrono::steady_clock::now();
    SuiteReport report = fn(config);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

std::vector<SuiteReport> run_suites(const std::string& name, const SuiteConfig& config) {
  if (name != "all") return {run_suite(name, config)};
  std::vector<SuiteReport> out;
  for (const auto& suite : suite_names()) out.push_back(run_suite(suite, config));
  return out;
}

std::string reports_to_text(const std::vector<SuiteReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      out += (c.passed() ? "PASS " : "FAIL ") + r.suite + ": " + c.id + fmt(" [checked=%llu violations=%llu",
                                                                              static_cast<unsigned long long>(c.checked),
                                                                              static_cast<unsigned long long>(c.violations));
      if (c.min_margin) out += fmt(" min_margin=%.6g", *c.min_margin);
      out += "]\n";
      if (!c.counterexample.empty()) out += "  counterexample: " + c.counterexample + "\n";
    }
  }
  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.passed() ? 0 : 1;
  out += fmt("%zu suite(s), %zu failed\n", reports.size(), failed);
  return out;
}

std::string reports_to_json(const std::vector<SuiteReport>& reports, const SuiteConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = {{"seed", config.seed},
                 {"mutant", config.mutant},
                 {"cap_images", config.cap_images},
                 {"cap_subsets", config.cap_subsets},
                 {"c_grid", config.c_grid}};
  j["suites"] = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : reports) {
    nlohmann::ordered_json s;
    s["suite"] = r.suite;
    s["passed"] = r.passed();
    s["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
      nlohmann::ordered_json cj;
      cj["id"] = c.id;
      cj["passed"] = c.passed();
      cj["checked"] = c.checked;
      cj["violations"] = c.violations;
      cj["min_margin"] = c.min_margin ? nlohmann::ordered_json(*c.min_margin) : nlohmann::ordered_json(nullptr);
      cj["counterexample"] = c.counterexample.empty() ? nlohmann::ordered_json(nullptr)
                                                      : nlohmann::ordered_json(c.counterexample);
      s["checks"].push_back(std::move(cj));
    }
    all = all && r.passed();
    j["suites"].push_back(std::move(s));
  }
  j["passed"] = all;
  return j.dump(2) + "\n";
}

}  // namespace robenv::cli
