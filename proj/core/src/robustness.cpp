#include "robenv/robustness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "robenv/error.hpp"
#include "robenv/exactmath.hpp"
#include "robenv/hamming.hpp"
#include "robenv/parallel.hpp"
#include "robenv/perturb.hpp"
#include "robenv/pmf.hpp"
#include "robenv/random.hpp"

namespace robenv {

std::string to_string(RobustMethod method) {
  switch (method) {
    case RobustMethod::Exhaustive: return "exhaustive";
    case RobustMethod::Analytic: return "analytic";
    case RobustMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

BigInt ball_size(std::size_t dim, Level max_level, long k) {
  BigInt total = 0;
  BigInt term;
  for (long j = 0; j <= std::min<long>(k, static_cast<long>(dim)); ++j) {
    mpz_ui_pow_ui(term.get_mpz_t(), max_level, static_cast<unsigned long>(j));
    total += binom(static_cast<long>(dim), j) * term;
  }
  return total;
}

BigInt floor_of(const ExactRational& q) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

// Robustness queries against one classifier, optionally with its labels
// materialized so neighbours are looked up by index arithmetic.
class Scanner {
 public:
  Scanner(const ClassifierHandle& c, const RobustnessOptions& options, bool materialize)
      : c_(c), params_(c.params()), options_(options) {
    const auto total = params_.total_images_u64();
    if (materialize && total && *total <= options.space_cap) {
      table_ = c.has_table() ? std::nullopt : std::optional(materialize_labels(c, options.space_cap));
      indexed_ = true;
    } else {
      indexed_ = total.has_value();
    }
    strides_.assign(params_.dimension(), 1);
    if (indexed_) {
      for (std::size_t i = params_.dimension(); i-- > 1;) strides_[i - 1] = strides_[i] * params_.level_count();
    }
  }

  Label label_of(std::uint64_t index, const std::vector<Level>& levels) const {
    if (table_) return (*table_)[index];
    if (c_.has_table()) return c_.label_of_index(index);
    return c_.decide(ImageTensor(params_, levels));
  }

  bool robust(const ImageTensor& image, const PerturbationBudget& budget) const {
    const Label own = c_.decide(image);
    if (budget.p == 0) return robust_l0(image, own, budget.max_changes());
    if (c_.kind() == ClassifierKind::Sum) {
      return !budget.admits_power(attack_sum_classifier(image, budget.p).power);
    }
    return robust_scan(image, own, budget);
  }

 private:
  bool robust_l0(const ImageTensor& image, Label own, long k) const {
    if (k <= 0) return true;
    const std::size_t dim = image.size();
    if (ball_size(dim, params_.max_level(), k) > BigInt(static_cast<unsigned long>(options_.ball_cap))) {
      throw Error(ErrorCode::BallTooLarge, "L0 ball of radius " + std::to_string(k) + " in " + to_string(params_) +
                                               " exceeds the enumeration cap");
    }
    std::vector<Level> levels(image.levels().begin(), image.levels().end());
    const std::uint64_t index = indexed_ ? image_index(image) : 0;
    const Level m = params_.max_level();
    std::function<bool(std::size_t, long, std::uint64_t)> walk = [&](std::size_t start, long left,
                                                                     std::uint64_t idx) {
      for (std::size_t pos = start; pos < dim; ++pos) {
        const Level orig = levels[pos];
        for (Level v = 0; v <= m; ++v) {
          if (v == orig) continue;
          levels[pos] = v;
          const std::uint64_t moved = idx + (static_cast<std::uint64_t>(v) - orig) * strides_[pos];
          const bool ok = label_of(moved, levels) == own && (left == 1 || walk(pos + 1, left - 1, moved));
          if (!ok) {
            levels[pos] = orig;
            return false;
          }
        }
        levels[pos] = orig;
      }
      return true;
    };
    return walk(0, k, index);
  }

  bool robust_scan(const ImageTensor& image, Label own, const PerturbationBudget& budget) const {
    const std::uint64_t total = enumerable_size(params_, options_.space_cap);
    const auto e = static_cast<unsigned long>(budget.p);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), params_.max_level(), e);
    const BigInt limit = floor_of(budget.threshold * ExactRational(scale));
    if (limit < 0) return true;
    const bool fast = limit.fits_ulong_p() &&
                      scale * BigInt(static_cast<unsigned long>(image.size())) < BigInt(1UL << 62);
    const std::uint64_t fast_limit = fast ? limit.get_ui() : 0;
    const std::uint64_t q = params_.level_count();

    std::vector<Level> digits(image.size(), 0);
    BigInt acc;
    BigInt term;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      if (idx > 0) {
        for (std::size_t i = digits.size(); i-- > 0;) {
          if (++digits[i] < q) break;
          digits[i] = 0;
        }
      }
      if (label_of(idx, digits) == own) continue;
      bool admitted;
      if (fast) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < digits.size() && sum <= fast_limit; ++i) {
          const std::uint64_t d = digits[i] > image[i] ? digits[i] - image[i] : image[i] - digits[i];
          std::uint64_t pw = 1;
          for (unsigned long t = 0; t < e; ++t) pw *= d;
          sum += pw;
        }
        admitted = sum <= fast_limit;
      } else {
        acc = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) {
          const unsigned long d = digits[i] > image[i] ? digits[i] - image[i] : image[i] - digits[i];
          mpz_ui_pow_ui(term.get_mpz_t(), d, e);
          acc += term;
        }
        admitted = acc <= limit;
      }
      if (admitted) return false;
    }
    return true;
  }

  const ClassifierHandle& c_;
  SpaceParams params_;
  RobustnessOptions options_;
  std::optional<ClassifierHandle::LabelTable> table_;
  bool indexed_ = false;
  std::vector<std::uint64_t> strides_;
};

// Robust counts of sum-classifier classes under an L1 budget, by level sum.
std::pair<BigInt, BigInt> sum_l1_counts(const SpaceParams& params, Label label, const ExactRational& threshold,
                                        std::size_t support_cap) {
  const DiscretePMF sums = pmf_iid_sum(pmf_uniform_levels(params.level_count()), static_cast<long>(params.dimension()),
                                       support_cap);
  const long m = static_cast<long>(params.max_level());
  const long total = static_cast<long>(params.dimension()) * m;
  const BigInt shift_big = floor_of(threshold * ExactRational(m));
  const long shift = shift_big.fits_slong_p() ? shift_big.get_si() : total;
  BigInt members = 0;
  BigInt robust = 0;
  for (long s = 0; s <= total; ++s) {
    const BigInt& w = sums.weights()[static_cast<std::size_t>(s - sums.offset())];
    if (label == 0 && 2 * s < total) {
      members += w;
      if (2 * (s + std::min(shift, total - s)) < total) robust += w;
    } else if (label == 1 && 2 * s >= total) {
      members += w;
      if (2 * (s - std::min(shift, s)) >= total) robust += w;
    }
  }
  return {members, robust};
}

}  // namespace

bool image_is_robust(const ClassifierHandle& c, const ImageTensor& image, const PerturbationBudget& budget,
                     const RobustnessOptions& options) {
  return Scanner(c, options, false).robust(image, budget);
}

ExactRational sum_exact_fraction_L1(const SpaceParams& params, double d, std::size_t support_cap) {
  params.validate();
  if (d < 0) return 1;
  const auto [members, robust] = sum_l1_counts(params, 0, exact_from_double(d), support_cap);
  if (members == 0) throw Error(ErrorCode::EmptyClass, "sum class 0 is empty");
  return make_rational(robust, members);
}

RobustnessReport class_robust_fraction(const ClassifierHandle& c, Label label, const PerturbationBudget& budget,
                                       const FractionRequest& request) {
  if (label < 0 || label >= c.label_count()) {
    throw Error(ErrorCode::EmptyClass, "label " + std::to_string(label) + " is not produced by " + c.name());
  }
  RobustnessReport report;
  report.params = c.params();
  report.classifier = c.name();
  report.label = label;
  report.budget = budget;
  report.method = request.method;

  switch (request.method) {
    case RobustMethod::Analytic: {
      if (c.kind() != ClassifierKind::Sum || budget.p != 1) {
        throw Error(ErrorCode::AnalyticUnavailable, "analytic fractions cover the sum classifier under L1");
      }
      auto [members, robust] = sum_l1_counts(c.params(), label, budget.threshold, kDefaultSupportCap);
      if (members == 0) throw Error(ErrorCode::EmptyClass, "sum class " + std::to_string(label) + " is empty");
      report.total = members;
      report.robust_count = robust;
      break;
    }
    case RobustMethod::Exhaustive: {
      const std::uint64_t total = enumerable_size(c.params(), request.limits.space_cap);
      const Scanner scanner(c, request.limits, true);
      const auto table = c.has_table() ? ClassifierHandle::LabelTable{} : materialize_labels(c, request.limits.space_cap);
      auto label_at = [&](std::uint64_t i) -> Label { return c.has_table() ? c.label_of_index(i) : table[i]; };
      const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 64));
      std::vector<std::uint64_t> members(chunks, 0);
      std::vector<std::uint64_t> robust(chunks, 0);
      parallel_chunks(total, chunks, resolve_threads(request.threads),
                      [&](std::size_t begin, std::size_t end, std::size_t k) {
                        for (std::size_t i = begin; i < end; ++i) {
                          if (label_at(i) != label) continue;
                          ++members[k];
                          if (scanner.robust(image_at(c.params(), i), budget)) ++robust[k];
                        }
                      });
      const std::uint64_t m = std::accumulate(members.begin(), members.end(), std::uint64_t{0});
      if (m == 0) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(label) + " of " + c.name() + " is empty");
      report.total = BigInt(static_cast<unsigned long>(m));
      report.robust_count = BigInt(static_cast<unsigned long>(std::accumulate(robust.begin(), robust.end(), std::uint64_t{0})));
      break;
    }
    case RobustMethod::MonteCarlo: {
      if (request.samples == 0) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs samples > 0");
      const ClassSampler sampler(c, label);
      const Scanner scanner(c, request.limits, true);
      const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(request.samples, 64));
      std::vector<std::uint64_t> robust(chunks, 0);
      parallel_chunks(request.samples, chunks, resolve_threads(request.threads),
                      [&](std::size_t begin, std::size_t end, std::size_t k) {
                        for (std::size_t s = begin; s < end; ++s) {
                          if (scanner.robust(sampler.draw(request.seed, s), budget)) ++robust[k];
                        }
                      });
      const std::uint64_t r = std::accumulate(robust.begin(), robust.end(), std::uint64_t{0});
      report.total = BigInt(static_cast<unsigned long>(request.samples));
      report.robust_count = BigInt(static_cast<unsigned long>(r));
      report.ci95 = wilson_interval(r, request.samples);
      report.samples = request.samples;
      report.seed = request.seed;
      break;
    }
  }
  report.fraction = make_rational(report.robust_count, report.total);
  return report;
}

namespace {

template <typename Check>
ReductionReport sweep(const ClassifierHandle& c, SweepMode mode, std::uint64_t samples, std::uint64_t seed,
                      const RobustnessOptions& options, std::string direction, Check check) {
  ReductionReport report;
  report.direction = std::move(direction);
  const Scanner scanner(c, options, true);
  auto visit = [&](const ImageTensor& image, std::uint64_t id) {
    ++report.checked;
    if (!check(scanner, image)) {
      ++report.violations;
      if (!report.counterexample) report.counterexample = id;
    }
  };
  if (mode == SweepMode::Exhaustive) {
    std::uint64_t index = 0;
    for (const ImageTensor& image : enumerate_space(c.params(), options.space_cap)) visit(image, index++);
  } else {
    if (samples == 0) throw Error(ErrorCode::InvalidArgument, "sampled sweep needs samples > 0");
    for (std::uint64_t s = 0; s < samples; ++s) {
      const ImageTensor image = sample_uniform(c.params(), seed, s);
      visit(image, c.params().total_images_u64() ? image_index(image) : s);
    }
  }
  return report;
}

}  // namespace

ReductionReport reduction_check_L1_to_L0(const ClassifierHandle& c, double d, SweepMode mode, std::uint64_t samples,
                                         std::uint64_t seed, const RobustnessOptions& options) {
  const PerturbationBudget l1 = PerturbationBudget::from_size(1, d);
  const PerturbationBudget l0 = PerturbationBudget::from_size(0, d);
  return sweep(c, mode, samples, seed, options, "L1 robust implies L0 robust",
               [&](const Scanner& s, const ImageTensor& image) { return !s.robust(image, l1) || s.robust(image, l0); });
}

ReductionReport reduction_check_L0_to_Lp(const ClassifierHandle& c, double d, int p, const RobustnessOptions& options) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "L0-to-Lp reduction needs p >= 2");
  const ExactRational dq = exact_from_double(d);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), c.params().max_level(), static_cast<unsigned long>(p));
  const PerturbationBudget l0 = PerturbationBudget::from_size(0, d);
  const PerturbationBudget small = PerturbationBudget::from_power(p, dq / ExactRational(scale));
  const PerturbationBudget large = PerturbationBudget::from_power(p, dq);
  return sweep(c, SweepMode::Exhaustive, 0, 0, options, "L0 robust iff bracketed by Lp budgets",
               [&](const Scanner& s, const ImageTensor& image) {
                 return s.robust(image, l0) ? s.robust(image, small) : !s.robust(image, large);
               });
}

bool Theorem1Report::all_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const Theorem1Row& r) { return r.holds; });
}

Theorem1Report theorem1_holds(const ClassifierHandle& c, std::span<const double> c_grid, std::uint64_t cap) {
  const SpaceParams& params = c.params();
  const std::uint64_t total = enumerable_size(params, cap);
  const auto table = c.has_table() ? ClassifierHandle::LabelTable{} : materialize_labels(c, cap);
  auto label_at = [&](std::uint64_t i) -> Label { return c.has_table() ? c.label_of_index(i) : table[i]; };
  // Image indices are Hamming vertices, and L0 distance is graph distance.
  const GraphParams graph = image_bijection(params).graph();

  Theorem1Report report;
  for (Label l = 0; l < c.label_count(); ++l) {
    HammingSubset other(graph);
    std::uint64_t size = 0;
    for (std::uint64_t i = 0; i < total; ++i) {
      if (label_at(i) == l) ++size;
      else other.insert(i);
    }
    const BigInt class_size(static_cast<unsigned long>(size));
    if (!is_interesting(class_size, params)) continue;
    const std::vector<int> dist = distance_to_set(other);
    for (double cv : c_grid) {
      if (!(cv > 0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
      Theorem1Row row;
      row.label = l;
      row.class_size = class_size;
      row.c = cv;
      row.budget = static_cast<long>(floor_scaled_sqrt(cv, static_cast<unsigned long long>(params.h) * params.n * params.n)) + 2;
      std::uint64_t robust = 0;
      for (std::uint64_t i = 0; i < total; ++i) {
        if (label_at(i) == l && (dist[i] < 0 || dist[i] > row.budget)) ++robust;
      }
      row.robust_count = BigInt(static_cast<unsigned long>(robust));
      row.fraction = make_rational(row.robust_count, class_size);
      const ExactRational cq = exact_from_double(cv);
      const Enclosure bound = scale_enclosure(exp_enclosure(-2 * cq * cq), ExactRational(2));
      const Verdict v = less_than(row.fraction, bound);
      if (v == Verdict::Undecided) {
        throw Error(ErrorCode::PrecisionInsufficient, "robust fraction within rounding of 2exp(-2c^2)");
      }
      row.holds = v == Verdict::Holds;
      row.bound = static_cast<double>(bound.mid());
      row.margin = static_cast<double>(bound.lo - to_real(row.fraction));
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

std::string report_to_json(const RobustnessReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.params.n;
  j["h"] = r.params.h;
  j["b"] = r.params.b;
  j["classifier"] = r.classifier;
  j["label"] = r.label;
  j["p"] = r.budget.p;
  j["size"] = r.budget.size;
  j["method"] = to_string(r.method);
  j["total"] = r.total.get_str();
  j["robust_count"] = r.robust_count.get_str();
  j["fraction"] = to_double(r.fraction);
  j["fraction_exact"] = r.fraction.get_str();
  if (r.ci95) {
    j["ci_lo"] = r.ci95->lo;
    j["ci_hi"] = r.ci95->hi;
  } else {
    j["ci_lo"] = nullptr;
    j["ci_hi"] = nullptr;
  }
  j["samples"] = r.samples ? nlohmann::ordered_json(*r.samples) : nlohmann::ordered_json(nullptr);
  j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

std::string report_csv_header() { return "n,h,b,classifier,label,p,size,method,fraction,ci_lo,ci_hi,samples,seed"; }

std::string report_to_csv(const RobustnessReport& r) {
  std::string row = std::to_string(r.params.n) + "," + std::to_string(r.params.h) + "," + std::to_string(r.params.b) +
                    "," + r.classifier + "," + std::to_string(r.label) + "," + std::to_string(r.budget.p) + "," +
                    shortest(r.budget.size) + "," + to_string(r.method) + "," + shortest(to_double(r.fraction)) + ",";
  if (r.ci95) row += shortest(r.ci95->lo) + "," + shortest(r.ci95->hi);
  else row += ",";
  row += "," + (r.samples ? std::to_string(*r.samples) : std::string());
  row += "," + (r.seed ? std::to_string(*r.seed) : std::string());
  return row;
}

}  // namespace robenv
