#include "robenv/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robenv/error.hpp"
#include "robenv/parallel.hpp"
#include "robenv/random.hpp"

namespace robenv {
namespace {

__extension__ typedef unsigned __int128 u128;

constexpr int kSubBits = 32;
constexpr std::uint64_t kSub = std::uint64_t{1} << kSubBits;

// Cell-walk state in integer units of 2^-(b + 32).
struct Walk {
  const ClassifierHandle& classifier;
  Label own;
  std::uint64_t levels;
  std::vector<std::uint64_t> point;
  u128 radius2;
  std::uint64_t cap;
  std::uint64_t examined = 0;
  std::optional<std::pair<u128, std::uint64_t>> best;

  u128 gap2(std::size_t j, std::uint64_t cell) const {
    const std::uint64_t lo = cell * kSub;
    const std::uint64_t hi = lo + kSub;
    const std::uint64_t x = point[j];
    const std::uint64_t g = x < lo ? lo - x : (x > hi ? x - hi : 0);
    return static_cast<u128>(g) * g;
  }

  void visit(std::size_t j, u128 partial, std::uint64_t index) {
    if (j == point.size()) {
      if (++examined > cap) {
        throw Error(ErrorCode::EnumerationCapExceeded, "cell walk exceeded " + std::to_string(cap) + " cells");
      }
      if (classifier.label_of_index(index) != own) {
        const std::pair<u128, std::uint64_t> cand{partial, index};
        if (!best || cand < *best) best = cand;
      }
      return;
    }
    // Gaps grow monotonically moving away from the cell holding p1.
    const std::uint64_t home = std::min(point[j] / kSub, levels - 1);
    for (std::uint64_t c = home;; ++c) {
      if (c >= levels) break;
      const u128 d = partial + gap2(j, c);
      if (d > radius2) break;
      visit(j + 1, d, index * levels + c);
    }
    for (std::uint64_t c = home; c-- > 0;) {
      const u128 d = partial + gap2(j, c);
      if (d > radius2) break;
      visit(j + 1, d, index * levels + c);
    }
  }
};

u128 scaled_radius2(double radius, std::uint64_t scale) {
  ExactRational r = exact_from_double(radius) * ExactRational(BigInt(static_cast<unsigned long>(scale)));
  r *= r;
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  if (mpz_sizeinbase(fl.get_mpz_t(), 2) >= 127) return std::numeric_limits<u128>::max() >> 1;
  u128 out = 0;
  std::size_t count = 0;
  std::uint64_t words[2] = {0, 0};
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, fl.get_mpz_t());
  out = (static_cast<u128>(words[1]) << 64) | words[0];
  return out;
}

Real discretization_bound(const SpaceParams& params, double radius) {
  const Real slack = 2 * Real(params.n) * boost::multiprecision::sqrt(Real(params.h)) / Real(params.level_count());
  return real_from_double(radius) + slack;
}

void check_radius(double radius) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw Error(ErrorCode::InvalidArgument, "radius must be finite and >= 0");
}

}  // namespace

ContinuousPoint sample_in_cell(const ImageTensor& image, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  const double q = static_cast<double>(image.params().level_count());
  ContinuousPoint point(image.size());
  for (std::size_t j = 0; j < image.size(); ++j) {
    const double u = static_cast<double>(rng.next() >> kSubBits) / static_cast<double>(kSub);
    point[j] = (static_cast<double>(image[j]) + u) / q;
  }
  return point;
}

PerturbationOutcome find_perturbation(const ClassifierHandle& c, const ImageTensor& image, double radius,
                                      std::uint64_t seed, const CellWalkOptions& options) {
  const SpaceParams& params = image.params();
  if (static_cast<long>(params.dimension()) > options.max_dimension) {
    throw Error(ErrorCode::DimensionTooLarge, "cell walk needs n^2 h <= " + std::to_string(options.max_dimension));
  }
  check_radius(radius);
  PerturbationOutcome out;
  out.start = sample_in_cell(image, seed);

  const std::uint64_t q = params.level_count();
  Walk walk{c, c.decide(image), q, {}, scaled_radius2(radius, q * kSub), options.cell_cap, 0, std::nullopt};
  walk.point.resize(image.size());
  for (std::size_t j = 0; j < image.size(); ++j) {
    walk.point[j] = static_cast<std::uint64_t>(std::ldexp(out.start[j], params.b + kSubBits));
  }
  walk.visit(0, 0, 0);
  out.cells_examined = walk.examined;

  const Real bound = discretization_bound(params, radius);
  out.bound = static_cast<double>(bound);
  if (walk.best) {
    ImageTensor result = image_at(params, walk.best->second);
    const Real moved = boost::multiprecision::sqrt(to_real(norm_power(image, result, 2)));
    out.l2_moved = static_cast<double>(moved);
    out.within_bound = moved <= bound;
    out.result = std::move(result);
  }
  return out;
}

std::optional<std::uint64_t> nearest_other_cell_scan(const ClassifierHandle& c, const ImageTensor& image,
                                                     const ContinuousPoint& point, double radius, std::uint64_t cap) {
  const SpaceParams& params = image.params();
  if (point.size() != image.size()) throw Error(ErrorCode::ShapeMismatch, "point dimension");
  check_radius(radius);
  const Label own = c.decide(image);
  const ExactRational side(1, static_cast<unsigned long>(params.level_count()));
  std::vector<ExactRational> coords;
  coords.reserve(point.size());
  for (double x : point) coords.push_back(exact_from_double(x));
  const ExactRational r = exact_from_double(radius);
  const ExactRational r2 = r * r;

  std::optional<std::pair<ExactRational, std::uint64_t>> best;
  std::uint64_t index = 0;
  for (const ImageTensor& cell : enumerate_space(params, cap)) {
    if (c.decide(cell) != own) {
      ExactRational d2 = 0;
      for (std::size_t j = 0; j < coords.size(); ++j) {
        const ExactRational lo = side * cell[j];
        const ExactRational hi = lo + side;
        ExactRational g = 0;
        if (coords[j] < lo) g = lo - coords[j];
        else if (coords[j] > hi) g = coords[j] - hi;
        d2 += g * g;
      }
      if (d2 <= r2 && (!best || d2 < best->first)) best = std::make_pair(d2, index);
    }
    ++index;
  }
  if (!best) return std::nullopt;
  return best->second;
}

FailureRate failure_rate(const ClassifierHandle& c, Label label, double radius, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads, const CellWalkOptions& options) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  check_radius(radius);
  ClassSampler sampler(c, label);

  FailureRate out;
  out.samples = samples;
  if (const auto total = c.params().total_images_u64(); total && *total <= kDefaultImageCap) {
    const auto sizes = class_sizes(c, c.kind() == ClassifierKind::Sum ? CountMode::Analytic : CountMode::Exhaustive);
    out.class_interesting = sizes[static_cast<std::size_t>(label)].interesting;
    const auto nonempty = std::count_if(sizes.begin(), sizes.end(), [](const ClassSummary& s) { return s.count > 0; });
    if (nonempty < 2) throw Error(ErrorCode::NoOtherClass, c.name() + " has a single nonempty class");
  } else if (c.kind() == ClassifierKind::Sum) {
    out.class_interesting = is_interesting(class_sizes(c, CountMode::Analytic)[static_cast<std::size_t>(label)], c.params());
  }

  const std::uint64_t walk_seed = mix_seed(seed, 0x5eedULL);
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(samples, 64));
  std::vector<std::uint64_t> failures(chunks, 0);
  std::vector<char> held(chunks, 1);
  parallel_chunks(samples, chunks, resolve_threads(threads), [&](std::size_t begin, std::size_t end, std::size_t k) {
    for (std::size_t s = begin; s < end; ++s) {
      const ImageTensor image = sampler.draw(seed, s);
      const PerturbationOutcome o = find_perturbation(c, image, radius, mix_seed(walk_seed, s), options);
      if (!o.success()) ++failures[k];
      else if (!o.within_bound) held[k] = 0;
    }
  });
  out.failures = std::accumulate(failures.begin(), failures.end(), std::uint64_t{0});
  out.contract_held = std::all_of(held.begin(), held.end(), [](char h) { return h != 0; });
  out.rate = static_cast<double>(out.failures) / static_cast<double>(samples);
  out.ci95 = wilson_interval(out.failures, samples);
  out.bound = 2 * std::exp(-radius * radius / 2);
  return out;
}

namespace {

// sum |a_i - b_i|^e over levels (e = 0 counts differences).
BigInt level_power(std::span<const Level> a, std::span<const Level> b, unsigned e) {
  BigInt acc = 0;
  BigInt term;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned long d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (d == 0) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), d, e);
    acc += term;
  }
  return acc;
}

MinimalPerturbation finish(const ImageTensor& witness, int p, BigInt level_pow) {
  MinimalPerturbation out{p, ExactRational(level_pow), 0.0, witness};
  if (p >= 1) {
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), witness.params().max_level(), static_cast<unsigned long>(p));
    out.power = make_rational(level_pow, scale);
  }
  out.distance = p <= 1 ? to_double(out.power) : std::pow(to_double(out.power), 1.0 / p);
  return out;
}

void check_norm(int p) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "norm p must be >= 0");
}

}  // namespace

MinimalPerturbation minimal_perturbation(const ClassifierHandle& c, const ImageTensor& image, int p, std::uint64_t cap) {
  check_norm(p);
  const Label own = c.decide(image);
  const unsigned e = static_cast<unsigned>(p);
  std::optional<std::pair<BigInt, std::uint64_t>> best;
  std::uint64_t index = 0;
  for (const ImageTensor& other : enumerate_space(image.params(), cap)) {
    if (c.decide(other) != own) {
      BigInt pw = level_power(image.levels(), other.levels(), e);
      if (!best || pw < best->first) best = std::make_pair(std::move(pw), index);
    }
    ++index;
  }
  if (!best) throw Error(ErrorCode::NoOtherClass, c.name() + " assigns every image the same label");
  return finish(image_at(image.params(), best->second), p, best->first);
}

MinimalPerturbation attack_sum_classifier(const ImageTensor& image, int p) {
  check_norm(p);
  const SpaceParams& params = image.params();
  const std::uint64_t m = params.max_level();
  const std::uint64_t total = static_cast<std::uint64_t>(params.dimension()) * m;
  const std::uint64_t sum = image.level_sum();
  const std::uint64_t flip_at = (total + 1) / 2;  // smallest sum with label 1
  const bool raise = 2 * sum < total;
  if (!raise && flip_at == 0) throw Error(ErrorCode::NoOtherClass, "every level sum has label 1");
  const std::uint64_t need = raise ? flip_at - sum : sum - (flip_at - 1);

  const std::size_t dim = image.size();
  std::vector<std::uint64_t> room(dim);
  for (std::size_t i = 0; i < dim; ++i) room[i] = raise ? m - image[i] : image[i];

  std::vector<std::uint64_t> shift(dim, 0);
  if (p <= 1) {
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return room[a] > room[b]; });
    std::uint64_t left = need;
    for (std::size_t i : order) {
      if (left == 0) break;
      shift[i] = std::min(room[i], left);
      left -= shift[i];
    }
  } else {
    // Convex per-channel cost: each unit goes to the least-shifted channel.
    for (std::uint64_t u = 0; u < need; ++u) {
      std::size_t pick = dim;
      for (std::size_t i = 0; i < dim; ++i) {
        if (shift[i] < room[i] && (pick == dim || shift[i] < shift[pick])) pick = i;
      }
      ++shift[pick];
    }
  }

  std::vector<Level> levels(image.levels().begin(), image.levels().end());
  for (std::size_t i = 0; i < dim; ++i) {
    levels[i] = static_cast<Level>(raise ? levels[i] + shift[i] : levels[i] - shift[i]);
  }
  ImageTensor witness(params, std::move(levels));
  return finish(witness, p, level_power(image.levels(), witness.levels(), static_cast<unsigned>(p)));
}

}  // namespace robenv
