#include "robenv/classifiers.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "robenv/error.hpp"
#include "robenv/pmf.hpp"
#include "robenv/random.hpp"

namespace robenv {

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Sum: return "sum";
    case ClassifierKind::Constant: return "constant";
    case ClassifierKind::Uniform: return "uniform";
    case ClassifierKind::Balanced: return "balanced";
    case ClassifierKind::LinearThreshold: return "linthresh";
    case ClassifierKind::Custom: return "custom";
  }
  return "unknown";
}

ClassifierHandle::ClassifierHandle(SpaceParams params, int label_count, ClassifierKind kind, std::string name,
                                   DecideFn decide)
    : params_(params), label_count_(label_count), kind_(kind), name_(std::move(name)), decide_(std::move(decide)) {
  params_.validate();
  if (label_count_ < 1) throw Error(ErrorCode::InvalidArgument, "label_count must be positive");
  if (!decide_) throw Error(ErrorCode::InvalidArgument, "classifier needs a decision function");
}

ClassifierHandle::ClassifierHandle(SpaceParams params, int label_count, ClassifierKind kind, std::string name,
                                   std::shared_ptr<const LabelTable> table)
    : params_(params), label_count_(label_count), kind_(kind), name_(std::move(name)), table_(std::move(table)) {
  params_.validate();
  if (label_count_ < 1) throw Error(ErrorCode::InvalidArgument, "label_count must be positive");
  const auto total = params_.total_images_u64();
  if (!table_ || !total || table_->size() != *total) {
    throw Error(ErrorCode::ShapeMismatch, "label table must cover every image");
  }
  for (auto l : *table_) {
    if (l >= label_count_) throw Error(ErrorCode::InvalidArgument, "label table entry out of range");
  }
}

Label ClassifierHandle::decide(const ImageTensor& image) const {
  if (!(image.params() == params_)) {
    throw Error(ErrorCode::ShapeMismatch, "image " + to_string(image.params()) + " vs classifier " + to_string(params_));
  }
  if (table_) return (*table_)[image_index(image)];
  return decide_(image);
}

Label ClassifierHandle::label_of_index(std::uint64_t index) const {
  if (table_) {
    if (index >= table_->size()) throw Error(ErrorCode::InvalidArgument, "image index out of range");
    return (*table_)[index];
  }
  return decide_(image_at(params_, index));
}

ClassifierHandle sum_classifier(const SpaceParams& params) {
  params.validate();
  const std::uint64_t threshold = static_cast<std::uint64_t>(params.dimension()) * params.max_level();
  return ClassifierHandle(params, 2, ClassifierKind::Sum, "sum", [threshold](const ImageTensor& image) {
    return 2 * image.level_sum() < threshold ? 0 : 1;
  });
}

ClassifierHandle constant_classifier(const SpaceParams& params) {
  return ClassifierHandle(params, 1, ClassifierKind::Constant, "constant", [](const ImageTensor&) { return 0; });
}

namespace {

std::shared_ptr<const ClassifierHandle::LabelTable> balanced_table(std::uint64_t total, int labels, std::uint64_t seed) {
  std::vector<std::uint64_t> order(total);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  CounterRng rng(seed, 0);
  for (std::uint64_t i = total; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  auto table = std::make_shared<ClassifierHandle::LabelTable>(total);
  for (std::uint64_t pos = 0; pos < total; ++pos) {
    (*table)[order[pos]] = static_cast<std::uint16_t>(pos % static_cast<std::uint64_t>(labels));
  }
  return table;
}

std::shared_ptr<const ClassifierHandle::LabelTable> uniform_table(std::uint64_t total, int labels, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  auto table = std::make_shared<ClassifierHandle::LabelTable>(total);
  for (auto& l : *table) l = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(labels)));
  return table;
}

ClassifierHandle linear_threshold(const SpaceParams& params, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<std::int64_t> weights(params.dimension());
  std::int64_t weight_sum = 0;
  for (auto& w : weights) {
    const auto v = static_cast<std::int64_t>(rng.below(18));
    w = v < 9 ? v - 9 : v - 8;
    weight_sum += w;
  }
  const auto m = static_cast<std::int64_t>(params.max_level());
  const std::int64_t jitter = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * m + 1))) - m;
  const std::int64_t offset = weight_sum * m + 2 * jitter;
  return ClassifierHandle(params, 2, ClassifierKind::LinearThreshold, "linthresh:" + std::to_string(seed),
                          [weights = std::move(weights), offset](const ImageTensor& image) {
                            std::int64_t acc = 0;
                            for (std::size_t i = 0; i < weights.size(); ++i) {
                              acc += weights[i] * static_cast<std::int64_t>(image[i]);
                            }
                            return 2 * acc >= offset ? 1 : 0;
                          });
}

std::uint64_t parse_u64(const std::string& text, const std::string& spec) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidArgument, "bad number '" + text + "' in classifier spec '" + spec + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ClassifierHandle random_classifier(const SpaceParams& params, int label_count, RandomKind kind, std::uint64_t seed,
                                   std::uint64_t cap) {
  params.validate();
  if (label_count < 2 || label_count > 65535) throw Error(ErrorCode::InvalidArgument, "label_count must be in [2, 65535]");
  switch (kind) {
    case RandomKind::LinearThreshold:
      if (label_count != 2) throw Error(ErrorCode::InvalidArgument, "linear threshold classifiers have two labels");
      return linear_threshold(params, seed);
    case RandomKind::Balanced: {
      const std::uint64_t total = enumerable_size(params, cap);
      std::string name = "balanced:" + std::to_string(seed);
      if (label_count != 2) name += ":" + std::to_string(label_count);
      return ClassifierHandle(params, label_count, ClassifierKind::Balanced, std::move(name),
                              balanced_table(total, label_count, seed));
    }
    case RandomKind::Uniform: {
      const std::uint64_t total = enumerable_size(params, cap);
      return ClassifierHandle(params, label_count, ClassifierKind::Uniform,
                              "uniform:" + std::to_string(seed) + ":" + std::to_string(label_count),
                              uniform_table(total, label_count, seed));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier kind");
}

ClassifierHandle parse_classifier_spec(const SpaceParams& params, const std::string& spec, std::uint64_t cap) {
  const auto parts = split(spec, ':');
  const std::string& head = parts[0];
  if (head == "sum" && parts.size() == 1) return sum_classifier(params);
  if (head == "constant" && parts.size() == 1) return constant_classifier(params);
  if (head == "balanced" && (parts.size() == 2 || parts.size() == 3)) {
    const int labels = parts.size() == 3 ? static_cast<int>(parse_u64(parts[2], spec)) : 2;
    return random_classifier(params, labels, RandomKind::Balanced, parse_u64(parts[1], spec), cap);
  }
  if (head == "uniform" && parts.size() == 3) {
    return random_classifier(params, static_cast<int>(parse_u64(parts[2], spec)), RandomKind::Uniform,
                             parse_u64(parts[1], spec), cap);
  }
  if (head == "linthresh" && parts.size() == 2) {
    return random_classifier(params, 2, RandomKind::LinearThreshold, parse_u64(parts[1], spec), cap);
  }
  throw Error(ErrorCode::InvalidArgument, "unrecognized classifier spec '" + spec + "'");
}

ClassifierHandle::LabelTable materialize_labels(const ClassifierHandle& c, std::uint64_t cap) {
  const std::uint64_t total = enumerable_size(c.params(), cap);
  ClassifierHandle::LabelTable table(total);
  std::uint64_t i = 0;
  for (const ImageTensor& image : enumerate_space(c.params(), cap)) {
    table[i++] = static_cast<std::uint16_t>(c.decide(image));
  }
  return table;
}

bool is_interesting(const BigInt& count, const SpaceParams& params) {
  return count >= 1 && 2 * count <= params.total_images();
}

bool is_interesting(const ClassSummary& summary, const SpaceParams& params) {
  return is_interesting(summary.count, params);
}

std::vector<ClassSummary> class_sizes(const ClassifierHandle& c, CountMode mode, std::uint64_t cap) {
  const SpaceParams& params = c.params();
  std::vector<ClassSummary> out(static_cast<std::size_t>(c.label_count()));
  for (std::size_t l = 0; l < out.size(); ++l) out[l].label = static_cast<Label>(l);

  if (mode == CountMode::Analytic) {
    if (c.kind() != ClassifierKind::Sum) {
      throw Error(ErrorCode::AnalyticUnavailable, "analytic class sizes exist only for the sum classifier");
    }
    const DiscretePMF sums = pmf_iid_sum(pmf_uniform_levels(params.level_count()),
                                         static_cast<long>(params.dimension()));
    // Uniform weights are all 1, so the summed weights are image counts.
    const long threshold = static_cast<long>(params.dimension() * params.max_level());
    out[0].count = sums.cdf_weight((threshold - 1) / 2);
    out[1].count = params.total_images() - out[0].count;
  } else {
    std::vector<std::uint64_t> counts(out.size(), 0);
    if (c.has_table()) {
      const std::uint64_t total = enumerable_size(params, cap);
      for (std::uint64_t i = 0; i < total; ++i) ++counts[static_cast<std::size_t>(c.label_of_index(i))];
    } else {
      for (const ImageTensor& image : enumerate_space(params, cap)) ++counts[static_cast<std::size_t>(c.decide(image))];
    }
    for (std::size_t l = 0; l < out.size(); ++l) out[l].count = BigInt(static_cast<unsigned long>(counts[l]));
  }
  for (auto& s : out) s.interesting = is_interesting(s, params);
  return out;
}

namespace {

BigInt random_below(CounterRng& rng, const BigInt& bound) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  BigInt x;
  for (;;) {
    for (auto& w : buf) w = rng.next();
    mpz_import(x.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
    mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
    if (x < bound) return x;
  }
}

constexpr std::uint64_t kCompositionTableCap = std::uint64_t{1} << 22;

}  // namespace

// ways[j][s]: level vectors of length j summing to s.
struct ClassSampler::Composition {
  std::vector<std::vector<BigInt>> ways;
  long lo_sum = 0;
  long hi_sum = 0;
  BigInt class_count;
};

ClassSampler::ClassSampler(ClassifierHandle c, Label label, Strategy strategy, std::uint64_t max_tries)
    : classifier_(std::move(c)), label_(label), max_tries_(max_tries) {
  if (label < 0 || label >= classifier_.label_count()) {
    throw Error(ErrorCode::EmptyClass, "label " + std::to_string(label) + " is not produced by " + classifier_.name());
  }
  const SpaceParams& params = classifier_.params();
  const auto dim = static_cast<long>(params.dimension());
  const auto m = static_cast<long>(params.max_level());
  const long total = dim * m;
  if (strategy == Strategy::Auto && classifier_.kind() == ClassifierKind::Sum &&
      static_cast<std::uint64_t>(dim) * static_cast<std::uint64_t>(total + 1) <= kCompositionTableCap) {
    auto comp = std::make_unique<Composition>();
    comp->ways.assign(static_cast<std::size_t>(dim + 1), std::vector<BigInt>(static_cast<std::size_t>(total + 1)));
    comp->ways[0][0] = 1;
    for (long j = 1; j <= dim; ++j) {
      const auto& prev = comp->ways[static_cast<std::size_t>(j - 1)];
      auto& cur = comp->ways[static_cast<std::size_t>(j)];
      for (long s = 0; s <= j * m; ++s) {
        for (long l = 0; l <= std::min(m, s); ++l) cur[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - l)];
      }
    }
    // Label 0 iff 2s < total.
    comp->lo_sum = label == 0 ? 0 : (total + 1) / 2;
    comp->hi_sum = label == 0 ? (total + 1) / 2 - 1 : total;
    for (long s = comp->lo_sum; s <= comp->hi_sum; ++s) comp->class_count += comp->ways.back()[static_cast<std::size_t>(s)];
    if (comp->class_count == 0) throw Error(ErrorCode::EmptyClass, "sum class " + std::to_string(label) + " is empty");
    composition_ = std::move(comp);
    return;
  }
  if (const auto total_images = params.total_images_u64(); total_images && *total_images <= kDefaultImageCap) {
    const auto sizes = class_sizes(classifier_, CountMode::Exhaustive);
    if (sizes[static_cast<std::size_t>(label)].count == 0) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(label) + " of " + classifier_.name() + " is empty");
    }
  }
}

ClassSampler::~ClassSampler() = default;
ClassSampler::ClassSampler(ClassSampler&&) noexcept = default;

bool ClassSampler::uses_rejection() const { return composition_ == nullptr; }

ImageTensor ClassSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  const SpaceParams& params = classifier_.params();
  if (composition_) {
    CounterRng rng(seed, index);
    BigInt rank = random_below(rng, composition_->class_count);
    const auto dim = static_cast<long>(params.dimension());
    const auto m = static_cast<long>(params.max_level());
    long s = composition_->lo_sum;
    for (;; ++s) {
      const BigInt& w = composition_->ways.back()[static_cast<std::size_t>(s)];
      if (rank < w) break;
      rank -= w;
    }
    std::vector<Level> levels(static_cast<std::size_t>(dim));
    for (long i = 0; i < dim; ++i) {
      const auto& rest = composition_->ways[static_cast<std::size_t>(dim - i - 1)];
      for (long l = 0; l <= std::min(m, s); ++l) {
        const BigInt& w = rest[static_cast<std::size_t>(s - l)];
        if (rank < w) {
          levels[static_cast<std::size_t>(i)] = static_cast<Level>(l);
          s -= l;
          break;
        }
        rank -= w;
      }
    }
    return ImageTensor(params, std::move(levels));
  }
  const std::uint64_t stream = mix_seed(seed, index);
  for (std::uint64_t t = 0; t < max_tries_; ++t) {
    ImageTensor candidate = sample_uniform(params, stream, t);
    if (classifier_.decide(candidate) == label_) return candidate;
  }
  throw Error(ErrorCode::EmptyClass, "no member of class " + std::to_string(label_) + " found in " +
                                         std::to_string(max_tries_) + " draws");
}

}  // namespace robenv
