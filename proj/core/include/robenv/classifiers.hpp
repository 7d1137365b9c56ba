#pragma once

// Classifiers over a discrete image space and class accounting.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robenv/image_space.hpp"
#include "robenv/real.hpp"

namespace robenv {

using Label = int;

enum class ClassifierKind { Sum, Constant, Uniform, Balanced, LinearThreshold, Custom };

std::string to_string(ClassifierKind kind);

// Immutable and cheap to copy; decide() is reentrant.
class ClassifierHandle {
 public:
  using DecideFn = std::function<Label(const ImageTensor&)>;
  using LabelTable = std::vector<std::uint16_t>;

  ClassifierHandle(SpaceParams params, int label_count, ClassifierKind kind, std::string name, DecideFn decide);
  // Labels given per image index.
  ClassifierHandle(SpaceParams params, int label_count, ClassifierKind kind, std::string name,
                   std::shared_ptr<const LabelTable> table);

  const SpaceParams& params() const { return params_; }
  int label_count() const { return label_count_; }
  ClassifierKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  Label decide(const ImageTensor& image) const;
  Label label_of_index(std::uint64_t index) const;
  bool has_table() const { return table_ != nullptr; }

 private:
  SpaceParams params_;
  int label_count_;
  ClassifierKind kind_;
  std::string name_;
  DecideFn decide_;
  std::shared_ptr<const LabelTable> table_;
};

// Label 0 iff 2 * (sum of levels) < n^2 h (2^b - 1); ties go to label 1.
ClassifierHandle sum_classifier(const SpaceParams& params);
ClassifierHandle constant_classifier(const SpaceParams& params);

enum class RandomKind { Uniform, Balanced, LinearThreshold };

// Uniform: each image labeled independently. Balanced: a seeded permutation
// dealt round-robin, so class sizes differ by at most one. LinearThreshold:
// two labels split by sum w_i level_i >= theta with integer weights in
// [-9, 9] \ {0}; works on any space.
ClassifierHandle random_classifier(const SpaceParams& params, int label_count, RandomKind kind, std::uint64_t seed,
                                   std::uint64_t cap = kDefaultImageCap);

// "sum", "constant", "balanced:<seed>[:<labels>]", "uniform:<seed>:<labels>",
// "linthresh:<seed>". Throws InvalidArgument on anything else.
ClassifierHandle parse_classifier_spec(const SpaceParams& params, const std::string& spec,
                                       std::uint64_t cap = kDefaultImageCap);

// Labels of every image in index order.
ClassifierHandle::LabelTable materialize_labels(const ClassifierHandle& c, std::uint64_t cap = kDefaultImageCap);

struct ClassSummary {
  Label label = 0;
  BigInt count;
  bool interesting = false;
};

enum class CountMode { Exhaustive, Analytic };

std::vector<ClassSummary> class_sizes(const ClassifierHandle& c, CountMode mode,
                                      std::uint64_t cap = kDefaultImageCap);
bool is_interesting(const ClassSummary& summary, const SpaceParams& params);
bool is_interesting(const BigInt& count, const SpaceParams& params);

// Draws images uniformly from one class. The sum classifier uses an exact
// conditional sampler (level sum from its distribution, then a uniform
// bounded composition); other classifiers use rejection from the space.
class ClassSampler {
 public:
  enum class Strategy { Auto, Rejection };

  ClassSampler(ClassifierHandle c, Label label, Strategy strategy = Strategy::Auto,
               std::uint64_t max_tries = std::uint64_t{1} << 20);
  ~ClassSampler();
  ClassSampler(ClassSampler&&) noexcept;

  // Sample `index` of stream `seed`; throws EmptyClass if rejection finds no
  // member within max_tries.
  ImageTensor draw(std::uint64_t seed, std::uint64_t index) const;
  bool uses_rejection() const;

 private:
  struct Composition;
  ClassifierHandle classifier_;
  Label label_;
  std::uint64_t max_tries_;
  std::unique_ptr<Composition> composition_;
};

}  // namespace robenv
