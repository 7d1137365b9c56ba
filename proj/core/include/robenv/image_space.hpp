#pragma once

// Discrete image spaces I_{n,h,b}.
//
// Images are stored as integer channel levels in [0, 2^b - 1]; the real
// channel value of a level is level / (2^b - 1). Flattening is row-major over
// (x, y, channel), and the same order defines image indices: the first
// channel is the most significant base-2^b digit.

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robenv/real.hpp"

namespace robenv {

using Level = std::uint32_t;

inline constexpr int kMaxBitDepth = 16;
inline constexpr std::uint64_t kDefaultImageCap = std::uint64_t{1} << 20;

struct SpaceParams {
  int n = 1;  // pixels per side
  int h = 1;  // channels per pixel
  int b = 1;  // bit depth

  void validate() const;

  std::size_t dimension() const { return static_cast<std::size_t>(n) * n * h; }
  std::uint32_t level_count() const { return std::uint32_t{1} << b; }
  Level max_level() const { return level_count() - 1; }
  BigInt total_images() const;
  // Exact image count when it fits in 64 bits.
  std::optional<std::uint64_t> total_images_u64() const;

  friend bool operator==(const SpaceParams&, const SpaceParams&) = default;
};

std::string to_string(const SpaceParams& params);

class ImageTensor {
 public:
  ImageTensor(SpaceParams params, std::vector<Level> levels);

  static ImageTensor filled(const SpaceParams& params, Level level);

  const SpaceParams& params() const { return params_; }
  std::span<const Level> levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  Level operator[](std::size_t i) const { return levels_[i]; }
  Level at(int x, int y, int channel) const;
  std::size_t offset_of(int x, int y, int channel) const;
  std::uint64_t level_sum() const;

  // Copy with one channel replaced.
  ImageTensor with_level(std::size_t i, Level level) const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  SpaceParams params_;
  std::vector<Level> levels_;
};

double value_of_level(Level level, int b);
ExactRational exact_value_of_level(Level level, int b);

// ||a - b||_p^max(p,1) in real channel units, exactly. p = 0 counts
// differing channels.
ExactRational norm_power(const ImageTensor& a, const ImageTensor& b, int p);
// Exact distance for p in {0, 1}.
ExactRational exact_norm_distance(const ImageTensor& a, const ImageTensor& b, int p);
double norm_distance(const ImageTensor& a, const ImageTensor& b, int p);

// A perturbation budget ||.||_p <= size, compared exactly through
// size^max(p,1) (for p = 0 the threshold is the size itself).
struct PerturbationBudget {
  int p = 0;
  double size = 0.0;
  ExactRational threshold;

  static PerturbationBudget from_size(int p, double size);
  // Budget whose size^p is exactly `power` (e.g. sizes like d^(1/p)).
  static PerturbationBudget from_power(int p, const ExactRational& power);

  bool admits_power(const ExactRational& norm_pow) const { return norm_pow <= threshold; }
  bool admits(const ImageTensor& a, const ImageTensor& b) const;
  // Largest number of changed channels an L0 budget allows.
  long max_changes() const;
};

std::uint64_t image_index(const ImageTensor& image);
ImageTensor image_at(const SpaceParams& params, std::uint64_t index);

// Iterates every image of an enumerable space in index order.
class SpaceRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = ImageTensor;
    using difference_type = std::ptrdiff_t;
    using pointer = const ImageTensor*;
    using reference = const ImageTensor&;

    iterator() = default;
    iterator(const SpaceParams& params, std::uint64_t index, std::uint64_t total);

    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& other) const { return index_ == other.index_; }

   private:
    std::optional<ImageTensor> current_;
    std::vector<Level> digits_;
    std::uint64_t index_ = 0;
    std::uint64_t total_ = 0;
  };

  SpaceRange(SpaceParams params, std::uint64_t total) : params_(params), total_(total) {}

  iterator begin() const { return iterator(params_, 0, total_); }
  iterator end() const { return iterator(params_, total_, total_); }
  std::uint64_t size() const { return total_; }

 private:
  SpaceParams params_;
  std::uint64_t total_;
};

// Throws SpaceTooLarge if the space has more than `cap` images.
std::uint64_t enumerable_size(const SpaceParams& params, std::uint64_t cap = kDefaultImageCap);
SpaceRange enumerate_space(const SpaceParams& params, std::uint64_t cap = kDefaultImageCap);

// Each level independently uniform; stream `index` of `seed`.
ImageTensor sample_uniform(const SpaceParams& params, std::uint64_t seed, std::uint64_t index = 0);

// Canonical JSON: {"n":..,"h":..,"b":..,"levels":[..]} with no whitespace.
std::string encode_image(const ImageTensor& image);
ImageTensor decode_image(std::string_view text);

using ContinuousPoint = std::vector<double>;

ContinuousPoint flatten(const ImageTensor& image);
// Image whose cell contains the point. Cells are [x 2^-b, (x+1) 2^-b) except
// the last, which is closed at 1.
ImageTensor cell_of_point(const SpaceParams& params, std::span<const double> point);

}  // namespace robenv
