#include "robenv/image_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "robenv/error.hpp"
#include "robenv/random.hpp"

namespace robenv {

void SpaceParams::validate() const {
  if (n < 1 || h < 1 || b < 1) throw Error(ErrorCode::InvalidArgument, "n, h, b must all be >= 1");
  if (b > kMaxBitDepth) {
    throw Error(ErrorCode::BitDepthTooLarge, "bit depth above " + std::to_string(kMaxBitDepth));
  }
}

BigInt SpaceParams::total_images() const {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(dimension() * static_cast<std::size_t>(b)));
  return out;
}

std::optional<std::uint64_t> SpaceParams::total_images_u64() const {
  const std::size_t bits = dimension() * static_cast<std::size_t>(b);
  if (bits >= 64) return std::nullopt;
  return std::uint64_t{1} << bits;
}

std::string to_string(const SpaceParams& p) {
  return "(" + std::to_string(p.n) + "," + std::to_string(p.h) + "," + std::to_string(p.b) + ")";
}

ImageTensor::ImageTensor(SpaceParams params, std::vector<Level> levels)
    : params_(params), levels_(std::move(levels)) {
  params_.validate();
  if (levels_.size() != params_.dimension()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(params_.dimension()) + " levels, got " +
                                              std::to_string(levels_.size()));
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] > params_.max_level()) {
      throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(levels_[i]) + " at offset " +
                                                  std::to_string(i) + " exceeds " +
                                                  std::to_string(params_.max_level()));
    }
  }
}

ImageTensor ImageTensor::filled(const SpaceParams& params, Level level) {
  params.validate();
  return ImageTensor(params, std::vector<Level>(params.dimension(), level));
}

std::size_t ImageTensor::offset_of(int x, int y, int channel) const {
  if (x < 0 || x >= params_.n || y < 0 || y >= params_.n || channel < 0 || channel >= params_.h) {
    throw Error(ErrorCode::InvalidArgument, "pixel coordinate out of range");
  }
  return (static_cast<std::size_t>(x) * params_.n + static_cast<std::size_t>(y)) * params_.h +
         static_cast<std::size_t>(channel);
}

Level ImageTensor::at(int x, int y, int channel) const { return levels_[offset_of(x, y, channel)]; }

std::uint64_t ImageTensor::level_sum() const {
  std::uint64_t s = 0;
  for (Level l : levels_) s += l;
  return s;
}

ImageTensor ImageTensor::with_level(std::size_t i, Level level) const {
  std::vector<Level> copy = levels_;
  copy.at(i) = level;
  return ImageTensor(params_, std::move(copy));
}

double value_of_level(Level level, int b) {
  return to_double(exact_value_of_level(level, b));
}

ExactRational exact_value_of_level(Level level, int b) {
  if (b < 1 || b > kMaxBitDepth) throw Error(ErrorCode::BitDepthTooLarge, "unsupported bit depth");
  const Level max = (Level{1} << b) - 1;
  if (level > max) throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level) + " above " + std::to_string(max));
  return make_rational(BigInt(level), BigInt(max));
}

namespace {

void require_same_space(const ImageTensor& a, const ImageTensor& b) {
  if (!(a.params() == b.params())) throw Error(ErrorCode::ShapeMismatch, "images from different spaces");
}

}  // namespace

ExactRational norm_power(const ImageTensor& a, const ImageTensor& b, int p) {
  require_same_space(a, b);
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "norm order must be >= 0");
  BigInt sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Level d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (d == 0) continue;
    if (p == 0) {
      sum += 1;
    } else {
      BigInt term;
      mpz_ui_pow_ui(term.get_mpz_t(), d, static_cast<unsigned long>(p));
      sum += term;
    }
  }
  if (p == 0) return ExactRational(sum);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), a.params().max_level(), static_cast<unsigned long>(p));
  return make_rational(sum, scale);
}

ExactRational exact_norm_distance(const ImageTensor& a, const ImageTensor& b, int p) {
  if (p != 0 && p != 1) throw Error(ErrorCode::InvalidArgument, "exact distances exist for p in {0,1}");
  return norm_power(a, b, p);
}

double norm_distance(const ImageTensor& a, const ImageTensor& b, int p) {
  const double power = to_double(norm_power(a, b, p));
  if (p <= 1) return power;
  return std::pow(power, 1.0 / p);
}

PerturbationBudget PerturbationBudget::from_size(int p, double size) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "norm order must be >= 0");
  if (!(size >= 0) || !std::isfinite(size)) throw Error(ErrorCode::InvalidArgument, "budget size must be >= 0");
  PerturbationBudget out;
  out.p = p;
  out.size = size;
  const ExactRational s = exact_from_double(size);
  out.threshold = 1;
  if (p == 0) {
    out.threshold = s;
  } else {
    for (int i = 0; i < p; ++i) out.threshold *= s;
  }
  return out;
}

PerturbationBudget PerturbationBudget::from_power(int p, const ExactRational& power) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "norm order must be >= 0");
  if (power < 0) throw Error(ErrorCode::InvalidArgument, "budget size must be >= 0");
  PerturbationBudget out;
  out.p = p;
  out.threshold = power;
  out.size = p <= 1 ? to_double(power) : std::pow(to_double(power), 1.0 / p);
  return out;
}

bool PerturbationBudget::admits(const ImageTensor& a, const ImageTensor& b) const {
  return admits_power(norm_power(a, b, p));
}

long PerturbationBudget::max_changes() const {
  if (p != 0) throw Error(ErrorCode::InvalidArgument, "max_changes applies to L0 budgets");
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), threshold.get_num_mpz_t(), threshold.get_den_mpz_t());
  if (!f.fits_slong_p()) return std::numeric_limits<long>::max();
  return f.get_si();
}

std::uint64_t image_index(const ImageTensor& image) {
  const auto total = image.params().total_images_u64();
  if (!total) throw Error(ErrorCode::SpaceTooLarge, "image index needs fewer than 2^64 images");
  const std::uint64_t q = image.params().level_count();
  std::uint64_t index = 0;
  for (Level l : image.levels()) index = index * q + l;
  return index;
}

ImageTensor image_at(const SpaceParams& params, std::uint64_t index) {
  params.validate();
  const auto total = params.total_images_u64();
  if (!total) throw Error(ErrorCode::SpaceTooLarge, "image index needs fewer than 2^64 images");
  if (index >= *total) throw Error(ErrorCode::InvalidArgument, "image index out of range");
  const std::uint64_t q = params.level_count();
  std::vector<Level> levels(params.dimension());
  for (std::size_t i = levels.size(); i-- > 0;) {
    levels[i] = static_cast<Level>(index % q);
    index /= q;
  }
  return ImageTensor(params, std::move(levels));
}

SpaceRange::iterator::iterator(const SpaceParams& params, std::uint64_t index, std::uint64_t total)
    : index_(index), total_(total) {
  if (index_ < total_) {
    current_.emplace(image_at(params, index_));
    digits_.assign(current_->levels().begin(), current_->levels().end());
  }
}

SpaceRange::iterator& SpaceRange::iterator::operator++() {
  ++index_;
  if (index_ >= total_) {
    current_.reset();
    return *this;
  }
  const SpaceParams params = current_->params();
  const Level max = params.max_level();
  for (std::size_t i = digits_.size(); i-- > 0;) {
    if (digits_[i] < max) {
      ++digits_[i];
      break;
    }
    digits_[i] = 0;
  }
  current_.emplace(params, digits_);
  return *this;
}

std::uint64_t enumerable_size(const SpaceParams& params, std::uint64_t cap) {
  params.validate();
  const auto total = params.total_images_u64();
  if (!total || *total > cap) {
    throw Error(ErrorCode::SpaceTooLarge, "space " + to_string(params) + " has 2^" +
                                              std::to_string(params.dimension() * params.b) +
                                              " images, cap is " + std::to_string(cap));
  }
  return *total;
}

SpaceRange enumerate_space(const SpaceParams& params, std::uint64_t cap) {
  return SpaceRange(params, enumerable_size(params, cap));
}

ImageTensor sample_uniform(const SpaceParams& params, std::uint64_t seed, std::uint64_t index) {
  params.validate();
  CounterRng rng(seed, index);
  std::vector<Level> levels(params.dimension());
  for (auto& l : levels) l = static_cast<Level>(rng.below(params.level_count()));
  return ImageTensor(params, std::move(levels));
}

std::string encode_image(const ImageTensor& image) {
  nlohmann::ordered_json j;
  j["n"] = image.params().n;
  j["h"] = image.params().h;
  j["b"] = image.params().b;
  j["levels"] = std::vector<Level>(image.levels().begin(), image.levels().end());
  return j.dump();
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedInput, what); }

int positive_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) malformed(std::string("field \"") + key + "\" must be an integer");
  const auto x = v.get<long long>();
  if (x < 1 || x > 1 << 20) malformed(std::string("field \"") + key + "\" out of range");
  return static_cast<int>(x);
}

}  // namespace

ImageTensor decode_image(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    malformed("JSON syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) malformed("top level must be an object");
  for (const auto& item : j.items()) {
    const auto& k = item.key();
    if (k != "n" && k != "h" && k != "b" && k != "levels") malformed("unexpected field \"" + k + "\"");
  }
  SpaceParams params{positive_field(j, "n"), positive_field(j, "h"), positive_field(j, "b")};
  if (params.b > kMaxBitDepth) malformed("field \"b\" above " + std::to_string(kMaxBitDepth));
  if (!j.contains("levels") || !j.at("levels").is_array()) malformed("field \"levels\" must be an array");
  const auto& arr = j.at("levels");
  if (arr.size() != params.dimension()) {
    malformed("levels has length " + std::to_string(arr.size()) + ", expected " + std::to_string(params.dimension()));
  }
  std::vector<Level> levels;
  levels.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& v = arr[i];
    if (!v.is_number_integer()) malformed("levels[" + std::to_string(i) + "] is not an integer");
    const auto x = v.get<long long>();
    if (x < 0 || x > static_cast<long long>(params.max_level())) {
      malformed("levels[" + std::to_string(i) + "] = " + std::to_string(x) + " outside [0, " +
                std::to_string(params.max_level()) + "]");
    }
    levels.push_back(static_cast<Level>(x));
  }
  return ImageTensor(params, std::move(levels));
}

ContinuousPoint flatten(const ImageTensor& image) {
  ContinuousPoint out;
  out.reserve(image.size());
  const double max = image.params().max_level();
  for (Level l : image.levels()) out.push_back(static_cast<double>(l) / max);
  return out;
}

ImageTensor cell_of_point(const SpaceParams& params, std::span<const double> point) {
  params.validate();
  if (point.size() != params.dimension()) throw Error(ErrorCode::ShapeMismatch, "point has wrong dimension");
  const double cells = params.level_count();
  std::vector<Level> levels(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double x = point[i];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorCode::CoordinateOutOfRange, "coordinate " + std::to_string(i) + " outside [0,1]");
    }
    // x * 2^b is exact in binary, so the floor is the exact cell index.
    const double scaled = std::floor(x * cells);
    levels[i] = std::min(static_cast<Level>(scaled), params.max_level());
  }
  return ImageTensor(params, std::move(levels));
}

}  // namespace robenv
