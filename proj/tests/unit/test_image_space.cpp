#include <set>

#include <doctest.h>

#include "robenv/error.hpp"
#include "robenv/image_space.hpp"
#include "robenv/random.hpp"

using namespace robenv;

TEST_SUITE("image_space") {

TEST_CASE("space sizes") {
  const SpaceParams p{2, 1, 2};
  CHECK(p.dimension() == 4);
  CHECK(p.level_count() == 4);
  CHECK(p.max_level() == 3);
  CHECK(p.total_images() == 256);
  CHECK(p.total_images_u64() == 256u);
  const SpaceParams huge{224, 3, 8};
  CHECK_FALSE(huge.total_images_u64().has_value());
  CHECK_THROWS_AS(enumerable_size(huge), Error);
  CHECK_THROWS_AS((SpaceParams{0, 1, 1}.validate()), Error);
  CHECK_THROWS_AS((SpaceParams{2, 1, 17}.validate()), Error);
}

TEST_CASE("first channel is the most significant digit") {
  const SpaceParams p{2, 1, 1};
  const ImageTensor first = image_at(p, 8);
  CHECK(std::vector<Level>(first.levels().begin(), first.levels().end()) == std::vector<Level>{1, 0, 0, 0});
  CHECK(image_index(ImageTensor(p, {0, 0, 0, 1})) == 1);
  CHECK(image_index(ImageTensor::filled(p, 1)) == 15);
}

TEST_CASE("index round trip and enumeration order") {
  const SpaceParams p{2, 1, 2};
  std::uint64_t expected = 0;
  for (const ImageTensor& img : enumerate_space(p)) {
    CHECK(image_index(img) == expected);
    CHECK(image_at(p, expected) == img);
    ++expected;
  }
  CHECK(expected == 256);
}

TEST_CASE("pixel addressing") {
  const SpaceParams p{2, 3, 2};
  std::vector<Level> levels(12);
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<Level>(i % 4);
  const ImageTensor img(p, levels);
  CHECK(img.offset_of(1, 0, 2) == 8);
  CHECK(img.at(1, 1, 0) == levels[9]);
  CHECK_THROWS_AS(ImageTensor(p, {1, 2}), Error);
  CHECK_THROWS_AS(ImageTensor(SpaceParams{1, 1, 2}, {4}), Error);
}

TEST_CASE("norms") {
  const SpaceParams p{2, 1, 2};
  const ImageTensor a(p, {0, 0, 0, 0});
  const ImageTensor b(p, {3, 1, 0, 2});
  CHECK(norm_power(a, b, 0) == 3);
  CHECK(norm_power(a, b, 1) == make_rational(6, 3));
  CHECK(norm_power(a, b, 2) == make_rational(14, 9));
  CHECK(norm_distance(a, b, 2) == doctest::Approx(std::sqrt(14.0) / 3));
  CHECK(norm_distance(a, a, 3) == 0.0);
  CHECK(exact_norm_distance(a, b, 1) == 2);
  CHECK_THROWS_AS(exact_norm_distance(a, b, 2), Error);
  CHECK_THROWS_AS(norm_power(a, ImageTensor(SpaceParams{2, 1, 1}, {0, 0, 0, 0}), 1), Error);
}

TEST_CASE("norm symmetry and triangle inequality") {
  const SpaceParams p{2, 1, 3};
  for (std::uint64_t i = 0; i < 40; ++i) {
    const ImageTensor a = sample_uniform(p, 11, 3 * i);
    const ImageTensor b = sample_uniform(p, 11, 3 * i + 1);
    const ImageTensor c = sample_uniform(p, 11, 3 * i + 2);
    for (int norm : {0, 1, 2, 3}) {
      CHECK(norm_power(a, b, norm) == norm_power(b, a, norm));
      CHECK(norm_distance(a, c, norm) <= norm_distance(a, b, norm) + norm_distance(b, c, norm) + 1e-12);
    }
  }
}

TEST_CASE("budgets") {
  const PerturbationBudget l0 = PerturbationBudget::from_size(0, 2.5);
  CHECK(l0.max_changes() == 2);
  const PerturbationBudget l2 = PerturbationBudget::from_size(2, 0.5);
  CHECK(l2.threshold == make_rational(1, 4));
  CHECK(l2.admits_power(make_rational(1, 4)));
  CHECK_FALSE(l2.admits_power(make_rational(26, 100)));
  const PerturbationBudget pw = PerturbationBudget::from_power(2, make_rational(1, 9));
  CHECK(pw.size == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(PerturbationBudget::from_size(1, -0.1), Error);
  CHECK_THROWS_AS(PerturbationBudget::from_size(-1, 1.0), Error);
}

TEST_CASE("uniform sampling is deterministic and covers levels") {
  const SpaceParams p{3, 1, 2};
  CHECK(sample_uniform(p, 5, 9) == sample_uniform(p, 5, 9));
  CHECK_FALSE(sample_uniform(p, 5, 9) == sample_uniform(p, 5, 10));
  std::set<Level> seen;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const ImageTensor img = sample_uniform(p, 1, i);
    seen.insert(img.levels().begin(), img.levels().end());
  }
  CHECK(seen == std::set<Level>{0, 1, 2, 3});
}

TEST_CASE("json codec") {
  const ImageTensor img(SpaceParams{2, 1, 2}, {0, 3, 1, 2});
  CHECK(decode_image(encode_image(img)) == img);
  CHECK(decode_image(R"({"n":1,"h":1,"b":1,"levels":[1]})") == ImageTensor(SpaceParams{1, 1, 1}, {1}));
  auto code_of = [](const char* text) {
    try {
      decode_image(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of("{") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n":1,"h":1,"b":1})") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n":1,"h":1,"b":1,"levels":[0,0]})") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n":1,"h":1,"b":1,"levels":[0],"x":1})") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n":1,"h":1,"b":1,"levels":[2]})") == ErrorCode::MalformedInput);
}

TEST_CASE("continuous embedding") {
  const SpaceParams p{2, 1, 3};
  for (std::uint64_t i = 0; i < 64; ++i) {
    const ImageTensor img = sample_uniform(p, 2, i);
    CHECK(cell_of_point(p, flatten(img)) == img);
  }
  const std::vector<double> pt{0.0, 0.124, 0.125, 1.0};
  const ImageTensor cell = cell_of_point(p, pt);
  CHECK(std::vector<Level>(cell.levels().begin(), cell.levels().end()) == std::vector<Level>{0, 0, 1, 7});
  const std::vector<double> bad{0.0, 0.5, 1.5, 0.0};
  CHECK_THROWS_AS(cell_of_point(p, bad), Error);
}

TEST_CASE("level values") {
  CHECK(value_of_level(0, 3) == 0.0);
  CHECK(value_of_level(7, 3) == 1.0);
  CHECK(exact_value_of_level(2, 2) == make_rational(2, 3));
  CHECK_THROWS_AS(value_of_level(8, 3), Error);
}

TEST_CASE("norms of full-range flips") {
  for (int n : {1, 2, 3}) {
    for (int h : {1, 3}) {
      const SpaceParams p{n, h, 1};
      const ImageTensor zero = ImageTensor::filled(p, 0);
      const ImageTensor one = zero.with_level(0, 1);
      for (int norm : {0, 1, 2}) CHECK(norm_power(zero, one, norm) == 1);
      CHECK(norm_power(zero, ImageTensor::filled(p, 1), 1) == static_cast<long>(p.dimension()));
    }
  }
  CHECK(SpaceParams{2, 1, 1}.total_images() == 16);
}

TEST_CASE("uniform sampling statistics") {
  const SpaceParams coin{1, 1, 1};
  const int draws = 1000000;
  long ones = 0;
  for (int i = 0; i < draws; ++i) ones += sample_uniform(coin, 2024, i)[0];
  CHECK(std::abs(static_cast<double>(ones) / draws - 0.5) < 0.002);

  // chi-square over 8 levels, 7 degrees of freedom, 99% quantile 18.475
  const SpaceParams p{1, 1, 3};
  std::vector<long> hist(8, 0);
  const int samples = 80000;
  for (int i = 0; i < samples; ++i) ++hist[sample_uniform(p, 99, i)[0]];
  double chi = 0;
  for (long c : hist) chi += (c - samples / 8.0) * (c - samples / 8.0) / (samples / 8.0);
  CHECK(chi < 18.475);
}

TEST_CASE("cells are half-open except the last") {
  const SpaceParams p{1, 1, 1};
  const std::vector<double> a{0.3}, b{0.5}, c{1.0};
  CHECK(cell_of_point(p, a)[0] == 0);
  CHECK(cell_of_point(p, b)[0] == 1);
  CHECK(cell_of_point(p, c)[0] == 1);
  const std::vector<double> top{1.0};
  CHECK(cell_of_point(SpaceParams{1, 1, 4}, top)[0] == 15);
}

}  // TEST_SUITE

TEST_SUITE("random") {

TEST_CASE("counter-based streams") {
  CounterRng a(1, 2), b(1, 2), c(1, 3);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CounterRng r(9, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

}  // TEST_SUITE
