#include <map>

#include <doctest.h>

#include "robenv/classifiers.hpp"
#include "robenv/error.hpp"

using namespace robenv;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("sum classifier labels") {
  const SpaceParams p{2, 1, 2};
  const ClassifierHandle c = sum_classifier(p);
  CHECK(c.kind() == ClassifierKind::Sum);
  CHECK(c.label_count() == 2);
  CHECK(c.decide(ImageTensor(p, {1, 1, 1, 2})) == 0);
  CHECK(c.decide(ImageTensor(p, {1, 1, 2, 2})) == 1);
  CHECK(c.label_of_index(0) == 0);
  CHECK(c.label_of_index(255) == 1);
  CHECK_THROWS_AS(c.decide(ImageTensor(SpaceParams{2, 1, 1}, {0, 0, 0, 0})), Error);
}

TEST_CASE("class sizes of the sum classifier") {
  const auto small = class_sizes(sum_classifier(SpaceParams{2, 1, 1}), CountMode::Exhaustive);
  REQUIRE(small.size() == 2);
  CHECK(small[0].count == 5);
  CHECK(small[1].count == 11);
  CHECK(small[0].interesting);
  CHECK_FALSE(small[1].interesting);

  const auto mid = class_sizes(sum_classifier(SpaceParams{2, 1, 2}), CountMode::Exhaustive);
  CHECK(mid[0].count == 106);
  CHECK(mid[0].interesting);
}

TEST_CASE("analytic class sizes match enumeration") {
  for (const SpaceParams p : {SpaceParams{2, 1, 1}, SpaceParams{2, 1, 2}, SpaceParams{3, 1, 1}, SpaceParams{2, 2, 2},
                              SpaceParams{1, 3, 3}}) {
    const ClassifierHandle c = sum_classifier(p);
    const auto a = class_sizes(c, CountMode::Analytic);
    const auto e = class_sizes(c, CountMode::Exhaustive);
    CHECK(a[0].count == e[0].count);
    CHECK(a[1].count == e[1].count);
  }
  const auto big = class_sizes(sum_classifier(SpaceParams{16, 1, 1}), CountMode::Analytic);
  CHECK(big[0].count + big[1].count == SpaceParams{16, 1, 1}.total_images());
  CHECK(code_of([] { class_sizes(constant_classifier(SpaceParams{2, 1, 1}), CountMode::Analytic); }) ==
        ErrorCode::AnalyticUnavailable);
}

TEST_CASE("balanced classifiers split evenly") {
  const SpaceParams p{2, 1, 2};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (int labels : {2, 3, 5}) {
      const ClassifierHandle c = random_classifier(p, labels, RandomKind::Balanced, seed);
      CHECK(c.has_table());
      const auto sizes = class_sizes(c, CountMode::Exhaustive);
      for (const auto& s : sizes) {
        CHECK(s.count >= 256 / labels);
        CHECK(s.count <= 256 / labels + 1);
      }
    }
  }
  const ClassifierHandle a = random_classifier(p, 2, RandomKind::Balanced, 1);
  const ClassifierHandle b = random_classifier(p, 2, RandomKind::Balanced, 2);
  int differ = 0;
  for (std::uint64_t i = 0; i < 256; ++i) differ += a.label_of_index(i) != b.label_of_index(i);
  CHECK(differ > 0);
}

TEST_CASE("random classifiers are reproducible") {
  const SpaceParams p{3, 1, 1};
  for (RandomKind kind : {RandomKind::Uniform, RandomKind::Balanced, RandomKind::LinearThreshold}) {
    const int labels = kind == RandomKind::LinearThreshold ? 2 : 3;
    const ClassifierHandle a = random_classifier(p, labels, kind, 42);
    const ClassifierHandle b = random_classifier(p, labels, kind, 42);
    for (std::uint64_t i = 0; i < 512; i += 7) {
      CHECK(a.label_of_index(i) == b.label_of_index(i));
      CHECK(a.label_of_index(i) >= 0);
      CHECK(a.label_of_index(i) < labels);
    }
  }
}

TEST_CASE("linear threshold classifiers are computed on demand") {
  const SpaceParams p{2, 1, 2};
  const ClassifierHandle c = random_classifier(p, 2, RandomKind::LinearThreshold, 3);
  CHECK_FALSE(c.has_table());
  const auto sizes = class_sizes(c, CountMode::Exhaustive);
  CHECK(sizes[0].count + sizes[1].count == 256);
}

TEST_CASE("classifier specs") {
  const SpaceParams p{2, 1, 1};
  CHECK(parse_classifier_spec(p, "sum").kind() == ClassifierKind::Sum);
  CHECK(parse_classifier_spec(p, "constant").label_count() == 1);
  CHECK(parse_classifier_spec(p, "balanced:4").name() == "balanced:4");
  CHECK(parse_classifier_spec(p, "balanced:4:3").label_count() == 3);
  CHECK(parse_classifier_spec(p, "uniform:9:3").name() == "uniform:9:3");
  CHECK(parse_classifier_spec(p, "linthresh:2").kind() == ClassifierKind::LinearThreshold);
  for (const char* bad : {"", "foo", "balanced", "balanced:x", "uniform:1", "uniform:1:0", "sum:1"}) {
    CHECK_THROWS_AS(parse_classifier_spec(p, bad), Error);
  }
}

TEST_CASE("materialized tables match decisions") {
  const SpaceParams p{2, 1, 2};
  const ClassifierHandle c = random_classifier(p, 2, RandomKind::LinearThreshold, 8);
  const auto table = materialize_labels(c);
  REQUIRE(table.size() == 256);
  for (std::uint64_t i = 0; i < 256; ++i) CHECK(table[i] == c.decide(image_at(p, i)));
  CHECK_THROWS_AS(materialize_labels(sum_classifier(SpaceParams{4, 2, 2})), Error);
}

TEST_CASE("class sampler draws members uniformly") {
  const SpaceParams p{2, 1, 1};
  const ClassifierHandle c = sum_classifier(p);
  const ClassSampler exact(c, 0);
  const ClassSampler reject(c, 0, ClassSampler::Strategy::Rejection);
  CHECK_FALSE(exact.uses_rejection());
  CHECK(reject.uses_rejection());
  std::map<std::uint64_t, int> a, b;
  const int draws = 5000;
  for (int i = 0; i < draws; ++i) {
    const ImageTensor x = exact.draw(3, i);
    const ImageTensor y = reject.draw(3, i);
    CHECK(c.decide(x) == 0);
    CHECK(c.decide(y) == 0);
    ++a[image_index(x)];
    ++b[image_index(y)];
  }
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);
  // each of the 5 members expects 1000 draws, sd about 28
  for (const auto& [k, n] : a) CHECK(std::abs(n - 1000) < 150);
  for (const auto& [k, n] : b) CHECK(std::abs(n - 1000) < 150);
}

TEST_CASE("class sampler on a large sum space") {
  const SpaceParams p{16, 1, 1};
  const ClassifierHandle c = sum_classifier(p);
  const ClassSampler s(c, 1);
  long total = 0;
  for (int i = 0; i < 200; ++i) {
    const ImageTensor x = s.draw(5, i);
    CHECK(2 * x.level_sum() >= 256);
    total += static_cast<long>(x.level_sum());
  }
  CHECK(total / 200 >= 128);
  CHECK(total / 200 <= 140);
}

TEST_CASE("empty classes are rejected") {
  const SpaceParams p{2, 1, 1};
  CHECK(code_of([&] { ClassSampler s(constant_classifier(p), 1); }) == ErrorCode::EmptyClass);
}

TEST_CASE("sum classifier boundary images") {
  const SpaceParams p{2, 1, 1};
  const ClassifierHandle c = sum_classifier(p);
  CHECK(c.decide(ImageTensor::filled(p, 1)) == 1);
  CHECK(c.decide(ImageTensor(p, {0, 1, 0, 1})) == 1);
  CHECK(c.decide(ImageTensor(p, {0, 1, 0, 0})) == 0);
}

TEST_CASE("interesting classes") {
  const SpaceParams p{2, 1, 1};
  CHECK(is_interesting(BigInt(5), p));
  CHECK_FALSE(is_interesting(BigInt(11), p));
  CHECK_FALSE(is_interesting(BigInt(0), p));
  CHECK(is_interesting(BigInt(8), p));
}

}  // TEST_SUITE
