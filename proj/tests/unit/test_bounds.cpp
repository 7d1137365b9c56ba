#include <cmath>

#include <doctest.h>
#include <json.hpp>

#include "robenv/bounds.hpp"
#include "robenv/error.hpp"

using namespace robenv;

namespace {

double d(const Real& x) { return static_cast<double>(x); }

BoundResult at(int p) { return evaluate_bounds(BoundQuery{0.5, p, 224, 3, 8}); }

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("constants at r = 1/2") {
  const BoundTerms t = at(0).terms;
  CHECK(d(t.c_upper) == doctest::Approx(0.832554611157698).epsilon(1e-12));
  CHECK(d(t.c_lower) == 0.125);
  CHECK(d(t.c_l2) == doctest::Approx(1.665109222315395).epsilon(1e-12));
  CHECK(d(t.l0_term) == doctest::Approx(325.014).epsilon(1e-6));
}

TEST_CASE("reference table values") {
  CHECK(d(at(0).upper_size) == doctest::Approx(325.014).epsilon(2e-6));
  CHECK(d(at(0).lower_size) == doctest::Approx(46.4974).epsilon(2e-6));
  CHECK(d(at(1).upper_size) == d(at(0).upper_size));
  CHECK(d(at(1).lower_size) == d(at(0).lower_size));
  CHECK(d(at(2).upper_size) == doctest::Approx(4.69620).epsilon(2e-6));
  CHECK(d(at(2).lower_size) == doctest::Approx(0.0267408).epsilon(2e-6));
  CHECK(d(*at(2).terms.l0_root_term) == doctest::Approx(18.02814529).epsilon(1e-9));
  CHECK(at(2).terms.dominating_term == "theorem3");
  CHECK(at(0).terms.dominating_term == "theorem1");
  CHECK(d(at(3).upper_size) == doctest::Approx(2.804341773).epsilon(1e-9));
  CHECK(d(at(3).lower_size) == doctest::Approx(0.01410163425).epsilon(1e-9));
}

TEST_CASE("upper bound at least the lower bound on the reference shape") {
  for (int p = 0; p <= 6; ++p) CHECK(at(p).upper_size >= at(p).lower_size);
}

TEST_CASE("bounds tighten as r grows") {
  for (int p : {0, 1, 2, 4}) {
    Real prev_upper = upper_bound_size(BoundQuery{0.05, p, 32, 1, 4});
    Real prev_lower = lower_bound_size(BoundQuery{0.05, p, 32, 1, 4});
    for (double r : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const Real u = upper_bound_size(BoundQuery{r, p, 32, 1, 4});
      const Real l = lower_bound_size(BoundQuery{r, p, 32, 1, 4});
      CHECK(u <= prev_upper);
      CHECK(l <= prev_lower);
      CHECK(l >= 0);
      prev_upper = u;
      prev_lower = l;
    }
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(evaluate_bounds(BoundQuery{0.0, 0, 4, 1, 1}), Error);
  CHECK_THROWS_AS(evaluate_bounds(BoundQuery{1.0, 0, 4, 1, 1}), Error);
  CHECK_THROWS_AS(evaluate_bounds(BoundQuery{0.5, -1, 4, 1, 1}), Error);
  CHECK_THROWS_AS(evaluate_bounds(BoundQuery{0.5, 0, 0, 1, 1}), Error);
}

TEST_CASE("average distance constants") {
  const AvgDistanceConstant a = avg_distance_constant(1, 1, 1);
  CHECK(a.k_bp == make_rational(1, 2));
  CHECK(d(a.k_hbp) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(d(avg_distance_constant(1, 1, 2).k_hbp) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  const AvgDistanceConstant b = avg_distance_constant(1, 2, 1);
  CHECK(b.k_bp == make_rational(5, 12));
  CHECK(d(b.k_hbp) == doctest::Approx(0.0548245614035088).epsilon(1e-12));
  const AvgDistanceConstant c = avg_distance_constant(1, 2, 2);
  CHECK(c.k_bp == make_rational(5, 18));
  CHECK(d(c.k_hbp) == doctest::Approx(0.0601093542338653).epsilon(1e-12));
  CHECK_THROWS_AS(avg_distance_constant(1, 17, 1), Error);
}

TEST_CASE("average distance lower bounds") {
  CHECK(d(avg_distance_lower_bound(10, 1, 1, 1)) == doctest::Approx(8.333333333333).epsilon(1e-10));
  CHECK(d(avg_distance_lower_bound(8, 1, 2, 1)) == doctest::Approx(3.50877192982456).epsilon(1e-12));
  CHECK(d(avg_distance_lower_bound(8, 1, 2, 2)) == doctest::Approx(0.480874833870923).epsilon(1e-12));
}

TEST_CASE("table output") {
  const auto rows = bounds_table(0.5, 224, 3, 8, {0, 1, 2});
  REQUIRE(rows.size() == 3);
  CHECK(bounds_csv(rows) ==
        "p,upper_size,lower_size,c_upper,c_lower,dominating_term\n"
        "0,325.014,46.4974,0.832555,0.125,theorem1\n"
        "1,325.014,46.4974,0.832555,0.125,theorem1\n"
        "2,4.6962,0.0267408,0.832555,0.125,theorem3\n");
  const auto j = nlohmann::json::parse(bounds_json(rows));
  REQUIRE(j.size() == 3);
  CHECK(j[2].at("upper_size").get<double>() == 4.6962);
  CHECK(j[0].at("dominating_term") == "theorem1");
}

TEST_CASE("crossover of the two bounds") {
  for (int p : {0, 2}) {
    const auto n0 = corollary_crossover(0.5, 1, 8, p, 400);
    REQUIRE(n0.has_value());
    for (long n = *n0; n <= 400; n += 13) {
      const BoundResult r = evaluate_bounds(BoundQuery{0.5, p, n, 1, 8});
      CHECK(r.upper_size >= r.lower_size);
    }
    if (*n0 > 1) {
      const BoundResult before = evaluate_bounds(BoundQuery{0.5, p, *n0 - 1, 1, 8});
      CHECK(before.upper_size < before.lower_size);
    }
  }
}

TEST_CASE("small closed-form bounds") {
  // r = 2 exp(-2) gives c = 1
  CHECK(d(upper_bound_size(BoundQuery{2 * std::exp(-2.0), 1, 10, 1, 1})) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(d(lower_bound_size(BoundQuery{0.6, 1, 100, 1, 1})) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(d(lower_bound_size(BoundQuery{0.6, 2, 100, 1, 1})) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  CHECK(d(avg_distance_lower_bound(10, 1, 1, 2)) == doctest::Approx(10.0 / 6).epsilon(1e-12));
}

TEST_CASE("upper dominates lower for large images") {
  for (int p = 0; p <= 8; ++p) {
    const BoundResult r = evaluate_bounds(BoundQuery{0.5, p, 10000, 3, 8});
    CHECK(r.upper_size >= r.lower_size);
  }
}

}  // TEST_SUITE
