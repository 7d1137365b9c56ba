#include <cmath>
#include <vector>

#include <doctest.h>

#include "robenv/gaussian.hpp"
#include "robenv/real.hpp"
#include "robenv/stats.hpp"

using namespace robenv;

TEST_SUITE("real") {

TEST_CASE("rounding of rationals") {
  CHECK(to_double(make_rational(13, 100)) == 0.13);
  CHECK(to_double(make_rational(1, 3)) == 1.0 / 3.0);
  CHECK(exact_from_double(0.5) == make_rational(1, 2));
  CHECK(exact_from_double(0.1) != make_rational(1, 10));
  CHECK_THROWS(make_rational(1, 0));
}

TEST_CASE("exp enclosures") {
  const Enclosure one = exp_enclosure(ExactRational(0));
  CHECK(one.lo <= 1);
  CHECK(one.hi >= 1);
  const Enclosure e = exp_enclosure(make_rational(-1, 8));
  CHECK(std::abs(static_cast<double>(e.mid()) - 0.882496902584595) < 1e-15);
  CHECK(e.width() < Real(1e-40));
}

TEST_CASE("certified comparisons") {
  const Enclosure e = exp_enclosure(ExactRational(-1));
  CHECK(less_than(make_rational(36, 100), e) == Verdict::Holds);
  CHECK(less_than(make_rational(37, 100), e) == Verdict::Fails);
  CHECK(less_equal(ExactRational(1), enclose(ExactRational(1))) == Verdict::Holds);
  CHECK(less_than(ExactRational(1), enclose(ExactRational(1))) == Verdict::Fails);
}

TEST_CASE("floor of scaled square roots") {
  CHECK(floor_scaled_sqrt(0.5, 4) == 1);
  CHECK(floor_scaled_sqrt(1.0, 16) == 4);
  CHECK(floor_scaled_sqrt(0.75, 4) == 1);
  CHECK(floor_scaled_sqrt(2.0, 2) == 2);
  CHECK(floor_scaled_sqrt(0.0, 9) == 0);
}

TEST_CASE("significant-digit formatting") {
  CHECK(format_significant(Real(325.01400001), 6) == "325.014");
  CHECK(format_significant(Real(0.0267408213), 6) == "0.0267408");
}

}  // TEST_SUITE

TEST_SUITE("gaussian") {

TEST_CASE("normal cdf values") {
  const Enclosure half = normal_cdf_enclosure(0.5);
  CHECK(std::abs(static_cast<double>(half.mid()) - 0.691462461274013) < 1e-14);
  CHECK(half.width() < Real(1e-12));
  const Enclosure zero = normal_cdf_enclosure(0.0);
  CHECK(zero.lo <= Real(0.5));
  CHECK(zero.hi >= Real(0.5));
  const Enclosure ratio = div_enclosure(normal_cdf_enclosure(-0.5), half);
  CHECK(std::abs(static_cast<double>(ratio.mid()) - 0.446210106847318) < 1e-13);
}

TEST_CASE("normal cdf symmetry") {
  for (double x : {0.1, 0.7, 1.9, 3.3, 5.2}) {
    const Real s = normal_cdf_enclosure(x).mid() + normal_cdf_enclosure(-x).mid();
    CHECK(std::abs(static_cast<double>(s) - 1.0) < 1e-14);
  }
}

TEST_CASE("scalar checks on a small grid") {
  std::vector<double> grid;
  for (int i = -300; i <= 50; i += 5) grid.push_back(i / 100.0);
  const std::vector<double> ks{0.1, 0.5, 1.0, 2.0, 4.0};
  const GaussianReport r = gaussian_checks(grid, ks, 1e-12);
  CHECK(r.all_hold());
  CHECK(r.monotone_checks > 0);
  CHECK(r.tail_checks == grid.size());
  CHECK(r.ratio_checks == 2 * ks.size());
  CHECK(r.max_abs_error <= 1e-12);
}

}  // TEST_SUITE

TEST_SUITE("stats") {

TEST_CASE("wilson interval") {
  const Interval w = wilson_interval(50, 100);
  CHECK(w.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const Interval zero = wilson_interval(0, 10);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi > 0.0);
  const Interval all = wilson_interval(10, 10);
  CHECK(all.hi == doctest::Approx(1.0));
}

}  // TEST_SUITE
