#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fedbai/errors.hpp"
#include "fedbai/theory.hpp"

using namespace fedbai;

namespace {

// Independent oracle: bisection for the t where sqrt(2 ln(cbar t) / t) = theta.
double crossing_by_bisection(double theta, double cbar) {
  double lo = 1.0, hi = 1e13;
  for (int k = 0; k < 400; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (std::sqrt(2.0 * std::log(cbar * mid) / mid) > theta) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("lower Lambert branch values") {
  const double e = std::numbers::e;
  CHECK(lambert_w_minus1(-1.0 / e) == -1.0);
  CHECK(lambert_w_minus1(-1.0 / (e * e)) == doctest::Approx(-3.1462).epsilon(1e-4));
  CHECK(lambert_w_minus1(-1.0 / (e * e)) == doctest::Approx(-3.1461932206205825).epsilon(1e-13));
  CHECK(lambert_w_minus1(-0.1) == doctest::Approx(-3.577152063957297).epsilon(1e-13));
  CHECK_THROWS_AS(lambert_w_minus1(0.0), Error);
  CHECK_THROWS_AS(lambert_w_minus1(-0.5), Error);
}

TEST_CASE("defining identity on a grid") {
  const double lo = -1.0 / std::numbers::e;
  for (int k = 0; k < 1000; ++k) {
    const double x = lo + (0.0 - lo) * (k + 0.5) / 1000.0;
    const double w = lambert_w_minus1(x);
    CHECK(w <= -1.0);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12);
  }
  const double tiny = lambert_w_minus1(-1e-300);
  CHECK(std::abs(tiny * std::exp(tiny) + 1e-300) <= 1e-310);
}

TEST_CASE("log bounds") {
  const double x = -std::exp(-2.0);
  const auto [lower, upper] = w_minus1_bounds(x);
  CHECK(lower == doctest::Approx(-4.772588722239782));
  CHECK(upper == doctest::Approx(-2.1732867951399863));
  for (int k = 0; k < 1000; ++k) {
    const double y = x + (-1e-6 - x) * k / 999.0;
    const auto [l, u] = w_minus1_bounds(y);
    const double w = lambert_w_minus1(y);
    CHECK(l <= w);
    CHECK(w <= u);
  }
  const auto [l9, u9] = w_minus1_bounds(-1e-9);
  CHECK(l9 < u9);
  CHECK(u9 < -20.0);
  CHECK_THROWS_AS(w_minus1_bounds(-0.2), Error);
}

TEST_CASE("crossing time matches bisection") {
  for (double theta : {0.05, 0.1, 0.3}) {
    const double cbar = 13.0;
    CHECK(crossing_time(theta, cbar) ==
          doctest::Approx(crossing_by_bisection(theta, cbar)).epsilon(1e-9));
  }
}

TEST_CASE("crossing-time gap bound") {
  const double v = crossing_time_gap_bound(0.05, 2.0, 13.0);
  CHECK(v == doctest::Approx(1056308.4019229452).epsilon(1e-12));
  const double observed = crossing_by_bisection(0.05 / 8, 13.0) - crossing_by_bisection(0.1 / 8, 13.0);
  CHECK(observed == doctest::Approx(640785.5646931585).epsilon(1e-9));
  CHECK(v >= observed);

  const double d = 0.05, c = 13.0, ll = std::log(std::log(128 * c / (d * d)));
  CHECK(crossing_time_gap_bound(d, 1.0 + 1e-9, c) ==
        doctest::Approx(512 / (d * d) * ll - 32 / (d * d) * ll).epsilon(1e-6));

  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double sigma = 1.0 + (1.0 / d - 1.0) * k / 100.0;
    const double b = crossing_time_gap_bound(d, sigma, c);
    CHECK(b > prev);
    prev = b;
  }
  for (double dd : {0.02, 0.1, 0.3})
    for (double s : {1.5, 2.0, 3.0})
      for (double cb : {5.0, 13.0, 100.0})
        CHECK(crossing_time_gap_bound(dd, s, cb) >=
              crossing_by_bisection(dd / 8, cb) - crossing_by_bisection(s * dd / 8, cb));
  CHECK_THROWS_AS(crossing_time_gap_bound(0.5, 3.0, 13.0), Error);
  CHECK_THROWS_AS(crossing_time_gap_bound(0.05, 1.0, 13.0), Error);
  CHECK_THROWS_AS(crossing_time_gap_bound(0.05, 2.0, 2.0), Error);
}

TEST_CASE("round bounds in the single-round regime") {
  const auto rep = round_bounds(make_target_detection_instance(1));
  CHECK(rep.single_round_regime);
  CHECK(rep.rounds_bound == 1.0);
  for (const auto& s : rep.sets) {
    CHECK(s.rounds_to_best == 1.0);
    CHECK(s.rounds_from_best == 1.0);
  }
  CHECK(rep.bits_bound == 9);  // ceil(log2(8 / 0.05)) + 1
}

TEST_CASE("doubling H halves the H-dependent part") {
  const auto inst = make_target_detection_instance(5);
  const auto a = round_bounds(inst.with_comm_period(20));
  const auto b = round_bounds(inst.with_comm_period(40));
  for (int j = 1; j < 3; ++j) {
    CHECK(b.sets[j].rounds_to_best - 1.0 == doctest::Approx((a.sets[j].rounds_to_best - 1.0) / 2));
    CHECK(b.sets[j].rounds_from_best - 1.0 ==
          doctest::Approx((a.sets[j].rounds_from_best - 1.0) / 2));
  }
}

TEST_CASE("rounds bound grows with sigma") {
  double prev = 0.0;
  for (int s = 2; s <= 15; ++s) {
    const double r = round_bounds(make_target_detection_instance(s)).rounds_bound;
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("single-round predicate") {
  CHECK(single_round_regime(make_target_detection_instance(1)));
  CHECK_FALSE(single_round_regime(make_target_detection_instance(2)));
  // Both local gaps equal the cross gap (all exact in binary): index exactly 1.
  ProblemInstance sym({{ArmModel::point_mass(0.75), ArmModel::point_mass(0.5)},
                       {ArmModel::point_mass(0.5), ArmModel::point_mass(0.25)}},
                      {{0}, {1}}, 0.1, 20);
  CHECK(heterogeneity_index(sym, 0, 1) == 1.0);
  CHECK(single_round_regime(sym));
}

TEST_CASE("Phase-I pull bound") {
  const auto rep = round_bounds(make_target_detection_instance(5));
  for (const auto& s : rep.sets) {
    CHECK(s.phase1_pull_bound > 0);
    std::int64_t sum = 0, mx = 0;
    for (std::size_t a = 0; a < s.arm_pull_bounds.size(); ++a)
      if (static_cast<int>(a) != make_target_detection_instance(5).local_best(s.set)) {
        sum += s.arm_pull_bounds[a];
        mx = std::max(mx, s.arm_pull_bounds[a]);
      }
    CHECK(s.phase1_pull_bound == sum + mx);
  }
}
