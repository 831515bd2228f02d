#include <doctest.h>

#include "fedbai/errors.hpp"
#include "fedbai/local_elim.hpp"

using namespace fedbai;

namespace {

ElimParams params(int clients, int arms, double c = 8.0) {
  ElimParams p;
  p.c = c;
  p.num_clients = clients;
  p.set_size = arms;
  p.delta = 0.1;
  return p;
}

}  // namespace

TEST_CASE("confidence radius values") {
  const auto p = params(2, 2);
  CHECK(alpha(p, 1) == doctest::Approx(2.252814642893158).epsilon(1e-12));
  CHECK(alpha(p, 4500) == doctest::Approx(0.06975964953841415).epsilon(1e-12));
}

TEST_CASE("confidence radius decreases") {
  const auto p = params(2, 2);
  double prev = alpha(p, 1);
  for (int t = 2; t <= 1000000; ++t) {
    const double a = alpha(p, t);
    REQUIRE(a < prev);
    prev = a;
  }
}

TEST_CASE("point-mass elimination epoch") {
  // Frozen from an independent scan for the first t with 8 alpha(t) <= 0.6.
  ProblemInstance inst({{ArmModel::point_mass(0.9), ArmModel::point_mass(0.3)},
                        {ArmModel::point_mass(0.8), ArmModel::point_mass(0.7)}},
                       {{0}, {1}}, 0.1, 20);
  RewardStream s(inst, 3);
  const auto r = run_to_termination(elim_params_for(inst, 0, 8.0), s, 0);
  CHECK(r.arm == 0);
  CHECK(r.mean_estimate == 0.9);
  CHECK(r.epochs == 3837);
  const auto p = params(2, 2);
  CHECK(8 * alpha(p, 3837) <= 0.6 + 1e-15);
  CHECK(8 * alpha(p, 3836) > 0.6);
}

TEST_CASE("three point-mass arms") {
  ProblemInstance inst({{ArmModel::point_mass(0.9), ArmModel::point_mass(0.3),
                         ArmModel::point_mass(0.1)}},
                       {{0}}, 0.1, 20);
  RewardStream s(inst, 3);
  LocalElimState st(3);
  const auto p = elim_params_for(inst, 0, 8.0);
  std::int64_t gone1 = -1, gone2 = -1;
  while (!st.done()) {
    run_epoch(st, p, s, 0);
    auto has = [&](int a) { return std::find(st.active.begin(), st.active.end(), a) != st.active.end(); };
    if (gone1 < 0 && !has(1)) gone1 = st.epoch;
    if (gone2 < 0 && !has(2)) gone2 = st.epoch;
  }
  CHECK(report_of(st).arm == 0);
  CHECK(gone2 <= gone1);
}

TEST_CASE("equal means are never eliminated") {
  LocalElimState s(2);
  const auto p = params(1, 2);
  s.epoch = 1000;
  s.means = {0.5, 0.5};
  eliminate(s, p);
  CHECK(s.active.size() == 2);
}

TEST_CASE("an epoch needs two active arms") {
  LocalElimState s(2);
  s.active = {1};
  const auto p = params(1, 2);
  CHECK_THROWS_AS(run_epoch(s, p, [](int) { return 0.0; }), Error);
}

TEST_CASE("leader ties go to the lower index") {
  LocalElimState s(3);
  s.means = {0.2, 0.7, 0.7};
  CHECK(leader(s) == 1);
}

TEST_CASE("epoch cap") {
  ProblemInstance inst({{ArmModel::point_mass(0.9), ArmModel::point_mass(0.3)}}, {{0}}, 0.1, 20);
  RewardStream s(inst, 1);
  auto p = elim_params_for(inst, 0, 8.0, 10);
  try {
    run_to_termination(p, s, 0);
    FAIL("expected EpochCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpochCapExceeded);
    CHECK(e.client() == 0);
  }
}

TEST_CASE("Bernoulli set at sigma 15 finds its best arm") {
  const auto inst = make_target_detection_instance(15);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RewardStream s(inst, seed);
    if (run_to_termination(elim_params_for(inst, 0, 8.0), s, 0).arm == 0) ++hits;
  }
  CHECK(hits >= 180);
}

TEST_CASE("trace holds every running mean") {
  ProblemInstance inst({{ArmModel::bernoulli(0.9), ArmModel::bernoulli(0.2)}}, {{0}}, 0.1, 20);
  RewardStream s(inst, 4);
  MeanTrace tr;
  const auto r = run_to_termination(elim_params_for(inst, 0, 8.0), s, 0, &tr);
  CHECK(static_cast<std::int64_t>(tr[0].size()) == r.epochs);
  CHECK(tr[0].back() == r.mean_estimate);
}
