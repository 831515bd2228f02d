#include <doctest.h>

#include "fedbai/errors.hpp"
#include "fedbai/instance.hpp"

using namespace fedbai;

namespace {

ProblemInstance two_point_mass_sets() {
  return ProblemInstance({{ArmModel::point_mass(0.9), ArmModel::point_mass(0.3)},
                          {ArmModel::point_mass(0.8), ArmModel::point_mass(0.7)}},
                         {{0}, {1}}, 0.1, 20);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("point mass and degenerate Bernoulli arms") {
  ProblemInstance inst({{ArmModel::point_mass(0.9), ArmModel::bernoulli(0.0)}}, {{0}}, 0.1, 1);
  RewardStream s(inst, 7);
  for (int k = 0; k < 1000; ++k) {
    CHECK(s.sample(0, {0, 0}) == 0.9);
    CHECK(s.sample(0, {0, 1}) == 0.0);
  }
  CHECK(s.draws(0, {0, 0}) == 1000);
}

TEST_CASE("Bernoulli empirical mean at a fixed seed") {
  ProblemInstance inst({{ArmModel::bernoulli(0.7), ArmModel::bernoulli(0.2)}}, {{0}}, 0.1, 1);
  RewardStream s(inst, 12345);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) sum += s.sample(0, {0, 0});
  CHECK(std::abs(sum / 100000 - 0.7) < 0.01);
}

TEST_CASE("substreams do not depend on interleaving") {
  const auto inst = make_target_detection_instance(5).with_group_size(2);
  RewardStream a(inst, 99), b(inst, 99);
  std::vector<double> xa, xb;
  for (int k = 0; k < 50; ++k) xa.push_back(a.sample(0, {0, 1}));
  for (int k = 0; k < 50; ++k) {
    b.sample(1, {0, 1});
    b.sample(2, {1, 0});
    xb.push_back(b.sample(0, {0, 1}));
  }
  CHECK(xa == xb);
}

TEST_CASE("sampling a foreign arm-set is rejected") {
  const auto inst = two_point_mass_sets();
  RewardStream s(inst, 1);
  CHECK(code_of([&] { s.sample(0, {1, 0}); }) == ErrorCode::ArmNotAccessible);
}

TEST_CASE("heterogeneity index") {
  const auto inst = make_target_detection_instance(5);
  CHECK(heterogeneity_index(inst, 0, 1) == doctest::Approx(5.0));
  CHECK(heterogeneity_index(inst, 1, 0) == doctest::Approx(1.0));
  CHECK(heterogeneity_index(two_point_mass_sets(), 0, 1) == doctest::Approx(6.0));
  CHECK(code_of([&] { heterogeneity_index(inst, 0, 0); }) == ErrorCode::UndefinedIndex);
}

TEST_CASE("target-detection instance") {
  const auto one = make_target_detection_instance(1);
  CHECK(one.mean({0, 0}) == 0.9);
  CHECK(one.mean({0, 1}) == doctest::Approx(0.85));
  CHECK(one.mean({0, 2}) == 0.1);
  CHECK(make_target_detection_instance(15).mean({0, 1}) == doctest::Approx(0.15));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(heterogeneity_index(one, i, j) <= 1.0 + 1e-9);
  CHECK(one.best_arm() == ArmRef{0, 0});
  CHECK(code_of([] { make_target_detection_instance(0.5); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { make_target_detection_instance(16); }) == ErrorCode::OutOfRange);
}

TEST_CASE("instance validation") {
  using A = ArmModel;
  CHECK(code_of([] { ProblemInstance({{A::bernoulli(0.5)}}, {{0}}, 0.1, 1); }) ==
        ErrorCode::InvalidInstance);
  CHECK(code_of([] { ProblemInstance({{A::bernoulli(0.5), A::bernoulli(0.5)}}, {{0}}, 0.1, 1); }) ==
        ErrorCode::InvalidInstance);
  CHECK(code_of([] { ProblemInstance({{A::bernoulli(1.5), A::bernoulli(0.5)}}, {{0}}, 0.1, 1); }) ==
        ErrorCode::InvalidInstance);
  CHECK(code_of([] {
          ProblemInstance({{A::bernoulli(0.9), A::bernoulli(0.5)}, {A::bernoulli(0.9), A::bernoulli(0.1)}},
                          {{0}, {1}}, 0.1, 1);
        }) == ErrorCode::InvalidInstance);
  CHECK(code_of([] {
          ProblemInstance({{A::bernoulli(0.9), A::bernoulli(0.5)}, {A::bernoulli(0.8), A::bernoulli(0.1)}},
                          {{0}, {0}}, 0.1, 1);
        }) == ErrorCode::InvalidInstance);
  CHECK(code_of([] { ProblemInstance({{A::bernoulli(0.9), A::bernoulli(0.5)}}, {{0}}, 1.0, 1); }) ==
        ErrorCode::InvalidInstance);
  CHECK(code_of([] { ProblemInstance({{A::bernoulli(0.9), A::bernoulli(0.5)}}, {{0}}, 0.1, 0); }) ==
        ErrorCode::InvalidInstance);
}

TEST_CASE("group cloning keeps sets and relabels clients") {
  const auto inst = make_target_detection_instance(3).with_group_size(4);
  CHECK(inst.num_clients() == 12);
  CHECK(inst.group(1) == std::vector<int>{4, 5, 6, 7});
  CHECK(inst.set_of(9) == 2);
  CHECK_FALSE(inst.singleton_groups());
  CHECK(inst.flat_id({2, 1}) == 7);
}
