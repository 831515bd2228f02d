#include <doctest.h>

#include "fedbai/errors.hpp"
#include "fedbai/p2p.hpp"

using namespace fedbai;

TEST_CASE("relay entry") {
  const auto e = relay_entry({{0, 3, 0.8}, {1, 3, 0.78}, {2, 9, 1.0}}, 1);
  CHECK(e.arm == 3);
  CHECK(e.agreeing == std::vector<int>{0, 1});
  CHECK(e.trim_param == 0);
  CHECK(e.mean == doctest::Approx(0.79));
  const auto u = relay_entry({{0, 3, 0.8}, {1, 3, 0.8}, {2, 3, 0.8}}, 1);
  CHECK(u.trim_param == 1);
  CHECK(u.mean == 0.8);
}

TEST_CASE("finalize") {
  PeerState s(0, 3);
  CHECK_THROWS_AS(finalize(s), Error);
  s.mean = {0.9, 0.8, 0.65};
  s.arm = {0, 1, 2};
  s.filled_at = {1, 1, 1};
  CHECK(finalize(s) == ArmRef{0, 0});
  s.mean = {0.7, 0.9, 0.9};
  CHECK(finalize(s) == ArmRef{1, 1});
}

TEST_CASE("deterministic two-peer run") {
  ProblemInstance inst({{ArmModel::point_mass(0.9), ArmModel::point_mass(0.85), ArmModel::point_mass(0.1)},
                        {ArmModel::point_mass(0.8), ArmModel::point_mass(0.75), ArmModel::point_mass(0.3)}},
                       {{0}, {1}}, 0.1, 20);
  const auto g = complete_graph_for(inst.groups());
  RewardStream s(inst, 1);
  const auto r = run_p2p(inst, g, AdversarySetup{}, P2PParams{}, s);
  CHECK(r.preconditions.ok());
  CHECK(r.preconditions.max_cross_index == doctest::Approx(0.5));
  CHECK(r.all_honest_correct);
  CHECK(*r.outputs[0] == ArmRef{0, 0});
  CHECK(*r.outputs[1] == ArmRef{0, 0});
  // Both clients finish local elimination at the first t with 6 alpha(t) <= 0.05.
  CHECK(r.peers[0].filled_at[0] == 454071);
  CHECK(r.peers[1].filled_at[1] == 454071);
  CHECK(r.peers[0].filled_at[1] == 454072);
  CHECK(r.claim_violations == 0);
  CHECK(r.hull_violations == 0);
}

TEST_CASE("bridged cliques with a Byzantine bridge is rejected") {
  const auto inst = make_target_detection_instance(1);
  ProblemInstance nine(inst.arm_sets(), {{0, 1, 2, 3}, {4}, {5, 6, 7, 8}}, 0.1, 20);
  const auto g = bridged_cliques_graph();
  AdversarySetup adv{{4}, AdversaryStrategy{}, 1};
  P2PParams p;
  p.f = 1;
  const auto rep = check_p2p_preconditions(nine, g, {4}, 1);
  CHECK(rep.f_local);
  CHECK_FALSE(rep.robust);
  CHECK_FALSE(rep.robust_per_group[1]);
  RewardStream s(nine, 1);
  CHECK_THROWS_AS(run_p2p(nine, g, adv, p, s), Error);
}

TEST_CASE("heterogeneity precondition") {
  const auto inst = make_target_detection_instance(5);
  const auto rep = check_p2p_preconditions(inst, complete_graph_for(inst.groups()), {}, 0);
  CHECK_FALSE(rep.heterogeneity);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("complete graph, silent and wrong-arm adversaries") {
  const auto inst = make_target_detection_instance(1).with_group_size(4);
  const auto g = complete_graph_for(inst.groups());
  P2PParams p;
  p.f = 1;
  for (const char* strategy : {"silent", "wrong-arm", "random", "inflate"}) {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      AdversarySetup adv{{0}, AdversaryStrategy::parse(strategy), seed + 100};
      RewardStream s(inst, seed);
      const auto r = run_p2p(inst, g, adv, p, s);
      ok += r.all_honest_correct;
      CHECK_FALSE(r.outputs[0].has_value());
      CHECK(r.hull_violations == 0);
    }
    CHECK(ok >= 9);
  }
}
