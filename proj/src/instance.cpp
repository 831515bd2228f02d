#include "fedbai/instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedbai/errors.hpp"

namespace fedbai {

namespace {

void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidInstance, msg); }

}  // namespace

ProblemInstance::ProblemInstance(std::vector<std::vector<ArmModel>> arm_sets,
                                 std::vector<std::vector<int>> groups, double delta,
                                 int comm_period)
    : arm_sets_(std::move(arm_sets)),
      groups_(std::move(groups)),
      delta_(delta),
      comm_period_(comm_period) {
  if (arm_sets_.empty()) invalid("no arm-sets");
  if (groups_.size() != arm_sets_.size()) invalid("need exactly one client group per arm-set");
  if (!(delta_ > 0.0 && delta_ < 1.0)) invalid("delta must lie in (0,1)");
  if (comm_period_ < 1) invalid("communication period must be positive");

  flat_offset_.push_back(0);
  for (std::size_t j = 0; j < arm_sets_.size(); ++j) {
    const auto& set = arm_sets_[j];
    if (set.size() < 2) invalid("arm-set " + std::to_string(j) + " has fewer than two arms");
    for (const auto& a : set) {
      if (!(a.mean >= 0.0 && a.mean <= 1.0))
        invalid("arm mean outside [0,1] in set " + std::to_string(j));
    }
    std::vector<double> means;
    for (const auto& a : set) means.push_back(a.mean);
    std::sort(means.begin(), means.end());
    if (std::adjacent_find(means.begin(), means.end()) != means.end())
      invalid("tied means in arm-set " + std::to_string(j));

    int best = 0;
    for (int k = 1; k < static_cast<int>(set.size()); ++k)
      if (set[k].mean > set[best].mean) best = k;
    int second = best == 0 ? 1 : 0;
    for (int k = 0; k < static_cast<int>(set.size()); ++k)
      if (k != best && set[k].mean > set[second].mean) second = k;
    best_.push_back(best);
    second_.push_back(second);
    flat_offset_.push_back(flat_offset_.back() + set.size());
  }

  int n = 0;
  for (const auto& g : groups_) n += static_cast<int>(g.size());
  set_of_.assign(n, -1);
  for (std::size_t j = 0; j < groups_.size(); ++j) {
    if (groups_[j].empty()) invalid("client group " + std::to_string(j) + " is empty");
    for (int c : groups_[j]) {
      if (c < 0 || c >= n) invalid("client ids must be 0..n-1");
      if (set_of_[c] != -1) invalid("client " + std::to_string(c) + " is in two groups");
      set_of_[c] = static_cast<int>(j);
    }
  }

  for (int j = 1; j < num_sets(); ++j)
    if (mean({j, best_[j]}) > mean({best_set_, best_[best_set_]})) best_set_ = j;
  for (int j = 0; j < num_sets(); ++j)
    if (j != best_set_ && mean({j, best_[j]}) == mean({best_set_, best_[best_set_]}))
      invalid("globally best arm is not unique");
}

bool ProblemInstance::singleton_groups() const {
  return std::all_of(groups_.begin(), groups_.end(),
                     [](const auto& g) { return g.size() == 1; });
}

double ProblemInstance::local_gap(int j) const {
  return mean({j, best_.at(j)}) - mean({j, second_.at(j)});
}

ProblemInstance ProblemInstance::with_comm_period(int H) const {
  return ProblemInstance(arm_sets_, groups_, delta_, H);
}

ProblemInstance ProblemInstance::with_delta(double delta) const {
  return ProblemInstance(arm_sets_, groups_, delta, comm_period_);
}

ProblemInstance ProblemInstance::with_group_size(int per_group) const {
  if (per_group < 1) invalid("group size must be positive");
  std::vector<std::vector<int>> g(arm_sets_.size());
  for (int j = 0; j < num_sets(); ++j)
    for (int k = 0; k < per_group; ++k) g[j].push_back(j * per_group + k);
  return ProblemInstance(arm_sets_, std::move(g), delta_, comm_period_);
}

double heterogeneity_index(const ProblemInstance& inst, int i, int j) {
  if (i == j) throw Error(ErrorCode::UndefinedIndex, "index needs two distinct arm-sets");
  const double bi = inst.mean({i, inst.local_best(i)});
  const double bj = inst.mean({j, inst.local_best(j)});
  if (bi == bj) throw Error(ErrorCode::UndefinedIndex, "best means of the two sets coincide");
  return inst.local_gap(i) / std::fabs(bi - bj);
}

ProblemInstance make_target_detection_instance(double sigma, double delta, int comm_period) {
  if (!(sigma >= 1.0 && sigma <= 15.0))
    throw Error(ErrorCode::OutOfRange, "sigma must lie in [1,15], got " + std::to_string(sigma));
  auto b = ArmModel::bernoulli;
  return ProblemInstance({{b(0.9), b(0.9 - 0.05 * sigma), b(0.1)},
                          {b(0.85), b(0.8), b(0.3)},
                          {b(0.7), b(0.6), b(0.5)}},
                         {{0}, {1}, {2}}, delta, comm_period);
}

RewardStream::RewardStream(const ProblemInstance& inst, std::uint64_t seed)
    : inst_(&inst), seed_(seed) {
  streams_.resize(static_cast<std::size_t>(inst.num_clients()) * inst.num_arms());
}

RewardStream::Substream& RewardStream::substream(int client, ArmRef arm) {
  if (client < 0 || client >= inst_->num_clients())
    throw Error(ErrorCode::ArmNotAccessible, "unknown client", client);
  if (inst_->set_of(client) != arm.set || arm.index < 0 || arm.index >= inst_->set_size(arm.set))
    throw Error(ErrorCode::ArmNotAccessible,
                "client cannot sample arm " + std::to_string(arm.index) + " of set " +
                    std::to_string(arm.set),
                client);
  const int flat = inst_->flat_id(arm);
  auto& s = streams_[static_cast<std::size_t>(client) * inst_->num_arms() + flat];
  if (!s.started_) {
    s.started_ = true;
    s.gen_ = Xoshiro256(mix_seed({seed_, static_cast<std::uint64_t>(client),
                                  static_cast<std::uint64_t>(flat)}));
    const ArmModel& m = inst_->arm(arm);
    s.point_mass_ = m.kind == ArmModel::Kind::PointMass;
    s.value_ = m.mean;
    s.threshold_ = static_cast<std::uint64_t>(std::ldexp(m.mean, 53));
  }
  return s;
}

std::uint64_t RewardStream::draws(int client, ArmRef arm) const {
  const int flat = inst_->flat_id(arm);
  return streams_.at(static_cast<std::size_t>(client) * inst_->num_arms() + flat).count_;
}

}  // namespace fedbai
