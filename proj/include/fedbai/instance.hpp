#pragma once

#include <cstdint>
#include <vector>

#include "fedbai/rng.hpp"

namespace fedbai {

struct ArmModel {
  enum class Kind { Bernoulli, PointMass };

  Kind kind = Kind::Bernoulli;
  double mean = 0.0;  // success probability, or the constant value

  static ArmModel bernoulli(double p) { return {Kind::Bernoulli, p}; }
  static ArmModel point_mass(double v) { return {Kind::PointMass, v}; }
};

// An arm addressed by (arm-set, index within the set). All ids are 0-based.
struct ArmRef {
  int set = 0;
  int index = 0;

  friend bool operator==(const ArmRef&, const ArmRef&) = default;
};

// Arm-sets, the client groups that can sample them, the confidence level and
// the communication period H. Immutable after construction.
class ProblemInstance {
 public:
  // groups[j] lists the client ids that own arm-set j. Clients must be
  // exactly {0, ..., n-1}, each in one group.
  ProblemInstance(std::vector<std::vector<ArmModel>> arm_sets,
                  std::vector<std::vector<int>> groups, double delta,
                  int comm_period);

  int num_sets() const { return static_cast<int>(arm_sets_.size()); }
  int num_clients() const { return static_cast<int>(set_of_.size()); }
  int num_arms() const { return static_cast<int>(flat_offset_.back()); }
  int set_size(int j) const { return static_cast<int>(arm_sets_.at(j).size()); }

  const std::vector<std::vector<ArmModel>>& arm_sets() const { return arm_sets_; }
  const std::vector<ArmModel>& arm_set(int j) const { return arm_sets_.at(j); }
  const ArmModel& arm(ArmRef a) const { return arm_sets_.at(a.set).at(a.index); }
  double mean(ArmRef a) const { return arm(a).mean; }

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  const std::vector<int>& group(int j) const { return groups_.at(j); }
  int set_of(int client) const { return set_of_.at(client); }
  bool singleton_groups() const;

  double delta() const { return delta_; }
  int comm_period() const { return comm_period_; }

  int local_best(int j) const { return best_.at(j); }
  int local_second(int j) const { return second_.at(j); }
  // Gap between the best and second-best mean of set j.
  double local_gap(int j) const;

  int best_set() const { return best_set_; }
  ArmRef best_arm() const { return {best_set_, best_.at(best_set_)}; }

  // Set-major flat numbering of all arms.
  int flat_id(ArmRef a) const { return static_cast<int>(flat_offset_.at(a.set)) + a.index; }

  ProblemInstance with_comm_period(int H) const;
  ProblemInstance with_delta(double delta) const;
  // Replaces every group by `per_group` fresh clients; group j gets ids
  // j*per_group ... j*per_group + per_group - 1.
  ProblemInstance with_group_size(int per_group) const;

 private:
  std::vector<std::vector<ArmModel>> arm_sets_;
  std::vector<std::vector<int>> groups_;
  double delta_;
  int comm_period_;
  std::vector<int> set_of_;
  std::vector<int> best_;
  std::vector<int> second_;
  std::vector<std::size_t> flat_offset_;
  int best_set_ = 0;
};

// (best_i - second_i) / |best_i - best_j|.
double heterogeneity_index(const ProblemInstance& inst, int i, int j);

// Three Bernoulli arm-sets, one client each:
//   {0.9, 0.9 - 0.05*sigma, 0.1}, {0.85, 0.8, 0.3}, {0.7, 0.6, 0.5}.
// sigma must lie in [1, 15].
ProblemInstance make_target_detection_instance(double sigma, double delta = 0.1,
                                               int comm_period = 20);

// Independent, reproducible reward substreams per (client, arm).
class RewardStream {
 public:
  // One (client, arm) substream.
  class Substream {
   public:
    double draw() {
      ++count_;
      if (point_mass_) return value_;
      return (gen_.next() >> 11) < threshold_ ? 1.0 : 0.0;
    }
    std::uint64_t count() const { return count_; }

   private:
    friend class RewardStream;
    Xoshiro256 gen_;
    std::uint64_t threshold_ = 0;  // Bernoulli: success iff 53-bit draw < threshold
    double value_ = 0.0;
    bool point_mass_ = false;
    bool started_ = false;
    std::uint64_t count_ = 0;
  };

  RewardStream(const ProblemInstance& inst, std::uint64_t seed);

  // Throws ArmNotAccessible if the client's group does not own arm.set.
  double sample(int client, ArmRef arm) { return substream(client, arm).draw(); }
  Substream& substream(int client, ArmRef arm);
  std::uint64_t draws(int client, ArmRef arm) const;
  std::uint64_t seed() const { return seed_; }
  const ProblemInstance& instance() const { return *inst_; }

 private:
  const ProblemInstance* inst_;
  std::uint64_t seed_;
  std::vector<Substream> streams_;
};

}  // namespace fedbai
