#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedbai/adversary.hpp"
#include "fedbai/fedsel.hpp"

namespace fedbai {

// Element occurring in more than half of `arms`; throws NoMajority otherwise.
int majority_vote(std::span<const int> arms);

// Sorts, drops the e largest and e smallest values and returns the median of
// the rest (mean of the two middle values for an even count). Throws
// TooFewValues when fewer than 2e+1 values are given.
double trim(std::vector<double> values, int e);

struct RobustParams {
  double c = 8.0;
  int f = 0;
  std::int64_t epoch_cap = 10'000'000;
  std::int64_t round_cap = 100'000;
  bool trace_means = false;
};

struct AdversarySetup {
  std::vector<int> clients;  // Byzantine client ids
  AdversaryStrategy strategy;
  std::uint64_t seed = 0;

  bool contains(int client) const;
};

struct GroupState {
  int group = 0;
  std::vector<int> reporters;  // first 2f+1 to report, in arrival order
  int representative = -1;     // voted arm index
  std::vector<int> agreeing;   // reporters that sent the voted arm, ascending
  int trim_param = 0;          // f - |reporters| + |agreeing|
  bool active = true;
};

// Trimmed group estimate against the range spanned by the honest members.
struct HullCheck {
  std::int64_t round = 0;
  int group = 0;
  double upper = 0.0, lower = 0.0;
  double honest_upper_min = 0.0, honest_upper_max = 0.0;
  double honest_lower_min = 0.0, honest_lower_max = 0.0;

  bool contained() const;
};

struct RobustResult {
  RunOutcome outcome;
  Transcript transcript;
  std::vector<GroupState> groups;
  int groups_correctly_voted = 0;
  std::vector<HullCheck> hull_checks;
  std::int64_t hull_violations = 0;
};

// Throws PreconditionViolated unless every group has at least 3f+1 clients
// and at most f adversaries.
void check_robust_preconditions(const ProblemInstance& inst, int f, const AdversarySetup& adv);

RobustResult run_robust_fedsel(const ProblemInstance& inst, const RobustParams& params,
                               const AdversarySetup& adv, RewardStream& stream);

}  // namespace fedbai
