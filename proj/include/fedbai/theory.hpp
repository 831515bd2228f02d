#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fedbai/instance.hpp"

namespace fedbai {

// Lower real branch of the Lambert W function: the w <= -1 solving
// w * exp(w) = x, for x in [-1/e, 0). Throws OutOfDomain otherwise.
double lambert_w_minus1(double x);

// (ln(-x) - 4 ln(-ln(-x)), ln(-x) - ln(-ln(-x))/4), which bracket W_{-1}(x)
// on [-1/e^2, 0). Throws OutOfDomain outside that interval.
std::pair<double, double> w_minus1_bounds(double x);

// Smallest real t >= 1 with sqrt(2 ln(cbar t) / t) <= theta, in closed form:
// -(2/theta^2) W_{-1}(-theta^2 / (2 cbar)). Requires cbar > e and
// theta^2/(2 cbar) <= 1/e.
double crossing_time(double theta, double cbar);

// Upper bound on the difference between the times at which
// sqrt(2 ln(cbar t)/t) falls to gap/8 and to sigma*gap/8. Requires
// gap in (0,1), sigma > 1, sigma*gap <= 1 and cbar > e; otherwise throws
// PreconditionViolated.
double crossing_time_gap_bound(double gap, double sigma, double cbar);

struct SetBounds {
  int set = 0;
  double cbar = 0.0;        // sqrt(4 |C| |A_i| / delta)
  double local_gap = 0.0;   // best minus second-best mean of the set
  double cross_gap = 0.0;   // global best mean minus this set's best mean
  double sigma_to_best = 0.0;    // index(this set, best set)
  double sigma_from_best = 0.0;  // index(best set, this set)
  double rounds_to_best = 1.0;   // rounds bound driven by this set's own radius
  double rounds_from_best = 1.0; // rounds bound driven by the best set's radius
  double rounds = 1.0;           // max of the two; for the best set, the total bound
  std::vector<std::int64_t> arm_pull_bounds;  // per arm, Phase I
  std::int64_t phase1_pull_bound = 0;
};

struct TheoryReport {
  int best_set = 0;
  int comm_period = 1;
  double c = 8.0;
  double min_cross_gap = 0.0;  // global best minus the best mean of any other set
  int bits_bound = 0;          // per-round bits: ceil(log2(8 / min_cross_gap)) + 1
  bool single_round_regime = false;
  double rounds_bound = 1.0;   // total Phase-II rounds bound
  std::vector<SetBounds> sets; // indexed by arm-set
};

// Bounds for the federated protocol with elimination multiplier c. The
// rounds bound of a non-best set is 1 exactly when its cross index with the
// best set is at most 1.
TheoryReport round_bounds(const ProblemInstance& inst, double c = 8.0);

// True iff both cross indices between the best set and every other set are at
// most 1 (the regime where a single round suffices).
bool single_round_regime(const ProblemInstance& inst);

}  // namespace fedbai
