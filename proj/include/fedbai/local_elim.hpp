#pragma once

#include <cstdint>
#include <vector>

#include "fedbai/instance.hpp"

namespace fedbai {

struct ElimParams {
  double c = 8.0;  // beta(t) = c * alpha(t); c >= 2
  int num_clients = 1;
  int set_size = 2;
  double delta = 0.1;
  std::int64_t epoch_cap = 10'000'000;
};

// Parameters for `client` of `inst` with elimination multiplier c.
ElimParams elim_params_for(const ProblemInstance& inst, int client, double c,
                           std::int64_t epoch_cap = 10'000'000);

// Confidence radius sqrt(ln(4 |C| |A_i| t^2 / delta) / t), natural log.
double alpha(const ElimParams& p, double t);

// Per-arm empirical means after each pull: trace[arm][t-1] is the mean of the
// first t samples of that arm.
using MeanTrace = std::vector<std::vector<double>>;

struct LocalElimState {
  std::int64_t epoch = 0;  // completed epochs
  std::vector<int> active;
  std::vector<std::int64_t> pulls;
  std::vector<double> means;

  explicit LocalElimState(int set_size);
  bool done() const { return active.size() == 1; }
  // Folds one sample into the running mean of `arm`.
  void record(int arm, double x, MeanTrace* trace);
};

struct LocalReport {
  int arm = 0;  // index within the arm-set
  double mean_estimate = 0.0;
  std::int64_t epochs = 0;
};

// Lowest-index maximizer of the running means over the active set.
int leader(const LocalElimState& s);

// Drops every active arm trailing the leader by at least c * alpha(epoch).
void eliminate(LocalElimState& s, const ElimParams& p);

// Samples each active arm once (via sample(arm_index)), then eliminates.
// Requires at least two active arms.
template <class Sampler>
void run_epoch(LocalElimState& s, const ElimParams& p, Sampler&& sample,
               MeanTrace* trace = nullptr);

void run_epoch(LocalElimState& s, const ElimParams& p, RewardStream& stream, int client,
               MeanTrace* trace = nullptr);

// Epochs until a single arm survives. Throws EpochCapExceeded (tagged with
// `client`) when the cap is hit.
LocalReport run_to_termination(LocalElimState& s, const ElimParams& p, RewardStream& stream,
                               int client, MeanTrace* trace = nullptr);

LocalReport run_to_termination(const ElimParams& p, RewardStream& stream, int client,
                               MeanTrace* trace = nullptr);

LocalReport report_of(const LocalElimState& s);

void check_can_run_epoch(const LocalElimState& s);

template <class Sampler>
void run_epoch(LocalElimState& s, const ElimParams& p, Sampler&& sample, MeanTrace* trace) {
  check_can_run_epoch(s);
  for (int arm : s.active) s.record(arm, sample(arm), trace);
  ++s.epoch;
  eliminate(s, p);
}

}  // namespace fedbai
